#pragma once

#include <cstddef>

// Dense row-major matrix kernels behind the autodiff ops.
//
// Each kernel exists twice: a plain serial loop nest kept as the reference,
// and an OpenMP version that splits work over output rows. Both sum every
// output element in the same order; results are bit-identical.
namespace efdp::kernels {

enum class Mode { automatic, serial, parallel };

// Process-wide dispatch mode; `automatic` uses the parallel kernel only when
// the problem is large enough to amortize thread start-up.
void set_mode(Mode mode) noexcept;
Mode mode() noexcept;

// Work (multiply-adds) above which `automatic` goes parallel.
inline constexpr std::size_t kParallelThreshold = 1 << 16;

namespace serial {
// C[m,n] += A[m,k] * B[k,n]
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
// C[m,k] += A[m,n] * B[k,n]^T
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
// C[k,n] += A[m,k]^T * B[m,n]
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
}  // namespace serial

namespace parallel {
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
}  // namespace parallel

// Dispatching entry points used by the tape.
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c);

}  // namespace efdp::kernels
