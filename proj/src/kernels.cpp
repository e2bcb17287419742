#include "efdp/kernels.hpp"

#include <omp.h>

#include <atomic>

namespace efdp::kernels {
namespace {
std::atomic<Mode> g_mode{Mode::automatic};

bool go_parallel(std::size_t work) {
  switch (g_mode.load(std::memory_order_relaxed)) {
    case Mode::serial:
      return false;
    case Mode::parallel:
      return true;
    case Mode::automatic:
      break;
  }
  return work >= kParallelThreshold;
}
// Four interleaved partial sums; shared by both variants so results match.
inline double dot(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    s0 += x[j] * y[j];
    s1 += x[j + 1] * y[j + 1];
    s2 += x[j + 2] * y[j + 2];
    s3 += x[j + 3] * y[j + 3];
  }
  for (; j < n; ++j) s0 += x[j] * y[j];
  return (s0 + s1) + (s2 + s3);
}

// crow[p] += av * b[p]: one row of an outer product.
inline void outer_row(double av, const double* b, double* crow, std::size_t k) {
  for (std::size_t p = 0; p < k; ++p) crow[p] += av * b[p];
}
}  // namespace

void set_mode(Mode m) noexcept { g_mode.store(m, std::memory_order_relaxed); }
Mode mode() noexcept { return g_mode.load(std::memory_order_relaxed); }

namespace serial {

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  if (n == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = a + i * k;
      c[i] += dot(arow, b, k);
    }
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  if (n == 1) {
    for (std::size_t i = 0; i < m; ++i) outer_row(a[i], b, c + i * k, k);
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * n;
    double* crow = c + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      crow[p] += dot(arow, brow, n);
    }
  }
}

// Row-major sweep over A; each C element still accumulates in ascending i.
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  if (n == 1) {
    for (std::size_t i = 0; i < m; ++i) outer_row(b[i], a + i * k, c, k);
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    const double* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace serial

namespace parallel {

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* crow = c + i * n;
    const double* arow = a + i * k;
    if (n == 1) {
      crow[0] += dot(arow, b, k);
      continue;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* arow = a + i * n;
    double* crow = c + i * k;
    if (n == 1) {
      outer_row(arow[0], b, crow, k);
      continue;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      crow[p] += dot(arow, brow, n);
    }
  }
}

// Each thread owns a contiguous block of C rows and sweeps A row-major.
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
#pragma omp parallel
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const auto threads = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t lo = k * t / threads, hi = k * (t + 1) / threads;
    for (std::size_t i = 0; i < m && n == 1; ++i) outer_row(b[i], a + i * k + lo, c + lo, hi - lo);
    for (std::size_t i = 0; i < m && n != 1; ++i) {
      const double* arow = a + i * k;
      const double* brow = b + i * n;
      for (std::size_t p = lo; p < hi; ++p) {
        const double av = arow[p];
        double* crow = c + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  }
}

}  // namespace parallel

void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  if (go_parallel(m * k * n))
    parallel::gemm_nn(m, k, n, a, b, c);
  else
    serial::gemm_nn(m, k, n, a, b, c);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  if (go_parallel(m * k * n))
    parallel::gemm_nt(m, n, k, a, b, c);
  else
    serial::gemm_nt(m, n, k, a, b, c);
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c) {
  if (go_parallel(m * k * n))
    parallel::gemm_tn(m, k, n, a, b, c);
  else
    serial::gemm_tn(m, k, n, a, b, c);
}

}  // namespace efdp::kernels
