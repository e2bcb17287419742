// Serial vs OpenMP kernel timings, plus end-to-end parse throughput.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "efdp/kernels.hpp"
#include "efdp/model.hpp"

using namespace efdp;
using Clock = std::chrono::steady_clock;

namespace {

using Kernel = void (*)(std::size_t, std::size_t, std::size_t, const double*, const double*, double*);

struct Case {
  const char* name;
  std::size_t m, k, n;
  Kernel serial_fn, parallel_fn;
  std::size_t a_size, b_size, c_size;
};

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Seconds per call, best of `reps` timed batches.
double time_kernel(Kernel fn, const Case& c, const std::vector<double>& a, const std::vector<double>& b,
                   std::vector<double>& out, int reps) {
  const std::size_t flops = c.m * c.k * c.n;
  const int inner = static_cast<int>(std::max<std::size_t>(1, (1u << 24) / std::max<std::size_t>(flops, 1)));
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    std::fill(out.begin(), out.end(), 0.0);
    const auto start = Clock::now();
    for (int i = 0; i < inner; ++i) fn(c.m, c.k, c.n, a.data(), b.data(), out.data());
    best = std::min(best, std::chrono::duration<double>(Clock::now() - start).count() / inner);
  }
  return best;
}

Sentence synthetic_sentence(std::size_t n, std::mt19937_64& rng) {
  Sentence s;
  std::uniform_int_distribution<int> word(0, 199);
  for (std::size_t i = 0; i < n; ++i) {
    Token t;
    t.index = static_cast<int>(i) + 1;
    t.form = "w" + std::to_string(word(rng));
    t.pos = "P" + std::to_string(i % 5);
    t.head = static_cast<int>(i);  // right-branching chain
    t.deprel = i == 0 ? "root" : "dep";
    s.tokens.push_back(t);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"efdp kernel benchmark"};
  int reps = 5;
  int sentences = 40;
  app.add_option("--reps", reps, "timed repetitions per kernel (best is reported)");
  app.add_option("--sentences", sentences, "sentences for the parse throughput run");
  CLI11_PARSE(app, argc, argv);

  std::printf("OpenMP threads: %d\n\n", omp_get_max_threads());
  std::printf("%-8s %16s %12s %12s %8s %10s\n", "kernel", "m x k x n", "serial us", "parallel us", "speedup",
              "identical");

  std::mt19937_64 rng(1);
  namespace S = kernels::serial;
  namespace P = kernels::parallel;
  // Shapes met in training: matrix-vector products of the default layers,
  // their backward passes, and a square case for reference.
  const std::vector<Case> cases = {
      {"gemm_nn", 600, 750, 1, S::gemm_nn, P::gemm_nn, 600 * 750, 750, 600},
      {"gemm_nn", 800, 325, 1, S::gemm_nn, P::gemm_nn, 800 * 325, 325, 800},
      {"gemm_nn", 256, 256, 256, S::gemm_nn, P::gemm_nn, 256 * 256, 256 * 256, 256 * 256},
      {"gemm_nt", 600, 1, 750, S::gemm_nt, P::gemm_nt, 600, 750, 600 * 750},
      {"gemm_nt", 256, 256, 256, S::gemm_nt, P::gemm_nt, 256 * 256, 256 * 256, 256 * 256},
      {"gemm_tn", 600, 750, 1, S::gemm_tn, P::gemm_tn, 600 * 750, 600, 750},
      {"gemm_tn", 256, 256, 256, S::gemm_tn, P::gemm_tn, 256 * 256, 256 * 256, 256 * 256},
  };
  for (const auto& c : cases) {
    auto a = random_vector(c.a_size, rng);
    auto b = random_vector(c.b_size, rng);
    std::vector<double> cs(c.c_size), cp(c.c_size);
    const double ts = time_kernel(c.serial_fn, c, a, b, cs, reps);
    const double tp = time_kernel(c.parallel_fn, c, a, b, cp, reps);
    std::fill(cs.begin(), cs.end(), 0.0);
    std::fill(cp.begin(), cp.end(), 0.0);
    c.serial_fn(c.m, c.k, c.n, a.data(), b.data(), cs.data());
    c.parallel_fn(c.m, c.k, c.n, a.data(), b.data(), cp.data());
    char shape[32];
    std::snprintf(shape, sizeof shape, "%zux%zux%zu", c.m, c.k, c.n);
    std::printf("%-8s %16s %12.2f %12.2f %8.2f %10s\n", c.name, shape, ts * 1e6, tp * 1e6, ts / tp,
                cs == cp ? "yes" : "NO");
  }

  std::vector<Sentence> corpus;
  std::uniform_int_distribution<std::size_t> len(5, 25);
  for (int i = 0; i < sentences; ++i) corpus.push_back(synthetic_sentence(len(rng), rng));
  std::size_t tokens = 0;
  for (const auto& s : corpus) tokens += s.size();
  ParserModel model(ModelConfig{}, Vocab::build(corpus));

  std::printf("\nparse throughput, default dimensions, %d sentences / %zu tokens\n", sentences, tokens);
  std::vector<ArcList> reference;
  for (auto [label, mode] : {std::pair{"serial kernels", kernels::Mode::serial},
                             std::pair{"parallel kernels", kernels::Mode::parallel},
                             std::pair{"automatic", kernels::Mode::automatic}}) {
    kernels::set_mode(mode);
    const auto start = Clock::now();
    auto arcs = model.parse_all(corpus, 1);
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (reference.empty()) reference = arcs;
    std::printf("  %-18s %8.1f tokens/s  %s\n", label, double(tokens) / secs,
                arcs == reference ? "same parses" : "PARSES DIFFER");
  }
  kernels::set_mode(kernels::Mode::automatic);
  const auto start = Clock::now();
  auto arcs = model.parse_all(corpus, 0);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("  %-18s %8.1f tokens/s  %s\n", "sentence workers", double(tokens) / secs,
              arcs == reference ? "same parses" : "PARSES DIFFER");
  return 0;
}
