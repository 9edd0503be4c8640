// Serial reference kernels against the chunked OpenMP versions on one E-step /
// M-step worth of work. Run with OMP_NUM_THREADS set to compare scaling.
#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "pmog/kernels.hpp"

namespace {

using namespace pmog;

struct Fixture {
  Matrix Z;
  Vector w;
  Vector u;
  Matrix alpha;
  MogParams params{Vector::Constant(5, 0.2), Vector::LinSpaced(5, -2.0, 2.0), Vector::Constant(5, 0.5)};

  explicit Fixture(Eigen::Index n, Eigen::Index q = 7) {
    Rng rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    Z.resize(q, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < q; ++i) Z(i, j) = normal(rng);
    w = Vector::Ones(q).normalized();
    kernels::serial::project(Z, w, u);
    kernels::serial::responsibilities(u, params, alpha);
  }
};

const Fixture& fixture(Eigen::Index n) {
  static std::map<Eigen::Index, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Fixture(n)).first;
  return it->second;
}

template <bool Parallel>
void BM_Responsibilities(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  Matrix alpha;
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::responsibilities(f.u, f.params, alpha)
                      : kernels::serial::responsibilities(f.u, f.params, alpha);
    benchmark::DoNotOptimize(r.log_likelihood);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_QuadraticForm(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    QuadraticForm qf = Parallel
                           ? kernels::parallel::quadratic_form(f.alpha, f.Z, f.params.mu(), f.params.sigma2())
                           : kernels::serial::quadratic_form(f.alpha, f.Z, f.params.mu(), f.params.sigma2());
    benchmark::DoNotOptimize(qf.A.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_ExpectedLogTerm(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  for (auto _ : state) {
    double q = Parallel ? kernels::parallel::expected_log_term(f.alpha, f.u, f.params)
                        : kernels::serial::expected_log_term(f.alpha, f.u, f.params);
    benchmark::DoNotOptimize(q);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Responsibilities<false>)->Name("responsibilities/serial")->Range(1 << 10, 1 << 17);
BENCHMARK(BM_Responsibilities<true>)->Name("responsibilities/parallel")->Range(1 << 10, 1 << 17);
BENCHMARK(BM_QuadraticForm<false>)->Name("quadratic_form/serial")->Range(1 << 10, 1 << 17);
BENCHMARK(BM_QuadraticForm<true>)->Name("quadratic_form/parallel")->Range(1 << 10, 1 << 17);
BENCHMARK(BM_ExpectedLogTerm<false>)->Name("expected_log_term/serial")->Range(1 << 10, 1 << 17);
BENCHMARK(BM_ExpectedLogTerm<true>)->Name("expected_log_term/parallel")->Range(1 << 10, 1 << 17);

BENCHMARK_MAIN();
