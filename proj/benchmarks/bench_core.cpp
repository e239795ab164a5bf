#include <benchmark/benchmark.h>

#include "ibclab/assemble.hpp"
#include "ibclab/spectra.hpp"

namespace {

using namespace ibclab;

FockSpacePtr bench_space(int m, int n_max) {
  return FockSpace::build(RadialGrid{8.5 / (m + 1), m, 0.0}, n_max);
}

void BM_basis_build(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(SectorBasis::build(n, m));
}
BENCHMARK(BM_basis_build)->Args({2, 200})->Args({3, 80})->Args({4, 48});

void BM_assemble_dirichlet(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n_max = static_cast<int>(state.range(1));
  ModelParams model{1.0, 1.0, n_max};
  auto space = bench_space(m, n_max);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        assemble_ibc(model, IbcSpec::dirichlet(), space));
}
BENCHMARK(BM_assemble_dirichlet)->Args({100, 2})->Args({60, 3});

void BM_matvec(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ModelParams model{1.0, 1.0, 2};
  auto space = bench_space(m, 2);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), space);
  Eigen::VectorXd x = Eigen::VectorXd::Random(a.dim());
  Eigen::VectorXd y(a.dim());
  for (auto _ : state) {
    y.noalias() = a.sym_real() * x;
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_matvec)->Arg(100)->Arg(200);

void BM_ground_state(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ModelParams model{1.0, 1.0, 2};
  auto space = bench_space(m, 2);
  SparseHermitian a = assemble_ibc(model, IbcSpec::dirichlet(), space);
  SolverOptions opts;
  opts.mode = SolverOptions::Mode::Lanczos;
  for (auto _ : state)
    benchmark::DoNotOptimize(lowest_eigenpairs(a, 1, 1e-8, opts));
}
BENCHMARK(BM_ground_state)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
