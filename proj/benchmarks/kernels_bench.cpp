#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "l0acc/model.hpp"
#include "l0acc/sparsity.hpp"
#include "l0acc/synthetic.hpp"

namespace {

using namespace l0acc;

Dataset bench_data(Index m, Index n, double density) {
  SyntheticOptions o;
  o.rows = m;
  o.cols = n;
  o.planted = 10;
  o.density = density;
  o.seed = 42;
  return make_regression(o).data;
}

std::vector<Index> first_cols(Index k) {
  std::vector<Index> J(k);
  std::iota(J.begin(), J.end(), Index{0});
  return J;
}

void BM_MatvecCols(benchmark::State& state) {
  const auto d = bench_data(2000, 5000, 0.05);
  const auto J = first_cols(static_cast<Index>(state.range(0)));
  const std::vector<double> v(J.size(), 1.0);
  std::vector<double> out(d.rows());
  for (auto _ : state) {
    matvec_cols_into(d.X, J, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_MatvecCols)->Arg(10)->Arg(100)->Arg(1000);

void BM_TransposeMatvec(benchmark::State& state) {
  const auto d = bench_data(2000, 5000, 0.05);
  const std::vector<double> u(d.rows(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(transpose_matvec(d.X, u));
}
BENCHMARK(BM_TransposeMatvec);

void BM_ProjectTopk(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = N(rng);
  for (auto _ : state) benchmark::DoNotOptimize(project_topk(v, 50));
}
BENCHMARK(BM_ProjectTopk)->Arg(1000)->Arg(100000);

// Extrapolated state (O(m)) against a from-scratch state on the same support.
void BM_ExtrapolatedState(benchmark::State& state) {
  const Model model(bench_data(2000, 5000, 0.05), LossSpec::least_squares());
  const auto J = first_cols(200);
  SparseIterate a{J, std::vector<double>(J.size(), 0.1), model.cols()};
  SparseIterate b{J, std::vector<double>(J.size(), 0.2), model.cols()};
  const auto prev = make_state(model, a);
  const auto cur = make_state(model, b);
  for (auto _ : state) benchmark::DoNotOptimize(update_extrapolated(model, cur, prev, 0.5));
}
BENCHMARK(BM_ExtrapolatedState);

void BM_ScratchState(benchmark::State& state) {
  const Model model(bench_data(2000, 5000, 0.05), LossSpec::least_squares());
  const auto J = first_cols(200);
  SparseIterate w{J, std::vector<double>(J.size(), 0.25), model.cols()};
  for (auto _ : state) benchmark::DoNotOptimize(make_state(model, w));
}
BENCHMARK(BM_ScratchState);

}  // namespace
