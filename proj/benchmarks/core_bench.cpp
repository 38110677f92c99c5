#include <benchmark/benchmark.h>

#include <random>

#include "netsync/netsync.hpp"

namespace {

using namespace netsync;

Matrix stable_random(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng) / std::sqrt(double(n));
  return a - 2.0 * identity(n);
}

void BM_Lyapunov(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix a = stable_random(n, 1);
  const Matrix q = identity(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov(a, q));
}
BENCHMARK(BM_Lyapunov)->Arg(10)->Arg(40)->Arg(120);

void BM_Care(benchmark::State& state) {
  const Index n = state.range(0);
  const auto p = make_lqr_problem(stable_random(n, 2) + 2.5 * identity(n), identity(n),
                                  (Matrix(2 * n, n) << identity(n), Matrix::Zero(n, n)).finished(),
                                  (Matrix(2 * n, n) << Matrix::Zero(n, n), identity(n)).finished());
  for (auto _ : state) benchmark::DoNotOptimize(solve_care(p));
}
BENCHMARK(BM_Care)->Arg(3)->Arg(15)->Arg(30);

void BM_H2Modal(benchmark::State& state) {
  const Index n = state.range(0);
  const auto coupling = build_topology(TopologyKind::Star, n);
  const auto net = make_network(NodeModel::lure(), coupling, 1.0);
  const auto lin = assemble_linearization(net, {Vector::Zero(2)}, identity(2),
                                          LureParams{}.c1_row(), Matrix::Zero(1, 2));
  const auto modes = modal_decompose(lin, coupling);
  for (auto _ : state) benchmark::DoNotOptimize(h2_modal(modes));
}
BENCHMARK(BM_H2Modal)->Arg(100)->Arg(1000);

void BM_Rk4Chua(benchmark::State& state) {
  const Index n = state.range(0);
  const auto net = make_network(NodeModel::chua(), build_topology(TopologyKind::Ring, n), 6.0);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 1.0;
  cfg.ic_low = Vector::Constant(3, -2.0);
  cfg.ic_high = Vector::Constant(3, 2.0);
  cfg.tail_epsilon.reset();
  const Vector x0 = random_initial_state(n, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(net, x0, cfg));
}
BENCHMARK(BM_Rk4Chua)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
