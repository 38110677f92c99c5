#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "netsync/error.hpp"
#include "netsync/lqr.hpp"
#include "netsync/sim.hpp"
#include "oracles.hpp"

namespace netsync {
namespace {

Matrix mat(Index r, Index c, std::initializer_list<double> v) {
  Matrix m(r, c);
  auto it = v.begin();
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

LinearizedNetwork chua_network(const OuterCoupling& coupling, double sigma) {
  const auto net = make_network(NodeModel::chua(), coupling, sigma);
  return assemble_linearization(net, {Vector::Zero(3)}, identity(3), identity(3),
                                identity(3));
}

TEST(LqrProblem, CompletesOrthonormalBasis) {
  const auto p = make_lqr_problem(mat(1, 1, {0}), mat(1, 1, {1}), mat(2, 1, {1, 0}),
                                  mat(2, 1, {0, 1}));
  ASSERT_EQ(p.d_perp.rows(), 2);
  ASSERT_EQ(p.d_perp.cols(), 1);
  EXPECT_NEAR(std::abs(p.d_perp(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(p.d_perp(1, 0), 0.0, 1e-15);
  const auto square = make_lqr_problem(identity(3), identity(3), identity(3), identity(3));
  EXPECT_EQ(square.d_perp.cols(), 0);
  EXPECT_THROW(make_lqr_problem(identity(2), identity(3), identity(2), identity(2)),
               InvalidArgument);
}

TEST(CheckAssumptions, UncontrollableUnstableMode) {
  const auto r = check_assumptions(
      make_lqr_problem(mat(1, 1, {1}), mat(1, 1, {0}), mat(1, 1, {1}), mat(1, 1, {1})));
  EXPECT_FALSE(r.stabilizable);
  EXPECT_FALSE(r.all());
  EXPECT_FALSE(r.summary().empty());
}

TEST(CheckAssumptions, IdentityInputOutputOnChuaNode) {
  const Matrix df = jacobian_at(NodeModel::chua(), {Vector::Zero(3)});
  const auto r =
      check_assumptions(make_lqr_problem(df, identity(3), identity(3), identity(3)));
  EXPECT_TRUE(r.d_orthonormal);
  EXPECT_TRUE(r.no_imaginary_zeros);
  EXPECT_TRUE(r.all()) << r.summary();
}

TEST(CheckAssumptions, SquareFeedthroughWithAxisEigenvalue) {
  // With D square, D_perp is empty and a - b d^T c = 0 sits on the axis.
  const auto r = check_assumptions(
      make_lqr_problem(identity(3), identity(3), identity(3), identity(3)));
  EXPECT_TRUE(r.d_orthonormal);
  EXPECT_FALSE(r.no_imaginary_zeros);
}

TEST(CheckAssumptions, ControllableObservableZeroEigenvalue) {
  const auto r = check_assumptions(make_lqr_problem(
      mat(1, 1, {0}), mat(1, 1, {1}), mat(2, 1, {1, 0}), mat(2, 1, {0, 1})));
  EXPECT_TRUE(r.all()) << r.summary();
}

TEST(CheckAssumptions, NonOrthonormalD) {
  const auto r = check_assumptions(
      make_lqr_problem(mat(1, 1, {-1}), mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {2})));
  EXPECT_FALSE(r.d_orthonormal);
}

TEST(CheckAssumptions, UndetectableMode) {
  const auto r = check_assumptions(make_lqr_problem(
      mat(2, 2, {1, 0, 0, -1}), identity(2), mat(2, 2, {0, 0, 0, 1}), Matrix::Zero(2, 2)));
  EXPECT_FALSE(r.detectable);
}

TEST(CheckAssumptions, InvariantZeroOnImaginaryAxis) {
  // a - b d^T c = 0 and d_perp^T c = 0.
  const auto p = make_lqr_problem(mat(1, 1, {1}), mat(1, 1, {1}), mat(2, 1, {0, 1}),
                                  mat(2, 1, {0, 1}));
  const auto r = check_assumptions(p);
  EXPECT_TRUE(r.stabilizable);
  EXPECT_TRUE(r.detectable);
  EXPECT_FALSE(r.no_imaginary_zeros);
  EXPECT_THROW(solve_care(p), AssumptionError);
  CareOptions unchecked;
  unchecked.check = false;
  EXPECT_THROW(solve_care(p, unchecked), Error);
}

TEST(SolveCare, ScalarStabilisingRoot) {
  const auto s = solve_care(make_lqr_problem(mat(1, 1, {1}), mat(1, 1, {1}),
                                             mat(2, 1, {1, 0}), mat(2, 1, {0, 1})));
  EXPECT_NEAR(s.x(0, 0), 1.0 + std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.f(0, 0), -(1.0 + std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(s.closed_loop_abscissa, -std::sqrt(2.0), 1e-12);
}

TEST(SolveCare, SquareFeedthroughGivesZeroSolution) {
  const auto p =
      make_lqr_problem(mat(1, 1, {0}), mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {1}));
  const auto s = solve_care(p);
  EXPECT_NEAR(s.x(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(s.f(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(s.closed_loop_abscissa, -1.0, 1e-12);
}

TEST(SolveCare, StableWithoutCost) {
  const Matrix a = mat(2, 2, {-1, 0, 0, -2});
  const auto s = solve_care(make_lqr_problem(a, identity(2), identity(2), identity(2)));
  EXPECT_LE(s.x.norm(), 1e-12);
  EXPECT_LE((s.f + identity(2)).norm(), 1e-12);
}

TEST(SolveCare, RandomProblemsResidualAndStability) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 5;
    const Matrix a = oracles::random_matrix(n, n, rng);
    const Matrix b = oracles::random_matrix(n, 2, rng);
    const Matrix c = oracles::random_matrix(n + 2, n, rng);
    Matrix d = Matrix::Zero(n + 2, 2);
    d(n, 0) = 1.0;
    d(n + 1, 1) = 1.0;
    const auto p = make_lqr_problem(a, b, c, d);
    const auto s = solve_care(p);
    EXPECT_LE((s.x - s.x.transpose()).norm(), 1e-10 * (1 + s.x.norm()));
    EXPECT_LE(s.residual, 1e-8 * s.residual_scale + 1e-12);
    const auto [res, scale] = care_residual(p, s.x);
    EXPECT_NEAR(res, s.residual, 1e-9 * scale + 1e-12);
    const Matrix cl = a + b * s.f;
    EXPECT_NEAR(spectral_abscissa(cl), s.closed_loop_abscissa, 1e-9);
    EXPECT_LT(s.closed_loop_abscissa, -1e-9);
    EXPECT_LE((s.f + (b.transpose() * s.x + d.transpose() * c)).norm(),
              1e-12 * (1 + s.f.norm()));
  }
}

TEST(SolveCare, LocalOptimalityProbe) {
  const auto lin = chua_network(build_topology(TopologyKind::Global, 4), 1.0);
  const auto s = lqr_gain_full(lin);
  std::mt19937_64 rng(101);
  const Vector eta0 = oracles::random_matrix(lin.state_dim(), 1, rng);
  const double base = minimized_output_norm(lin, s.f, eta0);
  int probes = 0;
  while (probes < 20) {
    Matrix delta = oracles::random_matrix(s.f.rows(), s.f.cols(), rng);
    delta /= delta.norm();
    const Matrix f = s.f + 1e-3 * delta;
    if (!is_stable(lin.a_c + lin.b_c * f)) continue;
    EXPECT_GE(minimized_output_norm(lin, f, eta0), base - 1e-9);
    ++probes;
  }
}

TEST(LqrGainFull, SingleNodeIsNodeProblem) {
  const auto lin = chua_network(OuterCoupling::from_matrix(Matrix::Zero(1, 1)), 1.0);
  const auto full = lqr_gain_full(lin);
  const auto node = solve_care(
      make_lqr_problem(lin.node_jacobian, identity(3), identity(3), identity(3)));
  EXPECT_LE((full.f - node.f).norm(), 1e-10 * node.f.norm());
}

TEST(LqrGainFull, RejectsOversizedNetwork) {
  const auto lin = chua_network(build_topology(TopologyKind::Ring, 81), 1.0);
  EXPECT_THROW(lqr_gain_full(lin), InvalidArgument);
}

TEST(LqrGainModal, MatchesFullOnChuaGlobalFive) {
  const auto coupling = build_topology(TopologyKind::Global, 5);
  const auto lin = chua_network(coupling, 1.0);
  const auto full = lqr_gain_full(lin);
  const auto modal = lqr_gain_modal(modal_decompose(lin, coupling), coupling);
  EXPECT_LE((modal.gain - full.f).norm(), 1e-6 * full.f.norm());
  EXPECT_NEAR(modal.closed_loop_abscissa,
              spectral_abscissa(lin.a_c + lin.b_c * modal.gain), 1e-9);
  EXPECT_LT(modal.closed_loop_abscissa, -1e-9);
}

TEST(LqrGainModal, MatchesFullOnRandomCouplings) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 3; ++trial) {
    const auto coupling = OuterCoupling::from_matrix(oracles::random_laplacian(6, rng));
    const auto lin = chua_network(coupling, 0.7);
    const auto full = lqr_gain_full(lin);
    const auto modal = lqr_gain_modal(modal_decompose(lin, coupling), coupling);
    EXPECT_LE((modal.gain - full.f).norm(), 1e-6 * full.f.norm());
  }
}

TEST(LqrGainModal, DiagonalCouplingGivesBlockDiagonalGain) {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 0.5, 1.0, 2.0;
  const auto coupling = OuterCoupling::from_matrix(m);
  const auto lin = chua_network(coupling, 1.0);
  const auto modal = lqr_gain_modal(modal_decompose(lin, coupling), coupling);
  std::vector<Matrix> blocks;
  for (const auto& s : modal.per_mode) blocks.push_back(s.f);
  EXPECT_LE((modal.gain - block_diagonal(blocks)).norm(), 1e-12);
}

TEST(LqrGainModal, IdenticalModesGiveKroneckerGain) {
  const auto coupling = OuterCoupling::from_matrix(Matrix::Zero(4, 4));
  const auto lin = chua_network(coupling, 1.0);
  const auto modal = lqr_gain_modal(modal_decompose(lin, coupling), coupling);
  EXPECT_LE((modal.gain - kron(identity(4), modal.per_mode[0].f)).norm(), 1e-12);
}

TEST(LqrGainModal, FailingModeNamed) {
  const auto coupling = build_topology(TopologyKind::Ring, 4);
  const auto net = make_network(NodeModel::linear(identity(1)), coupling, 1.0);
  const auto lin = assemble_linearization(net, {Vector::Zero(1)}, Matrix::Zero(1, 1),
                                          identity(1), identity(1));
  try {
    lqr_gain_modal(modal_decompose(lin, coupling), coupling);
    FAIL();
  } catch (const AssumptionError& e) {
    EXPECT_NE(std::string(e.what()).find("mode"), std::string::npos);
  }
}

TEST(MinimizedOutputNorm, ZeroAndScalar) {
  const auto lin = chua_network(build_topology(TopologyKind::Global, 3), 1.0);
  const auto s = lqr_gain_full(lin);
  EXPECT_EQ(minimized_output_norm(lin, s.f, Vector::Zero(9)), 0.0);
  EXPECT_NEAR(closed_loop_output_norm(mat(1, 1, {-1}), mat(1, 1, {0}), Vector::Ones(1)),
              0.0, 1e-15);
  EXPECT_THROW(closed_loop_output_norm(mat(1, 1, {1}), mat(1, 1, {1}), Vector::Ones(1)),
               UnstableError);
}

TEST(MinimizedOutputNorm, MatchesSimulatedLinearLoop) {
  const auto coupling = build_topology(TopologyKind::Global, 5);
  const auto lin = chua_network(coupling, 1.0);
  const auto s = lqr_gain_full(lin);
  const auto net = make_network(NodeModel::linear(lin.node_jacobian), coupling, 1.0);
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 20.0;
  cfg.ic_low = Vector::Constant(3, -2.0);
  cfg.ic_high = Vector::Constant(3, 2.0);
  const Vector eta0 = random_initial_state(5, cfg);
  IntegrateOptions opts;
  opts.controller = linear_feedback(s.f, identity(3));
  opts.output = OutputMap{identity(3), identity(3)};
  const double simulated = output_error(integrate(net, eta0, cfg, opts)).l2;
  const double gramian = minimized_output_norm(lin, s.f, eta0);
  EXPECT_NEAR(simulated, gramian, 1e-3 * gramian);
}

}  // namespace
}  // namespace netsync
