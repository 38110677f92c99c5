#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "netsync/csv.hpp"
#include "netsync/error.hpp"
#include "netsync/topology.hpp"
#include "oracles.hpp"

namespace netsync {
namespace {

Vector sorted(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

TEST(BuildTopology, GlobalFour) {
  const auto g = build_topology(TopologyKind::Global, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      EXPECT_EQ(g.matrix()(i, j), i == j ? 3.0 : -1.0);
  EXPECT_LE((g.eigenvalues() - Vector((Vector(4) << 0, 4, 4, 4).finished())).norm(),
            1e-12);
}

TEST(BuildTopology, StarFour) {
  const auto s = build_topology(TopologyKind::Star, 4);
  EXPECT_EQ(s.matrix()(0, 0), 3.0);
  for (Index i = 1; i < 4; ++i) {
    EXPECT_EQ(s.matrix()(i, i), 1.0);
    EXPECT_EQ(s.matrix()(0, i), -1.0);
  }
  EXPECT_LE((s.eigenvalues() - Vector((Vector(4) << 0, 1, 1, 4).finished())).norm(),
            1e-12);
}

TEST(BuildTopology, RingFourIsCirculant) {
  const auto r = build_topology(TopologyKind::Ring, 4);
  Matrix expected(4, 4);
  expected << 2, -1, 0, -1,  //
      -1, 2, -1, 0,          //
      0, -1, 2, -1,          //
      -1, 0, -1, 2;
  EXPECT_EQ(r.matrix(), expected);
  EXPECT_LE((r.eigenvalues() - Vector((Vector(4) << 0, 2, 2, 4).finished())).norm(),
            1e-12);
}

TEST(BuildTopology, RingSpectrumMatchesCirculantFormula) {
  for (Index n = 3; n <= 50; ++n) {
    const auto r = build_topology(TopologyKind::Ring, n);
    Vector formula(n);
    for (Index k = 0; k < n; ++k) {
      formula[k] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n);
    }
    EXPECT_LE((r.eigenvalues() - sorted(formula)).cwiseAbs().maxCoeff(), 1e-9)
        << "N=" << n;
  }
}

TEST(BuildTopology, RingWithMoreNeighbours) {
  const auto r = build_topology(TopologyKind::Ring, 7, 2);
  EXPECT_EQ(r.matrix()(0, 0), 4.0);
  EXPECT_EQ(r.matrix()(0, 2), -1.0);
  EXPECT_EQ(r.matrix()(0, 5), -1.0);
  EXPECT_EQ(r.matrix()(0, 3), 0.0);
  EXPECT_TRUE(validate_assumption1(r.matrix()).passed());
}

TEST(BuildTopology, InvalidSizes) {
  EXPECT_THROW(build_topology(TopologyKind::Global, 1), InvalidArgument);
  EXPECT_THROW(build_topology(TopologyKind::Ring, 2), InvalidArgument);
  EXPECT_THROW(build_topology(TopologyKind::Ring, 5, 3), InvalidArgument);
  EXPECT_THROW(build_topology(TopologyKind::Ring, 5, 0), InvalidArgument);
}

TEST(BuildTopology, TwoNodeStarEqualsGlobal) {
  EXPECT_EQ(build_topology(TopologyKind::Star, 2).matrix(),
            build_topology(TopologyKind::Global, 2).matrix());
}

TEST(BuildTopology, GeneratedFamiliesPassAssumption1) {
  for (Index n : {2, 3, 4, 10, 33}) {
    for (auto kind : {TopologyKind::Star, TopologyKind::Global}) {
      EXPECT_TRUE(validate_assumption1(build_topology(kind, n).matrix()).passed());
    }
    if (n >= 3) {
      EXPECT_TRUE(
          validate_assumption1(build_topology(TopologyKind::Ring, n).matrix())
              .passed());
    }
  }
}

TEST(BuildTopology, AlgebraicConnectivityOrdering) {
  // The ring drops below the star once 2 - 2 cos(2 pi / N) <= 1, i.e. N >= 6.
  for (Index n = 6; n <= 40; ++n) {
    const double g = build_topology(TopologyKind::Global, n).eigenvalues()[1];
    const double s = build_topology(TopologyKind::Star, n).eigenvalues()[1];
    const double r = build_topology(TopologyKind::Ring, n).eigenvalues()[1];
    EXPECT_GE(g + 1e-12, s);
    EXPECT_GE(s + 1e-12, r);
  }
}

TEST(BuildTopology, EigenvectorsDiagonalise) {
  for (auto kind : {TopologyKind::Ring, TopologyKind::Star, TopologyKind::Global}) {
    const auto c = build_topology(kind, 12);
    const Matrix& u = c.eigenvectors();
    const Matrix delta = c.eigenvalues().asDiagonal();
    EXPECT_LE((u.transpose() * c.matrix() * u - delta).norm(),
              1e-9 * (1.0 + c.matrix().norm()));
  }
}

TEST(CustomTopology, TwoNodes) {
  const std::vector<Edge> edges{{0, 1, 1.0}};
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(custom_topology(edges, 2).matrix(), expected);
}

TEST(CustomTopology, PathSpectrum) {
  // Path Laplacian characteristic polynomial: l (l - 1) (l - 3).
  const std::vector<Edge> edges{{0, 1, 1.0}, {1, 2, 1.0}};
  const auto c = custom_topology(edges, 3);
  EXPECT_LE((c.eigenvalues() - Vector((Vector(3) << 0, 1, 3).finished())).norm(),
            1e-12);
}

TEST(CustomTopology, CliqueEqualsGlobal) {
  const std::vector<Edge> edges{{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}};
  EXPECT_EQ(custom_topology(edges, 3).matrix(),
            build_topology(TopologyKind::Global, 3).matrix());
}

TEST(CustomTopology, Rejections) {
  const std::vector<Edge> dup{{0, 1, 1.0}, {1, 0, 2.0}};
  EXPECT_THROW(custom_topology(dup, 3), InvalidArgument);
  const std::vector<Edge> loop{{1, 1, 1.0}};
  EXPECT_THROW(custom_topology(loop, 3), InvalidArgument);
  const std::vector<Edge> neg{{0, 1, -1.0}};
  EXPECT_THROW(custom_topology(neg, 3), InvalidArgument);
  const std::vector<Edge> range{{0, 3, 1.0}};
  EXPECT_THROW(custom_topology(range, 3), InvalidArgument);
}

TEST(ValidateAssumption1, GlobalFivePasses) {
  const auto r = validate_assumption1(build_topology(TopologyKind::Global, 5).matrix());
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.symmetric && r.nonpositive_off_diagonal && r.zero_row_sums &&
              r.irreducible && r.spectral);
  EXPECT_EQ(r.zero_eigenvalue_multiplicity, 1);
}

TEST(ValidateAssumption1, DisconnectedRings) {
  const Matrix ring = build_topology(TopologyKind::Ring, 4).matrix();
  Matrix m = Matrix::Zero(8, 8);
  m.topLeftCorner(4, 4) = ring;
  m.bottomRightCorner(4, 4) = ring;
  const auto r = validate_assumption1(m);
  EXPECT_FALSE(r.irreducible);
  EXPECT_EQ(r.zero_eigenvalue_multiplicity, 2);
  EXPECT_FALSE(r.spectral);
  EXPECT_FALSE(r.passed());
}

TEST(ValidateAssumption1, PositiveOffDiagonal) {
  Matrix m = build_topology(TopologyKind::Global, 3).matrix();
  m(0, 1) = m(1, 0) = 0.5;
  m.diagonal().setZero();
  m.diagonal() = -m.rowwise().sum();
  const auto r = validate_assumption1(m);
  EXPECT_FALSE(r.nonpositive_off_diagonal);
  EXPECT_FALSE(r.passed());
}

TEST(ValidateAssumption1, RandomLaplaciansPass) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    EXPECT_TRUE(validate_assumption1(oracles::random_laplacian(9, rng)).passed());
  }
}

TEST(OuterCoupling, NonSymmetricAcceptedButModalSpectrumRejected) {
  Matrix m(2, 2);
  m << 1, -1, -2, 2;
  const auto c = OuterCoupling::from_matrix(m);
  EXPECT_FALSE(c.symmetric());
  EXPECT_THROW(c.spectrum(), InvalidArgument);
}

TEST(Csv, MatrixRoundTrip) {
  std::mt19937_64 rng(2);
  const Matrix m = oracles::random_matrix(4, 3, rng);
  EXPECT_EQ(parse_matrix_csv(format_matrix_csv(m)), m);
  EXPECT_THROW(parse_matrix_csv("1,2\n3\n"), InvalidArgument);
  EXPECT_THROW(parse_matrix_csv("1,x\n"), InvalidArgument);
}

}  // namespace
}  // namespace netsync
