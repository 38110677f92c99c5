#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "netsync/error.hpp"
#include "netsync/matrix.hpp"
#include "netsync/topology.hpp"
#include "oracles.hpp"

namespace netsync {
namespace {

TEST(Kron, IdentityCases) {
  Matrix five(1, 1);
  five << 5;
  EXPECT_TRUE(kron(identity(2), five).isApprox(Vector::Constant(2, 5.0).asDiagonal().toDenseMatrix()));

  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  EXPECT_EQ(kron(a, identity(1)), a);
}

TEST(Kron, BlockLayout) {
  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  Matrix b(2, 1);
  b << 7, 8;
  const Matrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 4);
  ASSERT_EQ(k.cols(), 3);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j)
      EXPECT_EQ(k.block(2 * i, j, 2, 1), a(i, j) * b);
}

TEST(Kron, MixedProductAndBilinearity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracles::random_matrix(2, 2, rng);
    const Matrix b = oracles::random_matrix(2, 2, rng);
    const Matrix c = oracles::random_matrix(2, 2, rng);
    const Matrix d = oracles::random_matrix(2, 2, rng);
    // Direct multiplication oracle.
    EXPECT_LE((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm(), 1e-12);
    EXPECT_LE((kron(a + c, b) - kron(a, b) - kron(c, b)).norm(), 1e-12);
    EXPECT_LE((kron(2.5 * a, b) - 2.5 * kron(a, b)).norm(), 1e-12);
  }
}

TEST(SymEig, FamilySpectra) {
  const auto global = sym_eig(build_topology(TopologyKind::Global, 4).matrix());
  const auto star = sym_eig(build_topology(TopologyKind::Star, 4).matrix());
  Vector g(4), s(4);
  g << 0, 4, 4, 4;
  s << 0, 1, 1, 4;
  EXPECT_LE((global.eigenvalues - g).norm(), 1e-12);
  EXPECT_LE((star.eigenvalues - s).norm(), 1e-12);
}

TEST(SymEig, DiagonalGivesPermutation) {
  Matrix d = Vector((Vector(3) << 3, 1, 2).finished()).asDiagonal();
  const auto eig = sym_eig(d);
  EXPECT_LE((eig.eigenvalues - Vector((Vector(3) << 1, 2, 3).finished())).norm(),
            1e-15);
  Matrix p(3, 3);
  p << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  EXPECT_EQ(eig.eigenvectors, p);
}

TEST(SymEig, RejectsNonSymmetric) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  EXPECT_THROW(sym_eig(a), InvalidArgument);
  try {
    sym_eig(a);
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("not symmetric"), std::string::npos);
  }
}

void expect_valid_decomposition(const Matrix& s, const SymEig& e) {
  const Index n = s.rows();
  EXPECT_LE((e.eigenvectors.transpose() * e.eigenvectors - identity(n)).norm(),
            1e-10);
  EXPECT_LE((e.eigenvectors * e.eigenvalues.asDiagonal() *
                 e.eigenvectors.transpose() -
             s)
                .norm(),
            1e-9 * (1.0 + s.norm()));
  for (Index k = 1; k < n; ++k) {
    EXPECT_LE(e.eigenvalues[k - 1], e.eigenvalues[k]);
  }
  for (Index j = 0; j < n; ++j) {
    EXPECT_LE((s * e.eigenvectors.col(j) -
               e.eigenvalues[j] * e.eigenvectors.col(j))
                  .norm(),
              1e-9 * (1.0 + s.norm()));
  }
}

TEST(SymEig, RandomSymmetricProperties) {
  std::mt19937_64 rng(11);
  for (Index n : {1, 2, 5, 17, 40}) {
    const Matrix r = oracles::random_matrix(n, n, rng);
    const Matrix s = r + r.transpose();
    const auto e = sym_eig(s);
    expect_valid_decomposition(s, e);

    // Spectrum invariant under symmetric permutation.
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + n, rng);
    const Matrix ps = perm * s * perm.transpose();
    EXPECT_LE((sym_eig(ps).eigenvalues - e.eigenvalues).norm(),
              1e-10 * (1.0 + s.norm()));
  }
}

TEST(SymEig, LargeSizeRouteMatchesJacobi) {
  std::mt19937_64 rng(5);
  const Matrix big = oracles::random_laplacian(300, rng);
  const auto e = sym_eig(big);
  expect_valid_decomposition(big, e);

  // Jacobi applied directly to the same matrix (raw, then sorted).
  const auto raw = sym_eig_jacobi(big);
  Vector sorted = raw.eigenvalues;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  EXPECT_LE((sorted - e.eigenvalues).norm(), 1e-9 * big.norm());
}

TEST(SymEig, SignConventionFirstComponentPositive) {
  const auto e = sym_eig(build_topology(TopologyKind::Ring, 7).matrix());
  for (Index j = 0; j < e.eigenvectors.cols(); ++j) {
    const auto col = e.eigenvectors.col(j);
    for (Index k = 0; k < col.size(); ++k) {
      if (std::abs(col[k]) > 1e-10) {
        EXPECT_GT(col[k], 0.0);
        break;
      }
    }
  }
}

TEST(SpectralAbscissa, Examples) {
  Matrix d(2, 2);
  d << -1, 0, 0, -2;
  EXPECT_NEAR(spectral_abscissa(d), -1.0, 1e-14);

  Matrix lure(2, 2);
  lure << 0, 1, -10, -3;
  // s^2 + 3 s + 10: roots -1.5 +/- j sqrt(31)/2.
  EXPECT_NEAR(spectral_abscissa(lure), -1.5, 1e-12);
  EXPECT_TRUE(is_stable(lure));

  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  EXPECT_NEAR(spectral_abscissa(rot), 0.0, 1e-14);
  EXPECT_FALSE(is_stable(rot));
}

TEST(SpectralAbscissa, ShiftInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix a = oracles::random_matrix(6, 6, rng);
    const double c = shift(rng);
    EXPECT_NEAR(spectral_abscissa(a + c * identity(6)),
                spectral_abscissa(a) + c, 1e-8);
  }
}

TEST(SolveLinear, Examples) {
  std::mt19937_64 rng(1);
  const Matrix b = oracles::random_matrix(3, 2, rng);
  EXPECT_LE((solve_linear(identity(3), b) - b).norm(), 1e-15);

  Matrix d(2, 2);
  d << 2, 0, 0, 4;
  Matrix rhs(2, 1);
  rhs << 2, 8;
  EXPECT_LE((solve_linear(d, rhs) - Vector((Vector(2) << 1, 2).finished())).norm(),
            1e-15);
}

TEST(SolveLinear, ResidualBound) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a =
        oracles::random_matrix(10, 10, rng) + 10.0 * identity(10);
    const Matrix b = oracles::random_matrix(10, 3, rng);
    const Matrix x = solve_linear(a, b);
    EXPECT_LE((a * x - b).norm(), 1e-9 * (a.norm() * x.norm() + b.norm()));
  }
}

TEST(SolveLinear, SingularCarriesConditionIndicator) {
  Matrix a(2, 2);
  a << 1, 2, 2, 4;
  try {
    solve_linear(a, identity(2));
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_LT(e.rcond(), 1e-14);
  }
  EXPECT_THROW(solve_linear(identity(2), identity(3)), InvalidArgument);
}

TEST(NumericalRank, Basic) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 3);
  EXPECT_EQ(numerical_rank(m), 0);
  m(0, 0) = 1.0;
  EXPECT_EQ(numerical_rank(m), 1);
  m(1, 2) = std::complex<double>(0, 2);
  EXPECT_EQ(numerical_rank(m), 2);
}

}  // namespace
}  // namespace netsync
