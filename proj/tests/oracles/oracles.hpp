#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace netsync::oracles {

// (1/2pi) * integral of trace(G(jw)^H G(jw)) over the real line, with
// w = tan(theta) and composite Simpson on (-pi/2, pi/2). The transformed
// integrand tends to ||C B||_F^2 at both ends.
inline double h2_squared_frequency(const Eigen::MatrixXd& a,
                                   const Eigen::MatrixXd& b,
                                   const Eigen::MatrixXd& c,
                                   int panels = 20000) {
  using cd = std::complex<double>;
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXcd ac = a.cast<cd>();
  const Eigen::MatrixXcd bc = b.cast<cd>();
  const Eigen::MatrixXcd cc = c.cast<cd>();
  auto integrand = [&](double theta) {
    const double w = std::tan(theta);
    const double jac = 1.0 + w * w;
    const Eigen::MatrixXcd m =
        cd(0.0, w) * Eigen::MatrixXcd::Identity(n, n) - ac;
    const Eigen::MatrixXcd g = cc * m.partialPivLu().solve(bc);
    return g.squaredNorm() * jac;
  };
  const double lo = -std::numbers::pi / 2;
  const double hi = std::numbers::pi / 2;
  const double h = (hi - lo) / panels;
  // Limit of the integrand at +/- pi/2: ||C B||_F^2 (G ~ C B / (j w)).
  const double edge = (c * b).squaredNorm();
  double acc = edge + edge;
  for (int k = 1; k < panels; ++k) {
    acc += (k % 2 ? 4.0 : 2.0) * integrand(lo + k * h);
  }
  return acc * h / 3.0 / (2.0 * std::numbers::pi);
}

// Stable random matrix: Gaussian entries shifted left past the abscissa.
inline Eigen::MatrixXd random_stable(Eigen::Index n, std::mt19937_64& rng,
                                     double margin = 0.5) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = g(rng);
  const auto ev = a.eigenvalues();
  double abscissa = ev.real().maxCoeff();
  a -= (abscissa + margin) * Eigen::MatrixXd::Identity(n, n);
  return a;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c,
                                     std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = g(rng);
  return a;
}

// Random Laplacian of a connected weighted graph (spanning path plus extra
// random edges).
inline Eigen::MatrixXd random_laplacian(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.2, 2.0);
  std::bernoulli_distribution extra(0.3);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = -w(rng);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 2; j < n; ++j)
      if (extra(rng)) m(i, j) = m(j, i) = -w(rng);
  m.diagonal() = -m.rowwise().sum();
  return m;
}

}  // namespace netsync::oracles
