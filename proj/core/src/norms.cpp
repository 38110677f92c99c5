#include "netsync/norms.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "netsync/error.hpp"

namespace netsync {

namespace {

void require_stable(const Matrix& a, const char* what) {
  const double abscissa = spectral_abscissa(a);
  if (!(abscissa < -kStabilityMargin)) {
    std::ostringstream msg;
    msg << what << ": matrix is not Hurwitz (spectral abscissa " << abscissa
        << ")";
    throw UnstableError(msg.str(), -1, 0.0, abscissa);
  }
}

Matrix lyapunov_schur(const Matrix& a, const Matrix& q) {
  const Index n = a.rows();
  Eigen::ComplexSchur<Matrix> schur(a);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("solve_lyapunov: complex Schur did not converge");
  }
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& u = schur.matrixU();
  // With a = U T U^H: T^H Z + Z T + U^H q U = 0, Z = U^H Y U.
  const ComplexMatrix qh = u.adjoint() * q.cast<std::complex<double>>() * u;
  const ComplexMatrix th = t.adjoint();
  ComplexMatrix z = ComplexMatrix::Zero(n, n);
  ComplexMatrix lhs(n, n);
  for (Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = -qh.col(j);
    if (j > 0) rhs.noalias() -= z.leftCols(j) * t.col(j).head(j);
    lhs = th;
    lhs.diagonal().array() += t(j, j);
    z.col(j) = lhs.triangularView<Eigen::Lower>().solve(rhs);
  }
  const Matrix y = (u * z * u.adjoint()).real();
  return 0.5 * (y + y.transpose());
}

Matrix lyapunov_kronecker(const Matrix& a, const Matrix& q) {
  const Index n = a.rows();
  if (n > kKroneckerLyapunovMaxSize) {
    throw InvalidArgument("Kronecker Lyapunov solver is limited to n <= " +
                          std::to_string(kKroneckerLyapunovMaxSize) +
                          "; use the Schur method or the modal path");
  }
  const Matrix eye = identity(n);
  // vec(Y a) = (a^T (x) I) vec(Y), vec(a^T Y) = (I (x) a^T) vec(Y).
  const Matrix op = kron(a.transpose(), eye) + kron(eye, a.transpose());
  const Vector rhs = -Eigen::Map<const Vector>(q.data(), n * n);
  const Vector vec_y = solve_linear(op, rhs);
  const Matrix y = Eigen::Map<const Matrix>(vec_y.data(), n, n);
  return 0.5 * (y + y.transpose());
}

// Polynomial coefficients of the closed form; see lure_h2_closed_form.
struct ClosedFormTerms {
  double numerator;
  double denominator;
};

ClosedFormTerms closed_form_terms(const LureParams& p, double s) {
  const double a = p.a;
  const double b = p.b;
  const double c1 = p.c1;
  const double c2 = p.c2;
  const double cc = c1 * c1 + c2 * c2;
  const double num = 2.0 * cc * s * s +
                     ((3.0 * c1 * c1 + c2 * c2) * b + 2.0 * c1 * c2 * (1.0 - a)) * s +
                     (c1 * b - c2 * a) * (c1 * b - c2 * a) + cc * a + c1 * c1;
  const double den = 4.0 * s * s * s + 6.0 * b * s * s +
                     (4.0 * a + 2.0 * b * b) * s + 2.0 * a * b;
  return {num, den};
}

}  // namespace

double lyapunov_residual(const Matrix& a, const Matrix& q, const Matrix& y) {
  return (y * a + a.transpose() * y + q).norm();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q, LyapunovMethod method) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidArgument("solve_lyapunov: a must be square and non-empty");
  }
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw InvalidArgument("solve_lyapunov: q must match a");
  }
  if (!is_symmetric(q, 1e-10)) {
    throw InvalidArgument("solve_lyapunov: q must be symmetric");
  }
  require_stable(a, "solve_lyapunov");

  const Matrix y = method == LyapunovMethod::Schur ? lyapunov_schur(a, q)
                                                   : lyapunov_kronecker(a, q);
  const double residual = lyapunov_residual(a, q, y);
  const double bound = 1e-8 * (1.0 + q.norm() + y.norm() * a.norm());
  if (!(residual <= bound)) {
    std::ostringstream msg;
    msg << "solve_lyapunov: residual " << residual << " exceeds " << bound;
    throw NumericalError(msg.str());
  }
  return y;
}

H2Result h2_norm(const Matrix& a, const Matrix& b, const Matrix& c,
                 LyapunovMethod method) {
  if (b.rows() != a.rows() || c.cols() != a.cols()) {
    throw InvalidArgument("h2_norm: incompatible (a, b, c) dimensions");
  }
  const Matrix y = solve_lyapunov(a, c.transpose() * c, method);
  const double squared = std::max(0.0, (b.transpose() * y * b).trace());
  return H2Result{std::sqrt(squared), squared, std::nullopt};
}

H2Result h2_modal(const std::vector<ModalSystem>& modes, double margin) {
  std::vector<double> per_mode;
  per_mode.reserve(modes.size());
  double total = 0.0;
  for (const auto& m : modes) {
    const double abscissa = spectral_abscissa(m.a);
    if (!(abscissa < -margin)) {
      std::ostringstream msg;
      msg << "mode " << m.index << " (lambda = " << m.lambda
          << ") is not stable: spectral abscissa " << abscissa;
      throw UnstableError(msg.str(), m.index, m.lambda, abscissa);
    }
    const double sq = h2_norm(m.a, m.b, m.c).squared;
    per_mode.push_back(sq);
    total += sq;
  }
  return H2Result{std::sqrt(total), total, std::move(per_mode)};
}

double lure_h2_closed_form(const LureParams& p, double sigma, double lambda) {
  const auto terms = closed_form_terms(p, sigma * lambda);
  if (!(terms.denominator > 0.0)) {
    std::ostringstream msg;
    msg << "closed-form H2 undefined: denominator " << terms.denominator
        << " <= 0 for sigma*lambda = " << sigma * lambda;
    throw InvalidArgument(msg.str());
  }
  return terms.numerator / terms.denominator;
}

double lure_global_h2_limit(const LureParams& p, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  const double t1 = lure_h2_closed_form(p, sigma, 0.0);
  return std::sqrt(t1 + (p.c1 * p.c1 + p.c2 * p.c2) / (2.0 * sigma));
}

double lemma3_bound(double g_norm, const Vector& eta0) {
  if (g_norm < 0.0) throw InvalidArgument("H2 norm must be non-negative");
  return g_norm * eta0.norm();
}

Theorem1Report theorem1_report(const std::vector<ModalSystem>& modes,
                               double rel_tol) {
  Theorem1Report r;
  if (modes.size() < 2) {
    r.reason = "needs at least two modes";
    return r;
  }
  const Matrix& gamma = modes.front().gamma;
  const double k = gamma.rows() > 0 ? gamma(0, 0) : 0.0;
  const Matrix kI = k * identity(gamma.rows());
  if (!(k > 0.0) || (gamma - kI).norm() > 1e-12 * std::max(1.0, k)) {
    r.reason = "inner linking matrix is not k*I with k > 0";
    return r;
  }
  const double scale = 1.0 + std::abs(modes.back().lambda);
  if (std::abs(modes.front().lambda) > 1e-8 * scale ||
      !(modes[1].lambda > 1e-8 * scale)) {
    r.reason = "coupling spectrum is not 0 = lambda_1 < lambda_2";
    return r;
  }
  for (const auto& m : modes) {
    if (!is_stable(m.a)) {
      r.reason = "mode " + std::to_string(m.index) + " is not stable";
      return r;
    }
  }
  r.applicable = true;

  for (const auto& m : modes) {
    r.lambdas.push_back(m.lambda);
    r.per_mode.push_back(h2_norm(m.a, m.b, m.c).squared);
  }
  const std::size_t n = r.per_mode.size();
  for (double v : r.per_mode) r.total += v;
  const double tol = rel_tol * std::max(r.total, 1e-300);

  // Nonincreasing: for j < i, T_j - T_i >= 0. Checking adjacent pairs and
  // tracking the running minimum covers every pair.
  r.worst_monotonicity_margin = std::numeric_limits<double>::infinity();
  double running_min = r.per_mode[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double margin = running_min - r.per_mode[i];
    r.worst_monotonicity_margin = std::min(r.worst_monotonicity_margin, margin);
    if (margin < -tol) ++r.monotonicity_violations;
    running_min = std::min(running_min, r.per_mode[i]);
  }

  const double nn = static_cast<double>(n);
  const double t1 = r.per_mode.front();
  const double t2 = r.per_mode[1];
  const double tn = r.per_mode.back();
  r.lower_chain_margin_1 = r.total - (t1 + (nn - 1.0) * tn);
  r.lower_chain_margin_2 = (t1 + (nn - 1.0) * tn) - nn * tn;
  r.upper_chain_margin_1 = (t1 + (nn - 1.0) * t2) - r.total;
  r.upper_chain_margin_2 = nn * t1 - (t1 + (nn - 1.0) * t2);
  r.lower_chain_holds =
      r.lower_chain_margin_1 >= -tol && r.lower_chain_margin_2 >= -tol;
  r.upper_chain_holds =
      r.upper_chain_margin_1 >= -tol && r.upper_chain_margin_2 >= -tol;
  return r;
}

}  // namespace netsync
