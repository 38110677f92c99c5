#include "netsync/lqr.hpp"

#include <cmath>
#include <limits>
#include <tuple>
#include <sstream>
#include <utility>

#include <Eigen/QR>

#include "netsync/error.hpp"
#include "netsync/norms.hpp"

namespace netsync {

namespace {

Matrix shifted_a(const LqrProblem& p) {
  return p.a - p.b * p.d.transpose() * p.c;
}

Matrix constant_term(const LqrProblem& p) {
  if (p.d_perp.cols() == 0) return Matrix::Zero(p.a.rows(), p.a.rows());
  const Matrix pc = p.d_perp.transpose() * p.c;
  return pc.transpose() * pc;
}

// PBH rank test: rank [a - lambda I, b] (or its dual) equals n at every
// eigenvalue selected by `select`.
template <typename Select>
bool pbh_full_rank(const Matrix& a, const Matrix& other, bool dual,
                   Select select, double rank_threshold,
                   std::vector<std::string>& notes, const char* label) {
  const Index n = a.rows();
  bool ok = true;
  const ComplexMatrix ac = a.cast<std::complex<double>>();
  const ComplexMatrix oc = other.cast<std::complex<double>>();
  for (const auto& lambda : eigenvalues(a)) {
    if (!select(lambda)) continue;
    ComplexMatrix pencil;
    const ComplexMatrix shifted =
        ac - lambda * ComplexMatrix::Identity(n, n);
    if (dual) {
      pencil.resize(n + oc.rows(), n);
      pencil << shifted, oc;
    } else {
      pencil.resize(n, n + oc.cols());
      pencil << shifted, oc;
    }
    const Index rank = numerical_rank(pencil, rank_threshold);
    if (rank < n) {
      ok = false;
      std::ostringstream msg;
      msg << label << ": mode " << lambda.real()
          << (lambda.imag() >= 0 ? "+" : "") << lambda.imag()
          << "j fails the PBH rank test (rank " << rank << " < " << n << ")";
      notes.push_back(msg.str());
    }
  }
  return ok;
}

}  // namespace

std::string AssumptionReport::summary() const {
  std::ostringstream out;
  out << "A1 stabilizable=" << (stabilizable ? "pass" : "FAIL")
      << ", A2 D orthonormal=" << (d_orthonormal ? "pass" : "FAIL")
      << ", A3 detectable=" << (detectable ? "pass" : "FAIL")
      << ", A4 no imaginary-axis zeros="
      << (no_imaginary_zeros ? "pass" : "FAIL");
  for (const auto& n : notes) out << "; " << n;
  return out.str();
}

LqrProblem make_lqr_problem(Matrix a, Matrix b, Matrix c, Matrix d) {
  const Index n = a.rows();
  if (a.cols() != n || n == 0) throw InvalidArgument("LQR: A must be square");
  if (b.rows() != n) throw InvalidArgument("LQR: B must have n rows");
  if (c.cols() != n) throw InvalidArgument("LQR: C must have n columns");
  if (d.rows() != c.rows() || d.cols() != b.cols()) {
    throw InvalidArgument("LQR: D must be l x m");
  }
  LqrProblem p{std::move(a), std::move(b), std::move(c), std::move(d), {}};
  const Index l = p.d.rows();
  const Index m = p.d.cols();
  if (m <= l) {
    Eigen::HouseholderQR<Matrix> qr(p.d);
    const Matrix q = qr.householderQ() * Matrix::Identity(l, l);
    p.d_perp = q.rightCols(l - m);
  } else {
    p.d_perp.resize(l, 0);
  }
  return p;
}

AssumptionReport check_assumptions(const LqrProblem& p, double margin,
                                   double rank_threshold) {
  AssumptionReport r;
  const Index m = p.d.cols();

  r.stabilizable = pbh_full_rank(
      p.a, p.b, false,
      [&](std::complex<double> z) { return z.real() >= -margin; },
      rank_threshold, r.notes, "A1");

  const Index l = p.d.rows();
  if (m > l) {
    r.d_orthonormal = false;
    r.notes.emplace_back("A2: D has more columns than rows");
  } else {
    const double defect =
        (p.d.transpose() * p.d - Matrix::Identity(m, m)).norm();
    const Matrix full = [&] {
      Matrix out(l, l);
      out << p.d, p.d_perp;
      return out;
    }();
    const double basis_defect =
        (full.transpose() * full - Matrix::Identity(l, l)).norm();
    r.d_orthonormal = defect <= 1e-10 && basis_defect <= 1e-10;
    if (!r.d_orthonormal) {
      std::ostringstream msg;
      msg << "A2: ||D^T D - I||_F = " << defect;
      r.notes.push_back(msg.str());
    }
  }

  r.detectable = pbh_full_rank(
      p.a, p.c, true,
      [&](std::complex<double> z) { return z.real() >= -margin; },
      rank_threshold, r.notes, "A3");

  const Matrix a_tilde = shifted_a(p);
  const Matrix c_perp = p.d_perp.transpose() * p.c;
  const double axis_tol = 1e-8 * (1.0 + a_tilde.norm());
  r.no_imaginary_zeros = pbh_full_rank(
      a_tilde, c_perp, true,
      [&](std::complex<double> z) { return std::abs(z.real()) <= axis_tol; },
      rank_threshold, r.notes, "A4");
  return r;
}

std::pair<double, double> care_residual(const LqrProblem& p, const Matrix& x) {
  const Matrix a_t = shifted_a(p);
  const Matrix g = p.b * p.b.transpose();
  const Matrix q = constant_term(p);
  const Matrix xgx = x * g * x;
  const Matrix res = a_t.transpose() * x + x * a_t - xgx + q;
  const double scale = a_t.norm() * x.norm() + xgx.norm() + q.norm();
  return {res.norm(), scale};
}

CareSolution solve_care(const LqrProblem& p, const CareOptions& opts) {
  if (opts.check) {
    const AssumptionReport report = check_assumptions(p);
    if (!report.all()) {
      throw AssumptionError("LQR assumptions fail: " + report.summary());
    }
  }
  const Index n = p.a.rows();
  const Matrix a_t = shifted_a(p);
  const Matrix g = p.b * p.b.transpose();
  const Matrix q = constant_term(p);

  Matrix h(2 * n, 2 * n);
  h << a_t, -g, -q, -a_t.transpose();

  const double axis_tol = 1e-10 * (1.0 + h.norm());
  for (const auto& z : eigenvalues(h)) {
    if (std::abs(z.real()) <= axis_tol) {
      std::ostringstream msg;
      msg << "Hamiltonian has an eigenvalue on the imaginary axis ("
          << z.real() << (z.imag() >= 0 ? "+" : "") << z.imag()
          << "j); recheck assumption A4";
      throw AssumptionError(msg.str());
    }
  }

  // Scaled Newton iteration for sign(H).
  Matrix z = h;
  bool scaling = true;
  int it = 0;
  bool converged = false;
  const double dim = static_cast<double>(2 * n);
  for (; it < opts.max_iterations; ++it) {
    Eigen::PartialPivLU<Matrix> lu(z);
    if (!(lu.rcond() > 1e-14)) {
      throw NumericalError(
          "sign iteration: iterate became singular; recheck assumption A4");
    }
    double c = 1.0;
    if (scaling) {
      double log_det = 0.0;
      const Matrix& lu_m = lu.matrixLU();
      for (Index k = 0; k < lu_m.rows(); ++k) {
        log_det += std::log(std::abs(lu_m(k, k)));
      }
      c = std::exp(log_det / dim);
    }
    Matrix next = 0.5 * (z / c + c * lu.inverse());
    const double change = (next - z).lpNorm<1>();
    const double size = next.lpNorm<1>();
    z = std::move(next);
    if (change <= 1e-2 * size) scaling = false;
    if (change <= opts.tolerance * size) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("sign iteration stagnated after " +
                         std::to_string(opts.max_iterations) +
                         " iterations; recheck assumptions A1-A4");
  }

  // Stable invariant subspace: (W + I) [I; X] = 0.
  Matrix lhs(2 * n, n);
  lhs << z.topRightCorner(n, n),
      z.bottomRightCorner(n, n) + Matrix::Identity(n, n);
  Matrix rhs(2 * n, n);
  rhs << z.topLeftCorner(n, n) + Matrix::Identity(n, n),
      z.bottomLeftCorner(n, n);
  Matrix x = lhs.colPivHouseholderQr().solve(-rhs);
  x = (0.5 * (x + x.transpose())).eval();

  if (opts.newton_refinement) {
    const Matrix a_k = a_t - g * x;
    if (is_stable(a_k)) {
      Matrix q_k = q + x * g * x;
      q_k = (0.5 * (q_k + q_k.transpose())).eval();
      Matrix refined = solve_lyapunov(a_k, q_k);
      refined = (0.5 * (refined + refined.transpose())).eval();
      if (care_residual(p, refined).first <= care_residual(p, x).first) {
        x = std::move(refined);
      }
    }
  }

  CareSolution sol;
  sol.x = std::move(x);
  sol.f = -(p.b.transpose() * sol.x + p.d.transpose() * p.c);
  sol.closed_loop_abscissa = spectral_abscissa(p.a + p.b * sol.f);
  std::tie(sol.residual, sol.residual_scale) = care_residual(p, sol.x);
  sol.iterations = it;
  if (!(sol.closed_loop_abscissa < -kStabilityMargin)) {
    std::ostringstream msg;
    msg << "Riccati solution is not stabilising (closed-loop abscissa "
        << sol.closed_loop_abscissa << ")";
    throw UnstableError(msg.str(), -1, 0.0, sol.closed_loop_abscissa);
  }
  if (!(sol.residual <= 1e-8 * sol.residual_scale + 1e-12)) {
    std::ostringstream msg;
    msg << "Riccati residual " << sol.residual << " exceeds 1e-8 * "
        << sol.residual_scale;
    throw NumericalError(msg.str());
  }
  return sol;
}

CareSolution lqr_gain_full(const LinearizedNetwork& lin,
                           const CareOptions& opts) {
  if (lin.state_dim() > kFullSynthesisMaxStates) {
    throw InvalidArgument("full LQR synthesis is limited to " +
                          std::to_string(kFullSynthesisMaxStates) +
                          " states; use the modal path");
  }
  return solve_care(make_lqr_problem(lin.a_c, lin.b_c, lin.c_c, lin.d_c),
                    opts);
}

ModalGain lqr_gain_modal(const std::vector<ModalSystem>& modes,
                         const OuterCoupling& coupling,
                         const CareOptions& opts) {
  if (modes.empty()) throw InvalidArgument("lqr_gain_modal: no modes");
  if (static_cast<Index>(modes.size()) != coupling.size()) {
    throw InvalidArgument("lqr_gain_modal: mode count does not match N");
  }
  ModalGain out;
  std::vector<Matrix> blocks;
  out.closed_loop_abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& mode : modes) {
    const LqrProblem p = make_lqr_problem(mode.a, mode.b, mode.c, mode.d);
    if (opts.check) {
      const AssumptionReport report = check_assumptions(p);
      if (!report.all()) {
        std::ostringstream msg;
        msg << "mode " << mode.index << " (lambda = " << mode.lambda
            << "): " << report.summary();
        throw AssumptionError(msg.str());
      }
    }
    CareOptions inner = opts;
    inner.check = false;
    CareSolution sol;
    try {
      sol = solve_care(p, inner);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "mode " << mode.index << " (lambda = " << mode.lambda
          << "): " << e.what();
      throw NumericalError(msg.str());
    }
    out.closed_loop_abscissa =
        std::max(out.closed_loop_abscissa, sol.closed_loop_abscissa);
    blocks.push_back(sol.f);
    out.lambdas.push_back(mode.lambda);
    out.per_mode.push_back(std::move(sol));
  }
  const Index n = modes.front().a.rows();
  const Index m = modes.front().b.cols();
  const Matrix& u = coupling.eigenvectors();
  out.gain = kron(u, identity(m)) * block_diagonal(blocks) *
             kron(u.transpose(), identity(n));
  return out;
}

double closed_loop_output_norm(const Matrix& a_cl, const Matrix& c_cl,
                               const Vector& x0) {
  if (x0.size() != a_cl.rows()) {
    throw InvalidArgument("initial state has wrong dimension");
  }
  if (x0.squaredNorm() == 0.0) return 0.0;
  const Matrix q = solve_lyapunov(a_cl, c_cl.transpose() * c_cl);
  return std::sqrt(std::max(0.0, x0.dot(q * x0)));
}

double minimized_output_norm(const LinearizedNetwork& lin, const Matrix& f,
                             const Vector& eta0) {
  if (f.rows() != lin.b_c.cols() || f.cols() != lin.state_dim()) {
    throw InvalidArgument("minimized_output_norm: gain has wrong shape");
  }
  return closed_loop_output_norm(lin.a_c + lin.b_c * f, lin.c_c + lin.d_c * f,
                                 eta0);
}

}  // namespace netsync
