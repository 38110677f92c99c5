#pragma once

// LQR synthesis for y = C x + D u with [D D_perp] orthonormal: assumption
// checks, the stabilising Riccati solution and modal gain assembly.

#include <string>
#include <vector>

#include "netsync/matrix.hpp"
#include "netsync/netmodel.hpp"

namespace netsync {

struct LqrProblem {
  Matrix a;
  Matrix b;
  Matrix c;
  Matrix d;
  Matrix d_perp;  // orthonormal basis of range(d)^perp, l x (l - m)
};

/// Fills d_perp from a full QR of d and validates shapes.
LqrProblem make_lqr_problem(Matrix a, Matrix b, Matrix c, Matrix d);

struct AssumptionReport {
  bool stabilizable = false;        // A1
  bool d_orthonormal = false;       // A2
  bool detectable = false;          // A3
  bool no_imaginary_zeros = false;  // A4
  std::vector<std::string> notes;

  bool all() const {
    return stabilizable && d_orthonormal && detectable && no_imaginary_zeros;
  }
  std::string summary() const;
};

AssumptionReport check_assumptions(const LqrProblem& p,
                                   double margin = kStabilityMargin,
                                   double rank_threshold = 1e-8);

struct CareOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;
  bool newton_refinement = true;
  /// Run check_assumptions first and throw AssumptionError on failure.
  bool check = true;
};

struct CareSolution {
  Matrix x;  // stabilising solution, symmetric
  Matrix f;  // gain, u = f x
  double closed_loop_abscissa = 0.0;
  double residual = 0.0;
  double residual_scale = 0.0;
  int iterations = 0;
};

/// Stabilising solution of
///   (A - B D^T C)^T X + X (A - B D^T C) - X B B^T X + C^T D_perp D_perp^T C = 0
/// by the scaled matrix-sign iteration on the Hamiltonian, polished with one
/// Newton-Kleinman step. f = -(B^T X + D^T C).
CareSolution solve_care(const LqrProblem& p, const CareOptions& opts = {});

/// Riccati residual norm and the scale it is measured against.
std::pair<double, double> care_residual(const LqrProblem& p, const Matrix& x);

inline constexpr Index kFullSynthesisMaxStates = 240;

/// Network-level synthesis on (A_c, B_c, C_c, D_c); limited to
/// kFullSynthesisMaxStates states.
CareSolution lqr_gain_full(const LinearizedNetwork& lin,
                           const CareOptions& opts = {});

struct ModalGain {
  Matrix gain;  // (U (x) I_m) blockdiag(F_i) (U^T (x) I_n)
  std::vector<CareSolution> per_mode;
  std::vector<double> lambdas;
  /// max over modes of the closed-loop abscissa of A_i + B F_i; by
  /// similarity this is the abscissa of A_c + B_c F.
  double closed_loop_abscissa = 0.0;
};

/// Decentralised synthesis: one n x n Riccati equation per mode. Throws
/// AssumptionError / UnstableError naming the failing mode.
ModalGain lqr_gain_modal(const std::vector<ModalSystem>& modes,
                         const OuterCoupling& coupling,
                         const CareOptions& opts = {});

/// ||(C_c + D_c F) exp((A_c + B_c F) t) eta0||_2 = sqrt(eta0^T Q eta0),
/// Q the observability Gramian of the closed loop.
double minimized_output_norm(const LinearizedNetwork& lin, const Matrix& f,
                             const Vector& eta0);

/// Same quantity for an explicit closed loop (a_cl, c_cl).
double closed_loop_output_norm(const Matrix& a_cl, const Matrix& c_cl,
                               const Vector& x0);

}  // namespace netsync
