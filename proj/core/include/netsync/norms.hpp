#pragma once

// H2 norms of stable LTI systems via Lyapunov equations, modal summation,
// the Lur'e closed form and the topology monotonicity checks built on them.

#include <optional>
#include <string>
#include <vector>

#include "netsync/dynamics.hpp"
#include "netsync/matrix.hpp"
#include "netsync/netmodel.hpp"

namespace netsync {

enum class LyapunovMethod {
  /// Complex Schur form followed by a triangular Sylvester sweep.
  Schur,
  /// (I (x) a^T + a^T (x) I) vec(Y) = -vec(q); limited to n <= 80.
  Kronecker,
};

inline constexpr Index kKroneckerLyapunovMaxSize = 80;

/// Solves Y a + a^T Y + q = 0 for symmetric Y.
///
/// Requires a Hurwitz (UnstableError otherwise) and q symmetric. The result
/// satisfies ||Y a + a^T Y + q||_F <= 1e-8 (1 + ||q||_F + ||Y||_F ||a||_F).
Matrix solve_lyapunov(const Matrix& a, const Matrix& q,
                      LyapunovMethod method = LyapunovMethod::Schur);

double lyapunov_residual(const Matrix& a, const Matrix& q, const Matrix& y);

struct H2Result {
  double value = 0.0;
  double squared = 0.0;
  /// ||T_i||_2^2 per mode, in mode order (modal computations only).
  std::optional<std::vector<double>> per_mode;
};

/// ||C (sI - A)^{-1} B||_2 from trace(B^T Y B), Y a + a^T Y + c^T c = 0.
H2Result h2_norm(const Matrix& a, const Matrix& b, const Matrix& c,
                 LyapunovMethod method = LyapunovMethod::Schur);

/// Sum of per-mode squared norms. Throws UnstableError naming the first
/// unstable mode.
H2Result h2_modal(const std::vector<ModalSystem>& modes,
                  double margin = kStabilityMargin);

/// Closed-form ||T_i||_2^2 of the Lur'e modal system
/// (A1 - sigma*lambda*I, I_2, C1) by direct polynomial evaluation.
double lure_h2_closed_form(const LureParams& p, double sigma, double lambda);

/// Limit of ||G||_2 for global coupling as N grows:
/// sqrt(||T_1||^2 + (c1^2 + c2^2) / (2 sigma)).
double lure_global_h2_limit(const LureParams& p, double sigma);

/// ||G||_2 * ||eta0||_2, an upper bound for the impulse-response L2 error.
double lemma3_bound(double g_norm, const Vector& eta0);

struct Theorem1Report {
  bool applicable = false;
  std::string reason;
  std::vector<double> lambdas;
  std::vector<double> per_mode;  // ||T_i||_2^2
  double total = 0.0;            // ||T||_2^2
  Index monotonicity_violations = 0;
  double worst_monotonicity_margin = 0.0;  // min over j<i of T_j - T_i
  /// total - (T_1 + (N-1) T_N) and (T_1 + (N-1) T_N) - N T_N
  double lower_chain_margin_1 = 0.0;
  double lower_chain_margin_2 = 0.0;
  /// (T_1 + (N-1) T_2) - total and N T_1 - (T_1 + (N-1) T_2)
  double upper_chain_margin_1 = 0.0;
  double upper_chain_margin_2 = 0.0;
  bool lower_chain_holds = false;
  bool upper_chain_holds = false;

  bool holds() const {
    return applicable && monotonicity_violations == 0 && lower_chain_holds &&
           upper_chain_holds;
  }
};

/// Checks that ||T_i||^2 is nonincreasing in lambda_i and the two sandwich
/// chains on the total. Marked inapplicable unless Gamma = k I with k > 0,
/// lambda_1 = 0 < lambda_2 and every mode is stable. `rel_tol` absorbs
/// rounding in ties.
Theorem1Report theorem1_report(const std::vector<ModalSystem>& modes,
                               double rel_tol = 1e-10);

}  // namespace netsync
