#pragma once

// Node vector fields: Chua's circuit, a saturated Lur'e system, linear and
// user-supplied models.

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "netsync/matrix.hpp"

namespace netsync {

/// Dimensionless Chua oscillator; defaults generate the double scroll.
struct ChuaParams {
  double alpha = 9.0;
  double beta = 14.0;
  double gamma = 0.01;
  double m1 = -0.714;
  double m2 = -1.14;
};

/// x' = (A1 - 2 B1 C1) x + B1 f1(C1 x), f1(y) = |y + 1| - |y - 1|,
/// with A1 = [[0, 1], [-a, -b]], B1 = [b1; b2], C1 = [c1, c2].
struct LureParams {
  double a = 10.0;
  double b = 3.0;
  double b1 = 0.0;
  double b2 = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;

  Matrix a1() const;
  Matrix b1_vec() const;  // 2 x 1
  Matrix c1_row() const;  // 1 x 2
};

/// Equilibrium point of a single node.
struct Equilibrium {
  Vector state;
};

/// Chua nonlinearity: slope m2 on |x| <= 1, m1 outside.
double chua_nonlinearity(double x1, const ChuaParams& p);
/// f1(y) = |y + 1| - |y - 1|.
double lure_saturation(double y);

Eigen::Vector3d chua_field(const Eigen::Vector3d& x, const ChuaParams& p);
Eigen::Vector2d lure_field(const Eigen::Vector2d& x, const LureParams& p);

/// A node model: vector field, dimension and (for the built-ins) analytic
/// Jacobians.
class NodeModel {
 public:
  using Field = std::function<void(const Eigen::Ref<const Vector>& x,
                                   Eigen::Ref<Vector> dx)>;
  enum class Kind { Chua, Lure, Linear, Generic };

  static NodeModel chua(const ChuaParams& p = {});
  static NodeModel lure(const LureParams& p = {});
  static NodeModel linear(Matrix a);
  static NodeModel generic(Index dimension, Field field,
                           std::string name = "generic");

  Kind kind() const { return kind_; }
  Index dimension() const { return dimension_; }
  const std::string& name() const { return name_; }

  /// dx = f(x); x and dx have dimension() entries and must not alias.
  void eval(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> dx) const;
  Vector operator()(const Vector& x) const;

  /// Measured output row C1 (Lur'e only).
  std::optional<Matrix> output_map() const;

  const ChuaParams* chua_params() const {
    return std::get_if<ChuaParams>(&params_);
  }
  const LureParams* lure_params() const {
    return std::get_if<LureParams>(&params_);
  }
  const Matrix* linear_matrix() const { return std::get_if<Matrix>(&params_); }

 private:
  NodeModel() = default;

  Kind kind_ = Kind::Generic;
  Index dimension_ = 0;
  std::string name_;
  std::variant<std::monostate, ChuaParams, LureParams, Matrix> params_;
  Field field_;
};

inline constexpr double kKinkMargin = 1e-9;

/// Jacobian of the model at s. Analytic for Chua, Lur'e and linear models;
/// central differences with step 1e-6 * (1 + |s_j|) for generic models.
/// Throws InvalidArgument when s lies within kink_margin of a kink of a
/// piecewise-linear model.
Matrix jacobian_at(const NodeModel& model, const Equilibrium& s,
                   double kink_margin = kKinkMargin);

Matrix finite_difference_jacobian(const NodeModel& model, const Vector& s);

/// True iff ||f(s)||_2 <= tol.
bool verify_equilibrium(const NodeModel& model, const Vector& s,
                        double tol = 1e-9);

}  // namespace netsync
