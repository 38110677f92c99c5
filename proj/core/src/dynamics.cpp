#include "netsync/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "netsync/error.hpp"

namespace netsync {

Matrix LureParams::a1() const {
  Matrix m(2, 2);
  m << 0.0, 1.0, -a, -b;
  return m;
}

Matrix LureParams::b1_vec() const {
  Matrix m(2, 1);
  m << b1, b2;
  return m;
}

Matrix LureParams::c1_row() const {
  Matrix m(1, 2);
  m << c1, c2;
  return m;
}

double chua_nonlinearity(double x1, const ChuaParams& p) {
  // Branch form of m1 x + (m2 - m1)(|x + 1| - |x - 1|) / 2.
  if (x1 > 1.0) return p.m1 * x1 + (p.m2 - p.m1);
  if (x1 < -1.0) return p.m1 * x1 - (p.m2 - p.m1);
  return p.m2 * x1;
}

double lure_saturation(double y) {
  if (y >= 1.0) return 2.0;
  if (y <= -1.0) return -2.0;
  return 2.0 * y;
}

Eigen::Vector3d chua_field(const Eigen::Vector3d& x, const ChuaParams& p) {
  return {p.alpha * (-x[0] + x[1] - chua_nonlinearity(x[0], p)),
          x[0] - x[1] + x[2], -p.beta * x[1] - p.gamma * x[2]};
}

Eigen::Vector2d lure_field(const Eigen::Vector2d& x, const LureParams& p) {
  const double y = p.c1 * x[0] + p.c2 * x[1];
  const double f = lure_saturation(y);
  // A1 - 2 B1 C1, applied row by row.
  const double r0 = x[1] - 2.0 * p.b1 * y;
  const double r1 = -p.a * x[0] - p.b * x[1] - 2.0 * p.b2 * y;
  return {r0 + p.b1 * f, r1 + p.b2 * f};
}

NodeModel NodeModel::chua(const ChuaParams& p) {
  NodeModel m;
  m.kind_ = Kind::Chua;
  m.dimension_ = 3;
  m.name_ = "chua";
  m.params_ = p;
  return m;
}

NodeModel NodeModel::lure(const LureParams& p) {
  NodeModel m;
  m.kind_ = Kind::Lure;
  m.dimension_ = 2;
  m.name_ = "lure";
  m.params_ = p;
  return m;
}

NodeModel NodeModel::linear(Matrix a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidArgument("linear model needs a non-empty square matrix");
  }
  NodeModel m;
  m.kind_ = Kind::Linear;
  m.dimension_ = a.rows();
  m.name_ = "linear";
  m.params_ = std::move(a);
  return m;
}

NodeModel NodeModel::generic(Index dimension, Field field, std::string name) {
  if (dimension <= 0 || !field) {
    throw InvalidArgument("generic model needs a dimension and a field");
  }
  NodeModel m;
  m.kind_ = Kind::Generic;
  m.dimension_ = dimension;
  m.name_ = std::move(name);
  m.field_ = std::move(field);
  return m;
}

void NodeModel::eval(const Eigen::Ref<const Vector>& x,
                     Eigen::Ref<Vector> dx) const {
  switch (kind_) {
    case Kind::Chua: {
      const auto& p = std::get<ChuaParams>(params_);
      dx[0] = p.alpha * (-x[0] + x[1] - chua_nonlinearity(x[0], p));
      dx[1] = x[0] - x[1] + x[2];
      dx[2] = -p.beta * x[1] - p.gamma * x[2];
      return;
    }
    case Kind::Lure: {
      const auto v = lure_field(Eigen::Vector2d(x[0], x[1]),
                                std::get<LureParams>(params_));
      dx[0] = v[0];
      dx[1] = v[1];
      return;
    }
    case Kind::Linear:
      dx.noalias() = std::get<Matrix>(params_) * x;
      return;
    case Kind::Generic:
      field_(x, dx);
      return;
  }
}

Vector NodeModel::operator()(const Vector& x) const {
  if (x.size() != dimension_) {
    throw InvalidArgument("state has " + std::to_string(x.size()) +
                          " entries, model '" + name_ + "' expects " +
                          std::to_string(dimension_));
  }
  Vector dx(dimension_);
  eval(x, dx);
  return dx;
}

std::optional<Matrix> NodeModel::output_map() const {
  if (const auto* p = lure_params()) return p->c1_row();
  return std::nullopt;
}

Matrix finite_difference_jacobian(const NodeModel& model, const Vector& s) {
  const Index n = model.dimension();
  Matrix jac(n, n);
  Vector xp = s;
  Vector xm = s;
  for (Index j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(s[j]));
    xp[j] = s[j] + h;
    xm[j] = s[j] - h;
    jac.col(j) = (model(xp) - model(xm)) / (2.0 * h);
    xp[j] = xm[j] = s[j];
  }
  return jac;
}

Matrix jacobian_at(const NodeModel& model, const Equilibrium& s,
                   double kink_margin) {
  if (s.state.size() != model.dimension()) {
    throw InvalidArgument("equilibrium has " + std::to_string(s.state.size()) +
                          " entries, model expects " +
                          std::to_string(model.dimension()));
  }
  switch (model.kind()) {
    case NodeModel::Kind::Chua: {
      const auto& p = *model.chua_params();
      const double x1 = s.state[0];
      if (std::abs(std::abs(x1) - 1.0) <= kink_margin) {
        std::ostringstream msg;
        msg << "Chua Jacobian undefined: x1 = " << x1
            << " lies on the kink |x1| = 1";
        throw InvalidArgument(msg.str());
      }
      const double slope = std::abs(x1) < 1.0 ? p.m2 : p.m1;
      Matrix jac(3, 3);
      jac << -p.alpha * (1.0 + slope), p.alpha, 0.0,  //
          1.0, -1.0, 1.0,                              //
          0.0, -p.beta, -p.gamma;
      return jac;
    }
    case NodeModel::Kind::Lure: {
      const auto& p = *model.lure_params();
      const Matrix c1 = p.c1_row();
      const Matrix b1 = p.b1_vec();
      const double y = (c1 * s.state)(0, 0);
      if (std::abs(std::abs(y) - 1.0) <= kink_margin) {
        std::ostringstream msg;
        msg << "Lur'e Jacobian undefined: y = C1 s = " << y
            << " lies on the kink |y| = 1";
        throw InvalidArgument(msg.str());
      }
      const double slope = std::abs(y) < 1.0 ? 2.0 : 0.0;
      return p.a1() - 2.0 * b1 * c1 + slope * b1 * c1;
    }
    case NodeModel::Kind::Linear:
      return *model.linear_matrix();
    case NodeModel::Kind::Generic:
      return finite_difference_jacobian(model, s.state);
  }
  return {};
}

bool verify_equilibrium(const NodeModel& model, const Vector& s, double tol) {
  if (s.size() != model.dimension()) return false;
  return model(s).norm() <= tol;
}

}  // namespace netsync
