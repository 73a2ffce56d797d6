#include "morozov/operators.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace morozov {

Matrix ForwardOperator::Jacobian(const Vector& x) const {
  const Eigen::Index n = input_dim();
  Matrix jac(output_dim(), n);
  Vector e = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    jac.col(j) = JacobianApply(x, e);
    e[j] = 0.0;
  }
  return jac;
}

Vector ForwardOperator::Baseline() const {
  return Evaluate(Vector::Zero(input_dim()));
}

// ---------------------------------------------------------------------------

LinearOperator::LinearOperator(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.size() == 0) throw InvalidInput("LinearOperator: empty matrix");
}

Vector LinearOperator::Evaluate(const Vector& x) const {
  RequireSize(x, input_dim(), "LinearOperator::Evaluate");
  return matrix_ * x;
}

Vector LinearOperator::JacobianApply(const Vector& x, const Vector& v) const {
  RequireSize(x, input_dim(), "LinearOperator::JacobianApply");
  RequireSize(v, input_dim(), "LinearOperator::JacobianApply");
  return matrix_ * v;
}

Vector LinearOperator::JacobianAdjointApply(const Vector& x,
                                            const Vector& w) const {
  RequireSize(x, input_dim(), "LinearOperator::JacobianAdjointApply");
  RequireSize(w, output_dim(), "LinearOperator::JacobianAdjointApply");
  return matrix_.transpose() * w;
}

Matrix LinearOperator::Jacobian(const Vector& x) const {
  RequireSize(x, input_dim(), "LinearOperator::Jacobian");
  return matrix_;
}

// ---------------------------------------------------------------------------

namespace {

Vector Pow(const Vector& v, int p) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double acc = 1.0;
    for (int k = 0; k < p; ++k) acc *= v[i];
    out[i] = acc;
  }
  return out;
}

}  // namespace

CsOperator::CsOperator(const CsOperatorSpec& spec)
    : matrix_(spec.matrix * spec.scale),
      pre_power_(spec.pre_power),
      post_power_(spec.post_power) {
  if (spec.matrix.size() == 0) throw InvalidInput("CsOperator: empty matrix");
  if (pre_power_ < 1 || post_power_ < 1) {
    throw InvalidInput("CsOperator: powers must be positive integers");
  }
  if (!(spec.scale > 0.0)) throw InvalidInput("CsOperator: scale must be > 0");
  raw_norm_ = SpectralNorm(spec.matrix);
  scaled_norm_ = raw_norm_ * spec.scale;
  if (scaled_norm_ > kMaxScaledNorm) {
    throw InvalidInput("CsOperator: scaled matrix norm " +
                       std::to_string(scaled_norm_) + " exceeds " +
                       std::to_string(kMaxScaledNorm));
  }
}

Vector CsOperator::InnerDerivative(const Vector& x) const {
  return (Vector::Ones(x.size()) + pre_power_ * Pow(x, pre_power_ - 1))
      .eval();
}

Vector CsOperator::OuterDerivative(const Vector& z) const {
  return post_power_ * Pow(z, post_power_ - 1);
}

Vector CsOperator::Evaluate(const Vector& x) const {
  RequireSize(x, input_dim(), "CsOperator::Evaluate");
  const Vector z = matrix_ * (x + Pow(x, pre_power_));
  return post_power_ == 1 ? z : Pow(z, post_power_);
}

Vector CsOperator::JacobianApply(const Vector& x, const Vector& v) const {
  RequireSize(x, input_dim(), "CsOperator::JacobianApply");
  RequireSize(v, input_dim(), "CsOperator::JacobianApply");
  Vector inner = matrix_ * InnerDerivative(x).cwiseProduct(v);
  if (post_power_ == 1) return inner;
  const Vector z = matrix_ * (x + Pow(x, pre_power_));
  return OuterDerivative(z).cwiseProduct(inner);
}

Vector CsOperator::JacobianAdjointApply(const Vector& x,
                                        const Vector& w) const {
  RequireSize(x, input_dim(), "CsOperator::JacobianAdjointApply");
  RequireSize(w, output_dim(), "CsOperator::JacobianAdjointApply");
  Vector outer = w;
  if (post_power_ != 1) {
    const Vector z = matrix_ * (x + Pow(x, pre_power_));
    outer = OuterDerivative(z).cwiseProduct(w);
  }
  return InnerDerivative(x).cwiseProduct(matrix_.transpose() * outer);
}

Matrix CsOperator::Jacobian(const Vector& x) const {
  RequireSize(x, input_dim(), "CsOperator::Jacobian");
  Matrix jac = matrix_ * InnerDerivative(x).asDiagonal();
  if (post_power_ != 1) {
    const Vector z = matrix_ * (x + Pow(x, pre_power_));
    jac = OuterDerivative(z).asDiagonal() * jac;
  }
  return jac;
}

// ---------------------------------------------------------------------------

GravityOperator::GravityOperator(GravitySceneSpec spec)
    : spec_(std::move(spec)) {
  if (spec_.radii.empty()) throw InvalidInput("GravityOperator: no spheres");
  if (spec_.density_contrast.size() != spec_.radii.size()) {
    throw InvalidInput(
        "GravityOperator: one density contrast per sphere required");
  }
  if (spec_.stations.empty()) throw InvalidInput("GravityOperator: no stations");
  for (double r : spec_.radii) {
    if (!(r > 0.0)) throw InvalidInput("GravityOperator: radii must be > 0");
  }
}

double GravityOperator::SphereMass(int k) const {
  const double r = spec_.radii[k];
  return 4.0 * std::numbers::pi / 3.0 * spec_.gravitational_constant *
         spec_.density_contrast[k] * r * r * r;
}

void GravityOperator::CheckParams(const Vector& params) const {
  RequireSize(params, input_dim(), "GravityOperator");
  for (int k = 0; k < sphere_count(); ++k) {
    const double d = params[2 * k + 1];
    if (!(d > 0.0) || !std::isfinite(params[2 * k])) {
      throw DomainError("GravityOperator: sphere " + std::to_string(k) +
                        " has nonpositive depth " + std::to_string(d));
    }
  }
}

Vector GravityOperator::Evaluate(const Vector& params) const {
  CheckParams(params);
  Vector g = Vector::Zero(output_dim());
  for (int k = 0; k < sphere_count(); ++k) {
    const double mass = SphereMass(k);
    const double x0 = params[2 * k];
    const double d = params[2 * k + 1];
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double u = spec_.stations[i] - x0;
      const double r2 = d * d + u * u;
      g[i] += mass * d / (r2 * std::sqrt(r2));
    }
  }
  return g;
}

Matrix GravityOperator::Jacobian(const Vector& params) const {
  CheckParams(params);
  Matrix jac(output_dim(), input_dim());
  for (int k = 0; k < sphere_count(); ++k) {
    const double mass = SphereMass(k);
    const double x0 = params[2 * k];
    const double d = params[2 * k + 1];
    for (Eigen::Index i = 0; i < jac.rows(); ++i) {
      const double u = spec_.stations[i] - x0;
      const double r2 = d * d + u * u;
      const double r5 = r2 * r2 * std::sqrt(r2);
      jac(i, 2 * k) = mass * d * 3.0 * u / r5;
      jac(i, 2 * k + 1) = mass * (u * u - 2.0 * d * d) / r5;
    }
  }
  return jac;
}

Vector GravityOperator::JacobianApply(const Vector& params,
                                      const Vector& v) const {
  RequireSize(v, input_dim(), "GravityOperator::JacobianApply");
  return Jacobian(params) * v;
}

Vector GravityOperator::JacobianAdjointApply(const Vector& params,
                                             const Vector& w) const {
  RequireSize(w, output_dim(), "GravityOperator::JacobianAdjointApply");
  return Jacobian(params).transpose() * w;
}

Vector GravityOperator::Baseline() const { return Vector::Zero(output_dim()); }

std::vector<double> EquispacedStations(double lo, double hi, int count) {
  if (count < 1) throw InvalidInput("EquispacedStations: count must be >= 1");
  if (count == 1) return {lo};
  if (!(hi > lo)) throw InvalidInput("EquispacedStations: empty range");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

// ---------------------------------------------------------------------------

FdReport CheckJacobianFd(const ForwardOperator& op, const Vector& x,
                         FdStepRule rule) {
  const Matrix jac = op.Jacobian(x);
  const double floor = 1e-12 * std::max(jac.colwise().norm().maxCoeff(),
                                        std::numeric_limits<double>::min());
  FdReport report;
  Vector e = Vector::Zero(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rule.relative * (1.0 + std::abs(x[j]));
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vector fd = (op.Evaluate(xp) - op.Evaluate(xm)) / (2.0 * h);
    e[j] = 1.0;
    const Vector col = op.JacobianApply(x, e);
    e[j] = 0.0;
    const double err =
        (fd - col).norm() / std::max({col.norm(), fd.norm(), floor});
    if (err > report.max_rel_error || report.worst_column < 0) {
      report.max_rel_error = err;
      report.worst_column = j;
    }
  }
  return report;
}

double AdjointMismatch(const ForwardOperator& op, const Vector& x,
                       const Vector& v, const Vector& w) {
  const Vector jv = op.JacobianApply(x, v);
  const Vector jtw = op.JacobianAdjointApply(x, w);
  const double lhs = jv.dot(w);
  const double rhs = v.dot(jtw);
  const double scale = std::max(jv.norm() * w.norm() + v.norm() * jtw.norm(),
                                std::numeric_limits<double>::min());
  return std::abs(lhs - rhs) / scale;
}

double JacobianNormSquared(const ForwardOperator& op, const Vector& x,
                           int max_iterations, double rel_tol) {
  Vector v = Vector::Ones(op.input_dim()).normalized();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector u = op.JacobianAdjointApply(x, op.JacobianApply(x, v));
    const double norm = u.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(u);
    v = u / norm;
    if (std::abs(next - estimate) <= rel_tol * std::abs(next)) {
      return std::max(next, norm);
    }
    estimate = next;
  }
  return estimate;
}

double SpectralNorm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace morozov
