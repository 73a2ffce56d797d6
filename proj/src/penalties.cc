#include "morozov/penalties.h"

#include <cmath>

namespace morozov {

double L1Value(const Vector& x) { return x.cwiseAbs().sum(); }

Vector SoftThreshold(const Vector& v, double t) {
  if (!(t >= 0.0)) throw InvalidInput("SoftThreshold: threshold must be >= 0");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

double QuadraticValue(const Vector& x, const Vector& scaling) {
  RequireSize(scaling, x.size(), "QuadraticValue");
  return 0.5 * scaling.cwiseProduct(x).squaredNorm();
}

Vector QuadraticProx(const Vector& v, double t, const Vector& scaling) {
  if (!(t >= 0.0)) throw InvalidInput("QuadraticProx: t must be >= 0");
  RequireSize(scaling, v.size(), "QuadraticProx");
  return v.cwiseQuotient(
      (Vector::Ones(v.size()) + t * scaling.cwiseAbs2()).eval());
}

// ---------------------------------------------------------------------------

double L1Penalty::Value(const Vector& x) const { return L1Value(x); }

Vector L1Penalty::Prox(const Vector& v, double t) const {
  return SoftThreshold(v, t);
}

Vector L1Penalty::SubgradientAt(const Vector& x) const {
  Vector xi(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xi[i] = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
  }
  return xi;
}

QuadraticPenalty::QuadraticPenalty(Vector scaling,
                                   std::optional<Vector> reference)
    : scaling_(std::move(scaling)),
      reference_(reference ? std::move(*reference)
                           : Vector::Zero(scaling_.size())) {
  RequireSize(reference_, scaling_.size(), "QuadraticPenalty reference");
  for (Eigen::Index i = 0; i < scaling_.size(); ++i) {
    if (!(scaling_[i] > 0.0)) {
      throw InvalidInput("QuadraticPenalty: scaling entries must be > 0");
    }
  }
}

double QuadraticPenalty::Value(const Vector& x) const {
  RequireSize(x, scaling_.size(), "QuadraticPenalty::Value");
  return QuadraticValue(x - reference_, scaling_);
}

Vector QuadraticPenalty::Prox(const Vector& v, double t) const {
  RequireSize(v, scaling_.size(), "QuadraticPenalty::Prox");
  return reference_ + QuadraticProx(v - reference_, t, scaling_);
}

Vector QuadraticPenalty::SubgradientAt(const Vector& x) const {
  RequireSize(x, scaling_.size(), "QuadraticPenalty::SubgradientAt");
  return scaling_.cwiseAbs2().cwiseProduct(x - reference_);
}

// ---------------------------------------------------------------------------

BregmanReport BregmanDistance(const Penalty& penalty, const Vector& x1,
                              const Vector& x2,
                              const std::optional<Vector>& xi) {
  RequireSize(x2, x1.size(), "BregmanDistance");
  BregmanReport report;
  report.base_point = x2;
  report.subgradient = xi ? *xi : penalty.SubgradientAt(x2);
  RequireSize(report.subgradient, x1.size(), "BregmanDistance subgradient");
  const double r1 = penalty.Value(x1);
  const double r2 = penalty.Value(x2);
  const double d = r1 - r2 - report.subgradient.dot(x1 - x2);
  const double slack = 1e-12 * (1.0 + std::abs(r1) + std::abs(r2));
  if (d < -slack) {
    throw InvalidInput(
        "BregmanDistance: xi is not a subgradient at the base point");
  }
  // Round-off can push a true zero slightly negative.
  report.distance = std::max(d, 0.0);
  return report;
}

}  // namespace morozov
