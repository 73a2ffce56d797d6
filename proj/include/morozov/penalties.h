#ifndef MOROZOV_PENALTIES_H_
#define MOROZOV_PENALTIES_H_

#include <memory>
#include <optional>
#include <string>

#include "morozov/types.h"

namespace morozov {

// Convex penalty R with R >= 0. Both shipped penalties have closed-form
// proximal maps.
class Penalty {
 public:
  virtual ~Penalty() = default;

  virtual std::string name() const = 0;
  virtual double Value(const Vector& x) const = 0;
  // argmin_z 1/2 ||z - v||^2 + t R(z), t >= 0.
  virtual Vector Prox(const Vector& v, double t) const = 0;
  // One element of the subdifferential at x; the selection rule is part of
  // each implementation's contract.
  virtual Vector SubgradientAt(const Vector& x) const = 0;
};

using PenaltyPtr = std::shared_ptr<const Penalty>;

// R(x) = sum |x_i|. Subgradient selection: sign(x_i), and 0 where x_i = 0.
class L1Penalty final : public Penalty {
 public:
  std::string name() const override { return "l1"; }
  double Value(const Vector& x) const override;
  Vector Prox(const Vector& v, double t) const override;
  Vector SubgradientAt(const Vector& x) const override;
};

// R(x) = 1/2 ||D (x - ref)||^2 with D a positive diagonal. The reference
// defaults to the origin so that R(0) = 0.
class QuadraticPenalty final : public Penalty {
 public:
  explicit QuadraticPenalty(Vector scaling,
                            std::optional<Vector> reference = std::nullopt);

  std::string name() const override { return "quadratic"; }
  double Value(const Vector& x) const override;
  Vector Prox(const Vector& v, double t) const override;
  // The gradient D^2 (x - ref).
  Vector SubgradientAt(const Vector& x) const override;

  const Vector& scaling() const { return scaling_; }
  const Vector& reference() const { return reference_; }

 private:
  Vector scaling_;
  Vector reference_;
};

double L1Value(const Vector& x);

// Componentwise sign(v_i) max(|v_i| - t, 0). Throws InvalidInput for t < 0.
Vector SoftThreshold(const Vector& v, double t);

double QuadraticValue(const Vector& x, const Vector& scaling);

// Componentwise v_i / (1 + t D_ii^2).
Vector QuadraticProx(const Vector& v, double t, const Vector& scaling);

struct BregmanReport {
  double distance = 0.0;
  Vector subgradient;
  Vector base_point;
};

// D(x1, x2) = R(x1) - R(x2) - <xi, x1 - x2> with xi in dR(x2). When `xi` is
// absent the penalty's selection rule supplies it. A supplied xi that breaks
// the subgradient inequality on the pair (x1, x2) is rejected.
BregmanReport BregmanDistance(const Penalty& penalty, const Vector& x1,
                              const Vector& x2,
                              const std::optional<Vector>& xi = std::nullopt);

}  // namespace morozov

#endif  // MOROZOV_PENALTIES_H_
