#ifndef MOROZOV_OPERATORS_H_
#define MOROZOV_OPERATORS_H_

#include <memory>
#include <vector>

#include "morozov/types.h"

namespace morozov {

// A nonlinear map F: R^n -> R^m together with its Frechet derivative.
// Implementations are immutable after construction and safe to share
// between threads.
class ForwardOperator {
 public:
  virtual ~ForwardOperator() = default;

  virtual Eigen::Index input_dim() const = 0;
  virtual Eigen::Index output_dim() const = 0;

  virtual Vector Evaluate(const Vector& x) const = 0;
  // F'(x) v
  virtual Vector JacobianApply(const Vector& x, const Vector& v) const = 0;
  // F'(x)^* w
  virtual Vector JacobianAdjointApply(const Vector& x,
                                      const Vector& w) const = 0;

  // Dense F'(x). The default assembles it column by column.
  virtual Matrix Jacobian(const Vector& x) const;

  // Data predicted by the empty model. Defaults to F(0); operators whose
  // zero parameter vector is outside the domain override it.
  virtual Vector Baseline() const;
};

using OperatorPtr = std::shared_ptr<const ForwardOperator>;

// F(x) = A x.
class LinearOperator final : public ForwardOperator {
 public:
  explicit LinearOperator(Matrix matrix);

  Eigen::Index input_dim() const override { return matrix_.cols(); }
  Eigen::Index output_dim() const override { return matrix_.rows(); }
  Vector Evaluate(const Vector& x) const override;
  Vector JacobianApply(const Vector& x, const Vector& v) const override;
  Vector JacobianAdjointApply(const Vector& x, const Vector& w) const override;
  Matrix Jacobian(const Vector& x) const override;

  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
};

struct CsOperatorSpec {
  Matrix matrix;        // raw m x n sensing matrix
  int pre_power = 3;    // d in b(x) = x + x^d
  int post_power = 1;   // c in a(z) = z^c
  double scale = 0.05;  // applied to `matrix` at construction
};

// Nonlinear compressive-sensing model F(x) = a(A b(x)) with componentwise
// a(z) = z^post_power and b(x) = x + x^pre_power.
class CsOperator final : public ForwardOperator {
 public:
  // Largest admissible spectral norm of the scaled matrix.
  static constexpr double kMaxScaledNorm = 1.25;

  // Throws InvalidInput when the scaled matrix norm exceeds kMaxScaledNorm
  // or a power is not positive.
  explicit CsOperator(const CsOperatorSpec& spec);

  Eigen::Index input_dim() const override { return matrix_.cols(); }
  Eigen::Index output_dim() const override { return matrix_.rows(); }
  Vector Evaluate(const Vector& x) const override;
  Vector JacobianApply(const Vector& x, const Vector& v) const override;
  Vector JacobianAdjointApply(const Vector& x, const Vector& w) const override;
  Matrix Jacobian(const Vector& x) const override;

  const Matrix& matrix() const { return matrix_; }
  double raw_norm() const { return raw_norm_; }
  double scaled_norm() const { return scaled_norm_; }
  int pre_power() const { return pre_power_; }
  int post_power() const { return post_power_; }

 private:
  Vector InnerDerivative(const Vector& x) const;  // 1 + d x^(d-1)
  Vector OuterDerivative(const Vector& z) const;  // c z^(c-1)

  Matrix matrix_;
  int pre_power_;
  int post_power_;
  double raw_norm_;
  double scaled_norm_;
};

struct GravitySceneSpec {
  std::vector<double> radii;             // m
  std::vector<double> density_contrast;  // kg/m^3
  double gravitational_constant = 6.674e-11;
  std::vector<double> stations;          // surface x coordinates, m
};

// Vertical gravity anomaly of buried spheres observed along a surface line.
// Parameters are laid out as [x0_1, d_1, x0_2, d_2, ...] (horizontal
// position and depth of each sphere, meters); output is in m/s^2.
class GravityOperator final : public ForwardOperator {
 public:
  explicit GravityOperator(GravitySceneSpec spec);

  Eigen::Index input_dim() const override {
    return 2 * static_cast<Eigen::Index>(spec_.radii.size());
  }
  Eigen::Index output_dim() const override {
    return static_cast<Eigen::Index>(spec_.stations.size());
  }
  // Throws DomainError when any depth is nonpositive or non-finite.
  Vector Evaluate(const Vector& params) const override;
  Vector JacobianApply(const Vector& params, const Vector& v) const override;
  Vector JacobianAdjointApply(const Vector& params,
                              const Vector& w) const override;
  Matrix Jacobian(const Vector& params) const override;
  // No spheres, no anomaly.
  Vector Baseline() const override;

  const GravitySceneSpec& spec() const { return spec_; }
  int sphere_count() const { return static_cast<int>(spec_.radii.size()); }

 private:
  double SphereMass(int k) const;  // (4 pi / 3) G drho R^3
  void CheckParams(const Vector& params) const;

  GravitySceneSpec spec_;
};

std::vector<double> EquispacedStations(double lo, double hi, int count);

struct FdStepRule {
  // Central difference step h_i = relative * (1 + |x_i|).
  double relative = 1e-6;
};

struct FdReport {
  double max_rel_error = 0.0;
  Eigen::Index worst_column = -1;
};

// Compares each column of F'(x) against central differences.
FdReport CheckJacobianFd(const ForwardOperator& op, const Vector& x,
                         FdStepRule rule = {});

// |<F'(x)v, w> - <v, F'(x)^* w>| relative to the magnitudes involved.
double AdjointMismatch(const ForwardOperator& op, const Vector& x,
                       const Vector& v, const Vector& w);

// Power iteration for ||F'(x)||_2^2.
double JacobianNormSquared(const ForwardOperator& op, const Vector& x,
                           int max_iterations = 100, double rel_tol = 1e-6);

double SpectralNorm(const Matrix& m);

}  // namespace morozov

#endif  // MOROZOV_OPERATORS_H_
