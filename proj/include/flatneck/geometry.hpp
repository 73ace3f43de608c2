#pragma once

#include <Eigen/Core>

#include "flatneck/problem.hpp"

namespace flatneck {

// Inclusion boundary profiles near the neck. Canonical split: h2 == 0 and
// h1(r) = a (r-r0)_+^2 + c (r-r0)_+^(2+gamma), so the difference h1 - h2
// carries the whole gap shape. Everything is radial and immutable.
class Profile {
 public:
  explicit Profile(const ProblemConfig& cfg);

  double h1(double r) const;
  double h2(double /*r*/) const { return 0.0; }
  double dh1(double r) const;
  double dh2(double /*r*/) const { return 0.0; }

  // eps + h1(r) - h2(r). Rejects r outside [0, 1]. Equals eps on the flat cap.
  double gap(double r) const;

  // Quadratic part of the gap, eps + a (r-r0)_+^2; drives the reduced machinery.
  double kappa(double r) const;
  double dkappa(double r) const;

  // Remainder e(r) = h1 - h2 - a (r-r0)_+^2 (the perturbation pathway; zero by default).
  double remainder(double r) const;

  // Radial factor of the off-diagonal coefficient:
  //   a^{in}(y) = tau(|y'|, y_n) * y_i/|y'|,
  //   tau = -2 eps h2' - (y_n + eps) (h1 - h2)'.
  double tau(double r, double yn) const;

  // Bottom-right coefficient a^{nn} = (4 eps^2 + tau^2) / gap.
  double ann(double r, double yn) const;

  const ProblemConfig& config() const { return cfg_; }

 private:
  ProblemConfig cfg_;
};

// Change of variables between the curved neck and the flat cylinder of
// height 2 eps: y' = x', y_n affine in x_n. Points are length-n vectors.
Eigen::VectorXd flatten(const Profile& p, const Eigen::VectorXd& x);
Eigen::VectorXd unflatten(const Profile& p, const Eigen::VectorXd& y);

// Jacobian d y / d x assembled entry by entry from the analytic partials.
Eigen::MatrixXd flatten_jacobian(const Profile& p, const Eigen::VectorXd& x);

// Determinant of flatten_jacobian computed by LU, not by the closed form,
// so identity checks against 2 eps / gap are meaningful.
double flatten_jacobian_det(const Profile& p, const Eigen::VectorXd& x);

// Coefficient matrix of the flattened divergence-form equation at a
// cylinder point y: diagonal block gap(|y'|) = kappa + e, off-diagonal
// column a^{in}, corner a^{nn}.
struct CoefficientMatrix {
  Eigen::MatrixXd a;  // n x n, symmetric

  double diagonal_block(int i) const { return a(i, i); }
  double offdiag(int i) const { return a(i, a.rows() - 1); }
  double ann() const { return a(a.rows() - 1, a.cols() - 1); }
};

CoefficientMatrix coefficients(const Profile& p, const Eigen::VectorXd& y);

}  // namespace flatneck
