#include "flatneck/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace flatneck {

namespace {

double plus_part(double x) { return x > 0.0 ? x : 0.0; }

// radius of the first n-1 coordinates
double radial(const Eigen::VectorXd& v) {
  return v.head(v.size() - 1).norm();
}

}  // namespace

Profile::Profile(const ProblemConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

double Profile::h1(double r) const {
  const double s = plus_part(r - cfg_.r0);
  double v = cfg_.a * s * s;
  if (cfg_.remainder_c != 0.0 && s > 0.0)
    v += cfg_.remainder_c * std::pow(s, 2.0 + cfg_.gamma);
  return v;
}

double Profile::dh1(double r) const {
  const double s = plus_part(r - cfg_.r0);
  double v = 2.0 * cfg_.a * s;
  if (cfg_.remainder_c != 0.0 && s > 0.0)
    v += cfg_.remainder_c * (2.0 + cfg_.gamma) * std::pow(s, 1.0 + cfg_.gamma);
  return v;
}

double Profile::gap(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("gap: r must lie in [0, 1]");
  return cfg_.epsilon + h1(r) - h2(r);
}

double Profile::kappa(double r) const {
  const double s = plus_part(r - cfg_.r0);
  return cfg_.epsilon + cfg_.a * s * s;
}

double Profile::dkappa(double r) const {
  return 2.0 * cfg_.a * plus_part(r - cfg_.r0);
}

double Profile::remainder(double r) const {
  const double s = plus_part(r - cfg_.r0);
  return cfg_.remainder_c == 0.0 || s == 0.0
             ? 0.0
             : cfg_.remainder_c * std::pow(s, 2.0 + cfg_.gamma);
}

double Profile::tau(double r, double yn) const {
  return -2.0 * cfg_.epsilon * dh2(r) - (yn + cfg_.epsilon) * (dh1(r) - dh2(r));
}

double Profile::ann(double r, double yn) const {
  const double t = tau(r, yn);
  const double g = cfg_.epsilon + h1(r) - h2(r);
  return (4.0 * cfg_.epsilon * cfg_.epsilon + t * t) / g;
}

Eigen::VectorXd flatten(const Profile& p, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const ProblemConfig& cfg = p.config();
  if (n != cfg.n) throw std::invalid_argument("flatten: point dimension mismatch");
  const double r = radial(x);
  if (!(r < 1.0)) throw std::domain_error("flatten: |x'| must be < 1");
  const double lo = -0.5 * cfg.epsilon + p.h2(r);
  const double hi = 0.5 * cfg.epsilon + p.h1(r);
  const double xn = x(n - 1);
  const double slack = 1e-12 * (cfg.epsilon + 1.0);
  if (xn < lo - slack || xn > hi + slack)
    throw std::domain_error("flatten: point lies outside the neck");
  const double g = cfg.epsilon + p.h1(r) - p.h2(r);
  Eigen::VectorXd y = x;
  y(n - 1) = 2.0 * cfg.epsilon * ((xn - p.h2(r) + 0.5 * cfg.epsilon) / g - 0.5);
  return y;
}

Eigen::VectorXd unflatten(const Profile& p, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size());
  const ProblemConfig& cfg = p.config();
  if (n != cfg.n) throw std::invalid_argument("unflatten: point dimension mismatch");
  const double r = radial(y);
  if (!(r < 1.0)) throw std::domain_error("unflatten: |y'| must be < 1");
  const double yn = y(n - 1);
  const double slack = 1e-12 * (cfg.epsilon + 1.0);
  if (yn < -cfg.epsilon - slack || yn > cfg.epsilon + slack)
    throw std::domain_error("unflatten: |y_n| must be <= eps");
  const double g = cfg.epsilon + p.h1(r) - p.h2(r);
  Eigen::VectorXd x = y;
  x(n - 1) = p.h2(r) - 0.5 * cfg.epsilon + (yn / (2.0 * cfg.epsilon) + 0.5) * g;
  return x;
}

Eigen::MatrixXd flatten_jacobian(const Profile& p, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const ProblemConfig& cfg = p.config();
  const double r = radial(x);
  const double g = cfg.epsilon + p.h1(r) - p.h2(r);
  const Eigen::VectorXd y = flatten(p, x);
  const double yn = y(n - 1);

  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
  // d y_n / d x_i = tau(r, y_n) / g * x_i / r, with tau the a^{in} radial factor
  const double t = p.tau(r, yn);
  for (int i = 0; i + 1 < n; ++i)
    jac(n - 1, i) = r > 0.0 ? t / g * x(i) / r : 0.0;
  jac(n - 1, n - 1) = 2.0 * cfg.epsilon / g;
  return jac;
}

double flatten_jacobian_det(const Profile& p, const Eigen::VectorXd& x) {
  return flatten_jacobian(p, x).fullPivLu().determinant();
}

CoefficientMatrix coefficients(const Profile& p, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size());
  const ProblemConfig& cfg = p.config();
  if (n != cfg.n) throw std::invalid_argument("coefficients: point dimension mismatch");
  const double r = radial(y);
  if (!(r < 1.0)) throw std::domain_error("coefficients: |y'| must be < 1");
  const double yn = y(n - 1);
  const double slack = 1e-12 * (cfg.epsilon + 1.0);
  if (std::abs(yn) > cfg.epsilon + slack)
    throw std::domain_error("coefficients: |y_n| must be <= eps");

  const double g = cfg.epsilon + p.h1(r) - p.h2(r);  // = kappa + e
  const double t = p.tau(r, yn);

  CoefficientMatrix cm;
  cm.a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    cm.a(i, i) = g;
    const double ain = r > 0.0 ? t * y(i) / r : 0.0;
    cm.a(i, n - 1) = ain;
    cm.a(n - 1, i) = ain;
  }
  cm.a(n - 1, n - 1) = (4.0 * cfg.epsilon * cfg.epsilon + t * t) / g;
  return cm;
}

}  // namespace flatneck
