#pragma once

#include <functional>
#include <vector>

#include "flatneck/problem.hpp"
#include "flatneck/radial.hpp"

namespace flatneck {

// Drift of the reduced radial operator,
//   b(r) = (n-2)/r + kappa'(r)/kappa(r),  kappa = eps + a (r-r0)_+^2.
// Throws std::domain_error for r <= 0.
double drift(const ProblemConfig& cfg, double r);

// int_{r0/2}^t b(s) ds in closed form:
//   (n-2)(log t - log(r0/2)) + log(kappa(t)/eps).
// Requires t >= r0/2. For r0 = 0 and n >= 3 the integral diverges and the
// function returns +infinity.
double log_integrating_factor(const ProblemConfig& cfg, double t);

// Same quantity by adaptive-free composite Gauss quadrature of b; used as
// the independent agreement check against the closed form.
double log_integrating_factor_quadrature(const ProblemConfig& cfg, double t,
                                         int panels_hint = 0);

// Solution of L h = h'' + b h' - k(k+n-3) h / r^2 = 0 with h(0) = 0, h(1) = 1,
// realized as the limit of two-point problems on (a_cut, 1) with
// h(a_cut) = a_cut^k, obtained by halving a_cut until the inner coefficient
// settles.
struct HomogeneousSolution {
  RadialFunction h;
  double c1 = 1.0;          // h(probe)/probe^k, probe = max(r0, 1/4)
  double a_cut = 0.0;       // final cutoff used
  int halvings = 0;         // number of a_cut halvings performed
  double c1_cauchy = 0.0;   // last |delta C1| between halvings
  bool bounds_ok = true;    // r^k <= h <= 1 node-wise within tolerance
  double bound_violation = 0.0;
  bool trivial = false;     // true for the k = 0 stand-in h == 1

  // k = 0 path: h == 1 on the grid (the reduction of order degenerates to
  // the plain integrating-factor formula).
  static HomogeneousSolution constant_one(const RadialGrid& grid);
};

HomogeneousSolution solve_homogeneous(const ProblemConfig& cfg, const RadialGrid& grid,
                                      double a_cut_initial = 0.0);

// General two-point solver for v'' + b v' - lambda v / r^2 = rhs on the given
// nodes with Dirichlet ends, second-order central differences (no upwinding).
// Exposed for manufactured-solution verification. When regular_branch_k >= 0
// the left Dirichlet row is replaced by the regular-branch proportionality
// v(n0) n1^k = v(n1) n0^k, which realizes the a -> 0 limit exactly in the
// flat zone (left_value is then ignored).
std::vector<double> radial_bvp_solve(const ProblemConfig& cfg,
                                     const std::vector<double>& nodes,
                                     double lambda,
                                     const std::function<double(double)>& rhs,
                                     double left_value, double right_value,
                                     int regular_branch_k = -1);

// Anchor data at r0/2 for the reduction of order: V and V' there.
struct OdeAnchor {
  double value = 0.0;  // V(r0/2)
  double slope = 0.0;  // V'(r0/2)
};

// Recovers V' on [r0/2, 1] from the source split H = A' + B of the reduced
// equation V'' + bV' - k(k+n-3)V/r^2 = H, by reduction of order V = h w,
// with the A' term integrated by parts. With h == 1 (k = 0) this is exactly
// the single integrating-factor formula.
RadialFunction reduce_order_vprime(const ProblemConfig& cfg,
                                   const HomogeneousSolution& h,
                                   const RadialFunction& A,
                                   const RadialFunction& B,
                                   const OdeAnchor& anchor);

// Exponent schedule s0, (s0 - gamma/2)_+, ... down to the first 0.
std::vector<double> bootstrap_schedule(double gamma, double s0 = 0.5);

}  // namespace flatneck
