#include "flatneck/reduced_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatneck {

namespace {

constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};

double plus_part(double x) { return x > 0.0 ? x : 0.0; }

double kappa_of(const ProblemConfig& cfg, double r) {
  const double s = plus_part(r - cfg.r0);
  return cfg.epsilon + cfg.a * s * s;
}

// composite 4-point Gauss of f over [a, b] split into `panels` equal panels
template <class F>
double gauss_panels(F&& f, double a, double b, int panels) {
  double acc = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h, half = 0.5 * h;
    for (int q = 0; q < 4; ++q) acc += half * kGaussW[q] * f(mid + half * kGaussX[q]);
  }
  return acc;
}

}  // namespace

double drift(const ProblemConfig& cfg, double r) {
  if (!(r > 0.0)) throw std::domain_error("drift: r must be > 0");
  const double s = plus_part(r - cfg.r0);
  return (cfg.n - 2) / r + 2.0 * cfg.a * s / (cfg.epsilon + cfg.a * s * s);
}

double log_integrating_factor(const ProblemConfig& cfg, double t) {
  const double ra = cfg.r0 / 2.0;
  if (t < ra - 1e-15) throw std::domain_error("log_integrating_factor: t < r0/2");
  if (t <= ra) return 0.0;
  double first;
  if (cfg.n == 2) {
    first = 0.0;
  } else if (ra == 0.0) {
    return std::numeric_limits<double>::infinity();
  } else {
    first = (cfg.n - 2) * (std::log(t) - std::log(ra));
  }
  return first + std::log(kappa_of(cfg, t) / cfg.epsilon);
}

double log_integrating_factor_quadrature(const ProblemConfig& cfg, double t,
                                         int panels_hint) {
  const double ra = cfg.r0 / 2.0;
  if (t < ra - 1e-15) throw std::domain_error("log_integrating_factor_quadrature: t < r0/2");
  if (t <= ra) return 0.0;
  if (ra == 0.0 && cfg.n > 2) return std::numeric_limits<double>::infinity();
  const int panels = panels_hint > 0 ? panels_hint : 96;
  auto b = [&cfg](double s) { return drift(cfg, s); };
  // split at the kink r0; beyond it the integrand varies on the sqrt(eps)
  // scale, so use geometrically growing segments from r0
  double acc = 0.0;
  if (t <= cfg.r0 || cfg.r0 <= ra) return gauss_panels(b, ra, t, panels);
  acc += gauss_panels(b, ra, cfg.r0, panels);
  const double scale = std::sqrt(cfg.epsilon / cfg.a) / 4.0;
  double lo = cfg.r0, width = scale;
  while (lo < t) {
    const double hi = std::min(t, lo + width);
    acc += gauss_panels(b, lo, hi, 32);
    lo = hi;
    width *= 2.0;
  }
  return acc;
}

HomogeneousSolution HomogeneousSolution::constant_one(const RadialGrid& grid) {
  HomogeneousSolution out{RadialFunction(grid, std::vector<double>(grid.size(), 1.0))};
  out.trivial = true;
  out.c1 = 1.0;
  return out;
}

std::vector<double> radial_bvp_solve(const ProblemConfig& cfg,
                                     const std::vector<double>& nodes,
                                     double lambda,
                                     const std::function<double(double)>& rhs,
                                     double left_value, double right_value,
                                     int regular_branch_k) {
  const std::size_t n = nodes.size();
  if (n < 3) throw std::invalid_argument("radial_bvp_solve: need >= 3 nodes");
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), b(n, 0.0);
  if (regular_branch_k >= 0) {
    // v grows like r^k between the two leftmost nodes: kills the singular branch
    diag[0] = std::pow(nodes[1], regular_branch_k);
    upper[0] = -std::pow(nodes[0], regular_branch_k);
    b[0] = 0.0;
  } else {
    diag[0] = 1.0;
    b[0] = left_value;
  }
  diag[n - 1] = 1.0;
  b[n - 1] = right_value;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double r = nodes[i];
    const double hl = r - nodes[i - 1], hr = nodes[i + 1] - r;
    const double bi = drift(cfg, r);
    // second-order non-uniform central stencils for v'' and v'
    const double cll = 2.0 / (hl * (hl + hr));
    const double crr = 2.0 / (hr * (hl + hr));
    const double cmm = -2.0 / (hl * hr);
    const double dll = -hr / (hl * (hl + hr));
    const double drr = hl / (hr * (hl + hr));
    const double dmm = (hr - hl) / (hl * hr);
    lower[i] = cll + bi * dll;
    diag[i] = cmm + bi * dmm - lambda / (r * r);
    upper[i] = crr + bi * drr;
    b[i] = rhs(r);
  }
  // Thomas sweep
  std::vector<double> cp(n, 0.0), dp(n, 0.0);
  cp[0] = upper[0] / diag[0];
  dp[0] = b[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * cp[i - 1];
    if (std::abs(m) < 1e-300)
      throw std::runtime_error("radial_bvp_solve: singular tridiagonal system");
    cp[i] = upper[i] / m;
    dp[i] = (b[i] - lower[i] * dp[i - 1]) / m;
  }
  std::vector<double> v(n);
  v[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) v[i] = dp[i] - cp[i] * v[i + 1];
  return v;
}

namespace {

// BVP node set: grid nodes above a_cut plus a geometric ramp down to a_cut.
std::vector<double> bvp_nodes(const RadialGrid& grid, double a_cut) {
  std::vector<double> nodes;
  const auto& g = grid.nodes();
  double lowest = g.back();
  for (double r : g)
    if (r > a_cut * (1.0 + 1e-12)) {
      nodes.push_back(r);
      lowest = std::min(lowest, r);
    }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> ramp{a_cut};
  const double q = 1.18;  // log-spaced toward the singular end
  for (double r = a_cut * q; r < lowest * 0.999; r *= q) ramp.push_back(r);
  ramp.insert(ramp.end(), nodes.begin(), nodes.end());
  std::vector<double> clean;
  for (double r : ramp)
    if (clean.empty() || r - clean.back() > 1e-14) clean.push_back(r);
  return clean;
}

}  // namespace

HomogeneousSolution solve_homogeneous(const ProblemConfig& cfg, const RadialGrid& grid,
                                      double a_cut_initial) {
  if (cfg.mode_k < 1)
    throw std::invalid_argument("solve_homogeneous: k >= 1 (use constant_one for k = 0)");
  double a_cut = a_cut_initial;
  if (a_cut <= 0.0) a_cut = cfg.r0 > 0.0 ? cfg.r0 / 16.0 : 5e-4;
  if (cfg.r0 > 0.0) {
    if (!(a_cut < cfg.r0)) throw std::invalid_argument("solve_homogeneous: a_cut must be < r0");
  } else if (!(a_cut < 1e-3)) {
    throw std::invalid_argument("solve_homogeneous: a_cut must be < 1e-3 when r0 = 0");
  }
  if (grid.back() < 1.0 - 1e-12)
    throw std::invalid_argument("solve_homogeneous: grid must reach r = 1");

  const double lambda = cfg.mode_eigenvalue();
  const int k = cfg.mode_k;
  const double probe = std::max(cfg.r0, 0.25);
  auto zero_rhs = [](double) { return 0.0; };

  double c1_prev = std::numeric_limits<double>::quiet_NaN();
  double c1 = 0.0, cauchy = std::numeric_limits<double>::infinity();
  int halvings = 0;
  std::vector<double> nodes, values;
  for (;; ++halvings) {
    nodes = bvp_nodes(grid, a_cut);
    values = radial_bvp_solve(cfg, nodes, lambda, zero_rhs,
                              std::pow(a_cut, k), 1.0, /*regular_branch_k=*/k);
    RadialFunction h(RadialGrid(nodes), values);
    c1 = h(probe) / std::pow(probe, k);
    if (!std::isnan(c1_prev)) {
      cauchy = std::abs(c1 - c1_prev);
      if (cauchy < 1e-6) break;
    }
    if (halvings >= 24) break;
    c1_prev = c1;
    a_cut *= 0.5;
  }

  HomogeneousSolution out{RadialFunction(RadialGrid(nodes), values)};
  out.c1 = c1;
  out.a_cut = a_cut;
  out.halvings = halvings;
  out.c1_cauchy = std::isfinite(cauchy) ? cauchy : 0.0;

  // node-wise bound check r^k <= h <= 1
  double worst = 0.0;
  const auto& xs = out.h.grid().nodes();
  const auto& vs = out.h.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    worst = std::max(worst, std::pow(xs[i], k) - vs[i]);
    worst = std::max(worst, vs[i] - 1.0);
  }
  out.bound_violation = worst;
  out.bounds_ok = worst <= 1e-8;
  return out;
}

RadialFunction reduce_order_vprime(const ProblemConfig& cfg,
                                   const HomogeneousSolution& hom,
                                   const RadialFunction& A,
                                   const RadialFunction& B,
                                   const OdeAnchor& anchor) {
  const double ra = cfg.r0 / 2.0;
  if (A.grid().front() > ra + 1e-12 || A.grid().back() < 1.0 - 1e-12 ||
      B.grid().front() > ra + 1e-12 || B.grid().back() < 1.0 - 1e-12)
    throw std::domain_error("reduce_order_vprime: A, B must cover [r0/2, 1]");
  if (cfg.r0 == 0.0 && !(hom.trivial && cfg.n == 2))
    throw std::domain_error(
        "reduce_order_vprime: r0 = 0 anchor is regular only for the n = 2 zero-mode path");

  const RadialFunction& h = hom.h;
  const double kap_a = kappa_of(cfg, ra);
  const double h_a = hom.trivial ? 1.0 : h(ra);
  const double dh_a = hom.trivial ? 0.0 : h.derivative(ra);

  // exp(P(t)) with P(t) = int_{r0/2}^t (2h'/h + b); closed form through h and kappa
  auto mu = [&](double t) -> double {
    const double ht = hom.trivial ? 1.0 : h(t);
    double v = (ht / h_a) * (ht / h_a) * kappa_of(cfg, t) / kap_a;
    if (cfg.n != 2) v *= std::pow(t / ra, cfg.n - 2);
    return v;
  };
  auto hval = [&](double t) { return hom.trivial ? 1.0 : h(t); };
  auto hder = [&](double t) { return hom.trivial ? 0.0 : h.derivative(t); };

  // combined integrand of the II, III and B terms (A' handled by parts)
  auto integrand = [&](double t) -> double {
    const double ht = hval(t);
    const double dht = hder(t);
    const double bt = drift(cfg, t);
    const double At = A(t);
    const double Bt = B(t);
    return mu(t) * (-At * (2.0 * dht / ht + bt) / ht + At * dht / (ht * ht) + Bt / ht);
  };

  // output nodes: every grid node of A in [r0/2, 1]
  std::vector<double> nodes;
  for (double r : A.grid().nodes())
    if (r >= ra - 1e-14 && r <= 1.0 + 1e-14) nodes.push_back(r);
  if (nodes.empty() || std::abs(nodes.front() - ra) > 1e-12)
    throw std::domain_error("reduce_order_vprime: r0/2 must be a grid node");
  const RadialGrid out_grid{nodes};

  const double w_a = anchor.value / h_a;
  const double wp_a = anchor.slope / h_a - dh_a * anchor.value / (h_a * h_a);
  const double boundary_a = A(ra) / h_a;  // lower end of the by-parts boundary term

  std::vector<double> wprime(nodes.size());
  double cum = 0.0;
  wprime[0] = wp_a;  // mu(ra) = 1, I-term cancels boundary_a at t = ra
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    const double lo = nodes[j - 1], hi = nodes[j];
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int q = 0; q < 4; ++q)
      cum += half * kGaussW[q] * integrand(mid + half * kGaussX[q]);
    const double r = nodes[j];
    wprime[j] = (wp_a - boundary_a + cum) / mu(r) + A(r) / hval(r);
  }

  RadialFunction wp(out_grid, wprime);
  std::vector<double> vprime(nodes.size());
  double w = w_a;
  vprime[0] = anchor.slope;
  for (std::size_t j = 1; j < nodes.size(); ++j) {
    w += wp.integrate(nodes[j - 1], nodes[j]);
    vprime[j] = hder(nodes[j]) * w + hval(nodes[j]) * wprime[j];
  }
  return RadialFunction(out_grid, vprime);
}

std::vector<double> bootstrap_schedule(double gamma, double s0) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("bootstrap_schedule: gamma must be in (0, 1)");
  std::vector<double> s{s0};
  while (s.back() > 0.0) {
    double next = plus_part(s.back() - gamma / 2.0);
    if (next < 1e-12 * s0) next = 0.0;  // absorb accumulated round-off
    s.push_back(next);
  }
  return s;
}

}  // namespace flatneck
