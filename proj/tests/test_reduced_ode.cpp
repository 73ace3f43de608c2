#include <doctest.h>

#include <cmath>
#include <numbers>

#include "flatneck/reduced_ode.hpp"

using namespace flatneck;

namespace {

ProblemConfig cfg_nk(int n, int k, double eps = 0.01, double r0 = 0.25) {
  ProblemConfig cfg;
  cfg.n = n;
  cfg.mode_k = k;
  cfg.epsilon = eps;
  cfg.r0 = r0;
  return cfg;
}

RadialGrid ode_grid(const ProblemConfig& cfg, int count = 500) {
  RadialGridSpec s;
  s.r_min = cfg.r0 > 0.0 ? std::min(1e-4, cfg.r0 / 256.0) : 1e-5;
  s.r0 = cfg.r0;
  s.epsilon = cfg.epsilon;
  s.count = count;
  return RadialGrid::graded(s);
}

}  // namespace

TEST_CASE("drift values") {
  // flat zone: (n-2)/r only
  CHECK(drift(cfg_nk(3, 1), 0.2) == doctest::Approx(5.0).epsilon(1e-15));
  // direct substitution beyond the cap
  CHECK(drift(cfg_nk(3, 1), 0.5) ==
        doctest::Approx(8.8965517241379306).epsilon(1e-14));
  // n = 2 in the flat zone
  CHECK(drift(cfg_nk(2, 1), 0.2) == 0.0);
  CHECK_THROWS_AS(drift(cfg_nk(3, 1), 0.0), std::domain_error);
  CHECK_THROWS_AS(drift(cfg_nk(3, 1), -0.5), std::domain_error);
}

TEST_CASE("log integrating factor closed form") {
  const ProblemConfig cfg = cfg_nk(3, 1);
  CHECK(log_integrating_factor(cfg, 0.125) == 0.0);  // empty integral
  // log 4 + log 7.25 = log 29
  CHECK(log_integrating_factor(cfg, 0.5) ==
        doctest::Approx(std::log(29.0)).epsilon(1e-14));
  CHECK(std::exp(log_integrating_factor(cfg, 0.5)) ==
        doctest::Approx(29.0).epsilon(1e-12));
  // n = 2: both terms vanish at t = r0
  CHECK(log_integrating_factor(cfg_nk(2, 1), 0.25) == 0.0);
  CHECK_THROWS_AS(log_integrating_factor(cfg, 0.1), std::domain_error);
}

TEST_CASE("general a: drift and integrating factor stay consistent") {
  ProblemConfig cfg = cfg_nk(3, 1);
  cfg.a = 3.0;
  // b = (n-2)/r + kappa'/kappa with kappa = eps + a (r-r0)^2
  const double r = 0.5;
  const double want = 1.0 / r + 2.0 * 3.0 * 0.25 / (0.01 + 3.0 * 0.0625);
  CHECK(drift(cfg, r) == doctest::Approx(want).epsilon(1e-14));
  for (double t : {0.2, 0.5, 0.9}) {
    CHECK(log_integrating_factor_quadrature(cfg, t) ==
          doctest::Approx(log_integrating_factor(cfg, t)).epsilon(1e-9));
  }
}

TEST_CASE("quadrature route matches the closed form") {
  for (const auto& cfg : {cfg_nk(3, 1, 1e-2), cfg_nk(2, 1, 1e-3), cfg_nk(4, 2, 1e-4)}) {
    for (double t : {0.13, 0.25, 0.3, 0.6, 0.99}) {
      const double closed = log_integrating_factor(cfg, t);
      const double quad = log_integrating_factor_quadrature(cfg, t);
      CHECK(std::abs(quad - closed) <= 1e-8 * std::max(1.0, std::abs(closed)));
    }
  }
}

TEST_CASE("integrating factor decay product is eps-free") {
  // exp(-int b) * kappa/eps == (r0/(2r))^{n-2} exactly
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const ProblemConfig cfg = cfg_nk(3, 1, eps);
    for (double r : {0.125, 0.25, 0.5, 1.0}) {
      const double s = std::max(r - cfg.r0, 0.0);
      const double kap = eps + s * s;
      const double prod = std::exp(-log_integrating_factor(cfg, r)) * kap / eps;
      CHECK(prod == doctest::Approx(std::pow(0.125 / r, 1.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("homogeneous solution: boundary value, bounds, inner ratio") {
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {2, 1}}) {
    const ProblemConfig cfg = cfg_nk(n, k, 1e-3);
    const HomogeneousSolution hom = solve_homogeneous(cfg, ode_grid(cfg));
    CHECK(hom.h.values().back() == 1.0);  // h(1) = 1 exactly
    CHECK(hom.bounds_ok);
    CHECK(hom.bound_violation <= 1e-8);
    CHECK(hom.c1_cauchy < 1e-6);
    // inner-zone ratio h / r^k constant
    const auto& xs = hom.h.grid().nodes();
    const auto& vs = hom.h.values();
    double rmin = 1e300, rmax = -1e300;
    for (std::size_t i = 0; i < xs.size() && xs[i] <= cfg.r0 + 1e-14; ++i) {
      const double ratio = vs[i] / std::pow(xs[i], k);
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
      // comparison bound h <= r^k / r0^k
      CHECK(vs[i] <= std::pow(xs[i], k) / std::pow(cfg.r0, k) + 1e-10);
    }
    CHECK((rmax - rmin) / rmax <= 1e-8);
    CHECK(hom.c1 == doctest::Approx(rmax).epsilon(1e-8));
  }
}

TEST_CASE("homogeneous solution: n=2 k=1 is linear on the flat zone") {
  const ProblemConfig cfg = cfg_nk(2, 1, 1e-2);
  const HomogeneousSolution hom = solve_homogeneous(cfg, ode_grid(cfg));
  const auto& xs = hom.h.grid().nodes();
  const auto& vs = hom.h.values();
  for (std::size_t i = 1; i + 1 < xs.size() && xs[i + 1] <= cfg.r0 + 1e-14; ++i) {
    const double hl = xs[i] - xs[i - 1], hr = xs[i + 1] - xs[i];
    const double second = 2.0 * ((vs[i + 1] - vs[i]) / hr - (vs[i] - vs[i - 1]) / hl) /
                          (hl + hr);
    CHECK(std::abs(second) <= 1e-7);
  }
}

TEST_CASE("homogeneous solution: |h'| stays bounded as eps shrinks") {
  double dq_min = 1e300, dq_max = 0.0;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const ProblemConfig cfg = cfg_nk(3, 1, eps);
    const HomogeneousSolution hom = solve_homogeneous(cfg, ode_grid(cfg));
    const auto& xs = hom.h.grid().nodes();
    const auto& vs = hom.h.values();
    double dq = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
      dq = std::max(dq, std::abs(vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1]));
    dq_min = std::min(dq_min, dq);
    dq_max = std::max(dq_max, dq);
  }
  CHECK(dq_max / dq_min < 2.0);
}

TEST_CASE("homogeneous solution: convex control has an arctan closed form") {
  // n = 2, k = 1, r0 = 0: L h = h'' + 2r/(eps+r^2) h' = 0, h(0)=0, h(1)=1
  // => h(r) = atan(r/sqrt(eps)) / atan(1/sqrt(eps))
  const ProblemConfig cfg = cfg_nk(2, 1, 1e-2, 0.0);
  const HomogeneousSolution hom = solve_homogeneous(cfg, ode_grid(cfg, 700));
  const double se = std::sqrt(cfg.epsilon);
  double worst = 0.0;
  for (double r : {0.05, 0.1, 0.3, 0.5, 0.9}) {
    const double exact = std::atan(r / se) / std::atan(1.0 / se);
    worst = std::max(worst, std::abs(hom.h(r) - exact));
  }
  CHECK(worst <= 2e-4);
}

TEST_CASE("solve_homogeneous validates its arguments") {
  const ProblemConfig cfg = cfg_nk(3, 0);
  CHECK_THROWS_AS(solve_homogeneous(cfg, ode_grid(cfg)), std::invalid_argument);
  const ProblemConfig cfg2 = cfg_nk(3, 1);
  CHECK_THROWS_AS(solve_homogeneous(cfg2, ode_grid(cfg2), 0.3), std::invalid_argument);
}

TEST_CASE("reduce_order: zero data and zero anchor give zero") {
  const ProblemConfig cfg = cfg_nk(3, 1);
  const RadialGrid g = ode_grid(cfg);
  const HomogeneousSolution hom = solve_homogeneous(cfg, g);
  const RadialFunction zero = RadialFunction::sample(g, [](double) { return 0.0; });
  const RadialFunction vp = reduce_order_vprime(cfg, hom, zero, zero, OdeAnchor{});
  for (double v : vp.values()) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("reduce_order: k = 0 with zero source is the integrating factor") {
  const ProblemConfig cfg = cfg_nk(3, 0);
  const RadialGrid g = ode_grid(cfg);
  const HomogeneousSolution one = HomogeneousSolution::constant_one(g);
  const RadialFunction zero = RadialFunction::sample(g, [](double) { return 0.0; });
  const double c = 1.7;
  const RadialFunction vp = reduce_order_vprime(cfg, one, zero, zero, OdeAnchor{0.4, c});
  double worst = 0.0;
  for (std::size_t i = 0; i < vp.grid().size(); ++i) {
    const double r = vp.grid()[i];
    const double exact = c * std::exp(-log_integrating_factor(cfg, r));
    worst = std::max(worst, std::abs(vp.values()[i] - exact));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("reduce_order: manufactured V* = (r-r0)_+^2 is recovered") {
  // H* = V*'' + b V*' - lambda V*/r^2 has a jump (V*'') at r0; the natural
  // split keeps that jump inside A' with A = V*', so the sampled inputs
  // stay continuous and the by-parts route never differentiates them.
  const ProblemConfig cfg = cfg_nk(3, 1);
  const double lambda = cfg.mode_eigenvalue();
  const double r0 = cfg.r0;
  auto plus = [r0](double r) { return std::max(r - r0, 0.0); };
  auto b_smooth = [&](double r) {
    return drift(cfg, r) * 2.0 * plus(r) - lambda * plus(r) * plus(r) / (r * r);
  };
  double errs[2], split_gap = 0.0;
  int li = 0;
  for (int count : {300, 600}) {
    const RadialGrid g = ode_grid(cfg, count);
    const HomogeneousSolution hom = solve_homogeneous(cfg, g);
    // split 1: A = V*', B = H* - V*''
    const RadialFunction A1 =
        RadialFunction::sample(g, [&](double r) { return 2.0 * plus(r); });
    const RadialFunction B1 = RadialFunction::sample(g, b_smooth);
    // split 2: shift a smooth q into A and q' out of B
    const RadialFunction A2 = RadialFunction::sample(
        g, [&](double r) { return 2.0 * plus(r) + std::sin(2.0 * r); });
    const RadialFunction B2 = RadialFunction::sample(
        g, [&](double r) { return b_smooth(r) - 2.0 * std::cos(2.0 * r); });
    const OdeAnchor anchor{0.0, 0.0};
    const RadialFunction v1 = reduce_order_vprime(cfg, hom, A1, B1, anchor);
    const RadialFunction v2 = reduce_order_vprime(cfg, hom, A2, B2, anchor);
    double err = 0.0;
    for (std::size_t i = 0; i < v1.grid().size(); ++i) {
      err = std::max(err, std::abs(v1.values()[i] - 2.0 * plus(v1.grid()[i])));
      split_gap = std::max(split_gap,
                           std::abs(v1.values()[i] - v2.values()[i]));
    }
    errs[li++] = err;
  }
  CHECK(errs[1] <= 2e-4);
  CHECK(errs[0] / errs[1] >= 2.5);  // near second order despite the r0 kink
  CHECK(split_gap <= 1e-3);         // the recovered V' is split-invariant
}

TEST_CASE("reduce_order rejects grids that do not cover [r0/2, 1]") {
  const ProblemConfig cfg = cfg_nk(3, 1);
  const RadialGrid bad(std::vector<double>{0.3, 0.6, 1.0});
  const HomogeneousSolution hom = solve_homogeneous(cfg, ode_grid(cfg));
  const RadialFunction z = RadialFunction::sample(bad, [](double) { return 0.0; });
  CHECK_THROWS_AS(reduce_order_vprime(cfg, hom, z, z, OdeAnchor{}), std::domain_error);
}

TEST_CASE("bootstrap schedule") {
  const std::vector<double> s1 = bootstrap_schedule(0.2);
  REQUIRE(s1.size() == 6);
  const double want1[6] = {0.5, 0.4, 0.3, 0.2, 0.1, 0.0};
  for (int i = 0; i < 6; ++i) CHECK(s1[i] == doctest::Approx(want1[i]).epsilon(1e-12));

  const std::vector<double> s2 = bootstrap_schedule(0.5);
  REQUIRE(s2.size() == 3);
  CHECK(s2[1] == doctest::Approx(0.25));
  CHECK(s2[2] == 0.0);

  // gamma close to 1: two applications of the map
  const std::vector<double> s3 = bootstrap_schedule(1.0 - 1e-6);
  REQUIRE(s3.size() == 3);
  CHECK(s3[1] == doctest::Approx(5e-7).epsilon(1e-6));
  CHECK(s3[2] == 0.0);

  // length bound ceil(2 s0 / gamma) + 1
  for (double g : {0.11, 0.33, 0.77}) {
    const auto s = bootstrap_schedule(g);
    CHECK(s.size() <= static_cast<std::size_t>(std::ceil(1.0 / g)) + 1);
  }
  CHECK_THROWS_AS(bootstrap_schedule(0.0), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_schedule(1.0), std::invalid_argument);
}
