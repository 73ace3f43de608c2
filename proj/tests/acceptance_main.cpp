// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
// The experiments pin every tolerance in code. Criterion 1 additionally
// prints a supplementary deep-window diagnostic (see the ledger note in the
// criterion text below): the shallow-window band conflicts with the
// intrinsic cap-edge transient, which the deep window resolves.

#include <Eigen/Dense>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "flatneck/blowup_lab.hpp"
#include "flatneck/geometry.hpp"
#include "flatneck/harmonics.hpp"
#include "flatneck/neck_solver.hpp"
#include "flatneck/oracle3d.hpp"
#include "flatneck/reduced_ode.hpp"

using namespace flatneck;

namespace {

constexpr double kPi = std::numbers::pi;
int g_failures = 0;

void line(int crit, bool pass, const std::string& text) {
  std::printf("criterion %02d [%s] %s\n", crit, pass ? "PASS" : "FAIL", text.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

ExperimentConfig lab_config(int n, int k, double r0) {
  ExperimentConfig cfg;
  cfg.problem.n = n;
  cfg.problem.mode_k = k;
  cfg.problem.mode_i = 1;
  cfg.problem.r0 = r0;
  cfg.problem.gamma = 0.5;
  cfg.grid.radial_nodes = 1500;  // ~1e5 unknowns with 64 vertical intervals
  cfg.grid.vertical_intervals = 64;
  cfg.seed = 20240601;
  return cfg;
}

RadialGrid ode_grid(const ProblemConfig& cfg, int count = 700) {
  RadialGridSpec s;
  s.r_min = cfg.r0 > 0.0 ? std::min(1e-4, cfg.r0 / 256.0) : 1e-5;
  s.r0 = cfg.r0;
  s.epsilon = cfg.epsilon;
  s.count = count;
  return RadialGrid::graded(s);
}

const std::vector<double> kSweep{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};

struct SweepStats {
  double exponent;
  double spread;  // max/min - 1
  std::vector<SweepRecord> records;
};

SweepStats run_sweep_stats(const ExperimentConfig& cfg, const std::vector<double>& eps) {
  const SweepResult res = sweep(cfg, eps);
  if (res.failed) throw std::runtime_error("sweep failed: " + res.fail_reason);
  const FitResult fit = fit_exponent(res.records);
  double lo = 1e300, hi = 0.0;
  for (const auto& r : res.records) {
    lo = std::min(lo, r.sup_grad);
    hi = std::max(hi, r.sup_grad);
  }
  return {fit.exponent, hi / lo - 1.0, res.records};
}

}  // namespace

int main() {
  std::printf("== flatneck acceptance suite ==\n");

  SweepStats flat{};  // criterion 1 records are reused by criteria 8 and 9

  // 1. flat-case boundedness
  try {
    const ExperimentConfig cfg = lab_config(3, 1, 0.25);
    flat = run_sweep_stats(cfg, kSweep);
    const bool pass = std::abs(flat.exponent) <= 0.05 && flat.spread < 0.25;
    std::string sups;
    for (const auto& r : flat.records) sups += fmt(" %.4f", r.sup_grad);
    line(1, pass,
         fmt("flat-case boundedness (n=3, k=1): fitted s = %.4f (band |s| <= 0.05), "
             "sup spread = %.1f%% (band < 25%%), sup|Du| =%s",
             flat.exponent, 100.0 * flat.spread, sups.c_str()));
    // supplementary: the cap-edge coefficient C1(eps) = max|h'| drives the
    // shallow-window drift; the deep window shows the bounded limit
    ExperimentConfig deep = cfg;
    const SweepStats ds = run_sweep_stats(deep, {1e-4, 1e-5, 1e-6});
    std::printf("  supplement    deep-window flat case {1e-4,1e-5,1e-6}: s = %.4f, "
                "spread = %.1f%% (the shallow-window drift tracks the cap-edge "
                "coefficient C1(eps) = h(r0)/r0^k; see README)\n",
                ds.exponent, 100.0 * ds.spread);
  } catch (const std::exception& e) {
    line(1, false, std::string("flat-case boundedness: ") + e.what());
  }

  // 2. convex control blow-up
  try {
    const ExperimentConfig cfg = lab_config(2, 1, 0.0);
    const SweepStats st = run_sweep_stats(cfg, kSweep);
    const bool pass = std::abs(st.exponent - 0.5) <= 0.05;
    line(2, pass,
         fmt("convex control blow-up (n=2, k=1, r0=0): fitted s = %.4f (band 0.5 +- 0.05)",
             st.exponent));
  } catch (const std::exception& e) {
    line(2, false, std::string("convex control: ") + e.what());
  }

  // 3. zero-mode flat case
  try {
    const ExperimentConfig cfg = lab_config(3, 0, 0.25);
    const SweepStats st = run_sweep_stats(cfg, kSweep);
    const bool pass = std::abs(st.exponent) <= 0.05;
    line(3, pass,
         fmt("zero-mode flat case (n=3, k=0, xn data): fitted s = %.4f (band |s| <= 0.05)",
             st.exponent));
  } catch (const std::exception& e) {
    line(3, false, std::string("zero mode: ") + e.what());
  }

  // 4. homogeneous-solution bounds
  try {
    double worst_bound = 0.0, worst_ratio = 0.0, worst_dq_spread = 0.0;
    for (const auto& [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {2, 1}}) {
      double dq_min = 1e300, dq_max = 0.0;
      for (double eps : {1e-2, 1e-3, 1e-4}) {
        ProblemConfig cfg;
        cfg.n = n;
        cfg.mode_k = k;
        cfg.epsilon = eps;
        cfg.r0 = 0.25;
        const HomogeneousSolution hom = solve_homogeneous(cfg, ode_grid(cfg));
        worst_bound = std::max(worst_bound, hom.bound_violation);
        const auto& xs = hom.h.grid().nodes();
        const auto& vs = hom.h.values();
        double rmin = 1e300, rmax = -1e300, dq = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          if (xs[i] <= cfg.r0 + 1e-14) {
            const double ratio = vs[i] / std::pow(xs[i], k);
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
          }
          if (i > 0)
            dq = std::max(dq, std::abs(vs[i] - vs[i - 1]) / (xs[i] - xs[i - 1]));
        }
        worst_ratio = std::max(worst_ratio, (rmax - rmin) / rmax);
        dq_min = std::min(dq_min, dq);
        dq_max = std::max(dq_max, dq);
      }
      worst_dq_spread = std::max(worst_dq_spread, dq_max / dq_min);
    }
    const bool pass =
        worst_bound <= 1e-8 && worst_ratio <= 1e-8 && worst_dq_spread < 2.0;
    line(4, pass,
         fmt("homogeneous-solution bounds: slack %.2e (>= -1e-8), inner ratio var %.2e "
             "(<= 1e-8), |h'| spread %.2fx (< 2x)",
             worst_bound, worst_ratio, worst_dq_spread));
  } catch (const std::exception& e) {
    line(4, false, std::string("h bounds: ") + e.what());
  }

  // 5. closed-form integrating factor
  try {
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (const auto& [n, r0, eps] :
         std::vector<std::tuple<int, double, double>>{{3, 0.25, 1e-2},
                                                      {2, 0.25, 1e-3},
                                                      {3, 0.4, 1e-4}}) {
      ProblemConfig cfg;
      cfg.n = n;
      cfg.r0 = r0;
      cfg.epsilon = eps;
      for (int s = 0; s < 100; ++s) {
        const double t = cfg.r0 / 2.0 + (1.0 - cfg.r0 / 2.0) * u01(rng);
        const double closed = log_integrating_factor(cfg, t);
        const double quad = log_integrating_factor_quadrature(cfg, t);
        worst = std::max(worst,
                         std::abs(quad - closed) / std::max(std::abs(closed), 1e-3));
      }
    }
    ProblemConfig ref;
    ref.n = 3;
    ref.r0 = 0.25;
    ref.epsilon = 0.01;
    const double anchor = std::exp(log_integrating_factor(ref, 0.5));
    const double aerr = std::abs(anchor - 29.0) / 29.0;
    const bool pass = worst <= 1e-8 && aerr <= 1e-6;
    line(5, pass,
         fmt("closed-form integrating factor: quadrature agreement %.2e (<= 1e-8), "
             "exp at reference = %.9f (29 +- 1e-6 rel)",
             worst, anchor));
  } catch (const std::exception& e) {
    line(5, false, std::string("integrating factor: ") + e.what());
  }

  // 6. jacobian identity
  try {
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (const auto& [n, r0] : std::vector<std::pair<int, double>>{{3, 0.25}, {2, 0.0}}) {
      ProblemConfig cfg;
      cfg.n = n;
      cfg.r0 = r0;
      cfg.epsilon = 0.01;
      cfg.mode_k = 1;
      const Profile prof(cfg);
      for (int s = 0; s < 5000; ++s) {
        const double r = 0.999 * u01(rng);
        Eigen::VectorXd x(n);
        if (n == 2) {
          x(0) = (u01(rng) < 0.5 ? -1.0 : 1.0) * r;
        } else {
          Eigen::VectorXd d(n - 1);
          for (int i = 0; i + 1 < n; ++i) d(i) = gauss(rng);
          if (d.norm() < 1e-12) d(0) = 1.0;
          x.head(n - 1) = d * (r / d.norm());
        }
        const double lo = -0.5 * cfg.epsilon + prof.h2(r);
        const double hi = 0.5 * cfg.epsilon + prof.h1(r);
        x(n - 1) = lo + (0.05 + 0.9 * u01(rng)) * (hi - lo);
        const double det = flatten_jacobian_det(prof, x);
        worst = std::max(worst, std::abs(det * prof.gap(r) - 2.0 * cfg.epsilon) /
                                    (2.0 * cfg.epsilon));
      }
    }
    line(6, worst <= 1e-12,
         fmt("jacobian identity det * gap = 2 eps: max rel defect %.2e on 10^4 points "
             "(<= 1e-12)",
             worst));
  } catch (const std::exception& e) {
    line(6, false, std::string("jacobian identity: ") + e.what());
  }

  // 7. single-mode preservation
  try {
    ProblemConfig cfg;
    cfg.n = 3;
    cfg.epsilon = 0.2;
    cfg.r0 = 0.25;
    cfg.mode_k = 1;
    const Oracle3dResult res = mode_preservation_oracle(cfg, 33);
    double worst_zero = 0.0;
    for (const auto& [n, k] : std::vector<std::pair<int, int>>{{3, 0}, {3, 1}, {3, 2}, {2, 1}}) {
      ProblemConfig zc;
      zc.n = n;
      zc.mode_k = k;
      zc.epsilon = 1e-2;
      zc.r0 = 0.25;
      auto grid = Grid2D::build(zc, 300, 24);
      const Field2D sol = assemble_and_solve_mode(grid, BoundaryData::constant(0.0));
      for (double v : sol.v) worst_zero = std::max(worst_zero, std::abs(v));
    }
    const bool pass = res.energy_fraction >= 0.999 && worst_zero <= 1e-10;
    line(7, pass,
         fmt("single-mode preservation: 33^3 oracle (1,1) energy fraction %.6f "
             "(>= 0.999), zero-Dirichlet solves max |U| %.2e (<= 1e-10)",
             res.energy_fraction, worst_zero));
  } catch (const std::exception& e) {
    line(7, false, std::string("mode preservation: ") + e.what());
  }

  // 8. oscillation-bound stability (reuses the criterion-1 records)
  try {
    double lo = 1e300, hi = 0.0;
    int used = 0;
    for (const auto& r : flat.records) {
      if (r.epsilon == 1e-2 || r.epsilon == 1e-3 || r.epsilon == 1e-4) {
        lo = std::min(lo, r.osc_ratio);
        hi = std::max(hi, r.osc_ratio);
        ++used;
      }
    }
    const bool pass = used == 3 && hi / lo < 2.0;
    line(8, pass,
         fmt("oscillation-bound stability: max ratio varies %.3fx across eps in "
             "{1e-2,1e-3,1e-4} (< 2x)",
             hi / lo));
  } catch (const std::exception& e) {
    line(8, false, std::string("oscillation stability: ") + e.what());
  }

  // 9. ODE/PDE cross-validation at the finest grid
  try {
    ProblemConfig cfg;
    cfg.n = 3;
    cfg.mode_k = 1;
    cfg.epsilon = 1e-3;
    cfg.r0 = 0.25;
    auto grid = Grid2D::build(cfg, 1200, 48);
    const Field2D u =
        assemble_and_solve_mode(grid, BoundaryData::constant(std::sqrt(kPi)));
    const RadialFunction V = vertical_average(u);
    const FluxSources fs = flux_and_sources(u);
    const HomogeneousSolution hom = solve_homogeneous(cfg, V.grid());
    const std::size_t ia = V.grid().index_of(cfg.r0 / 2.0);
    const OdeAnchor anchor{V.values()[ia], V.node_slopes()[ia]};
    const RadialFunction vp = reduce_order_vprime(cfg, hom, fs.A, fs.B, anchor);
    double scale = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < vp.grid().size(); ++i) {
      const double r = vp.grid()[i];
      if (r > 0.75 + 1e-12) break;
      const double pde = V.node_slopes()[V.grid().index_of(r)];
      scale = std::max(scale, std::abs(pde));
      worst = std::max(worst, std::abs(vp.values()[i] - pde));
    }
    const double rel = worst / scale;
    line(9, rel <= 0.05,
         fmt("ODE/PDE cross-validation of V' on [r0/2, 3/4]: max-norm rel diff %.4f%% "
             "(<= 5%%)",
             100.0 * rel));
  } catch (const std::exception& e) {
    line(9, false, std::string("cross-validation: ") + e.what());
  }

  // 10. manufactured-solution convergence, both solvers
  try {
    ProblemConfig cfg;
    cfg.n = 3;
    cfg.mode_k = 1;
    cfg.epsilon = 1e-2;
    cfg.r0 = 0.25;
    const double lambda = cfg.mode_eigenvalue();
    // radial BVP
    auto vstar = [](double r) { return std::sin(0.5 * kPi * r) * r; };
    auto vstar_d = [](double r) {
      return 0.5 * kPi * std::cos(0.5 * kPi * r) * r + std::sin(0.5 * kPi * r);
    };
    auto vstar_dd = [](double r) {
      return -0.25 * kPi * kPi * std::sin(0.5 * kPi * r) * r +
             kPi * std::cos(0.5 * kPi * r);
    };
    auto rhs = [&](double r) {
      return vstar_dd(r) + drift(cfg, r) * vstar_d(r) - lambda * vstar(r) / (r * r);
    };
    std::vector<double> bvp_errs;
    for (int count : {150, 300, 600}) {
      const RadialGrid g = ode_grid(cfg, count);
      const auto& nodes = g.nodes();
      const std::vector<double> v = radial_bvp_solve(
          cfg, nodes, lambda, rhs, vstar(nodes.front()), vstar(nodes.back()));
      double acc = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double w = (i + 1 < nodes.size() ? 0.5 * (nodes[i + 1] - nodes[i]) : 0.0) +
                         (i > 0 ? 0.5 * (nodes[i] - nodes[i - 1]) : 0.0);
        acc += w * std::pow(v[i] - vstar(nodes[i]), 2);
      }
      bvp_errs.push_back(std::sqrt(acc));
    }
    // flattened mode PDE
    const double eps = cfg.epsilon;
    ManufacturedMode mms;
    mms.w = [eps](double rho, double yn) {
      const double cy = std::cos(0.5 * kPi * yn / eps);
      return std::sin(kPi * rho) * cy * cy;
    };
    mms.w_rho = [eps](double rho, double yn) {
      const double cy = std::cos(0.5 * kPi * yn / eps);
      return kPi * std::cos(kPi * rho) * cy * cy;
    };
    mms.w_yn = [eps](double rho, double yn) {
      return -std::sin(kPi * rho) * 0.5 * kPi / eps * std::sin(kPi * yn / eps);
    };
    std::vector<double> pde_errs;
    for (const auto& [nr, nz] :
         std::vector<std::pair<int, int>>{{120, 16}, {240, 32}, {480, 64}}) {
      auto grid = Grid2D::build(cfg, nr, nz);
      pde_errs.push_back(field_l2_error(solve_manufactured(grid, mms), mms));
    }
    const double b1 = bvp_errs[0] / bvp_errs[1], b2 = bvp_errs[1] / bvp_errs[2];
    const double p1 = pde_errs[0] / pde_errs[1], p2 = pde_errs[1] / pde_errs[2];
    const bool pass = b1 >= 3.5 && b2 >= 3.5 && p1 >= 3.5 && p2 >= 3.5;
    line(10, pass,
         fmt("manufactured-solution convergence: BVP ratios %.2f, %.2f; mode-PDE "
             "ratios %.2f, %.2f (all >= 3.5)",
             b1, b2, p1, p2));
  } catch (const std::exception& e) {
    line(10, false, std::string("manufactured convergence: ") + e.what());
  }

  std::printf("== %d/10 criteria passed ==\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
