#include "flatneck/blowup_lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "flatneck/errors.hpp"
#include "flatneck/harmonics.hpp"

namespace flatneck {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

}  // namespace

std::pair<double, std::array<double, 2>> sup_gradient(const Field2D& grad_field,
                                                      double r_max) {
  const Grid2D& g = *grad_field.grid;
  double best = 0.0;
  std::array<double, 2> where{0.0, 0.0};
  bool any = false;
  for (std::size_t i = 0; i < g.nr(); ++i) {
    if (g.rho()[i] > r_max + 1e-14) break;
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const double v = grad_field.at(i, j);
      if (!any || v > best) {
        any = true;
        best = v;
        where = {g.rho()[i], g.xn(i, j)};
      }
    }
  }
  return {best, where};
}

std::vector<double> make_probe_radii(const ProblemConfig& cfg, int transition,
                                     int flat, double jitter, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> radii;
  const double s_lo = std::sqrt(cfg.epsilon);
  const double s_hi = 0.5;
  for (int m = 0; m < transition; ++m) {
    const double f = transition == 1 ? 0.0 : static_cast<double>(m) / (transition - 1);
    double s = std::exp(std::log(s_lo) + f * (std::log(s_hi) - std::log(s_lo)));
    if (jitter > 0.0) s *= std::exp(jitter * u(rng));
    radii.push_back(cfg.r0 + s);
  }
  if (cfg.r0 > 0.0) {
    for (int m = 0; m < flat; ++m) {
      const double f = flat == 1 ? 0.5 : static_cast<double>(m) / (flat - 1);
      radii.push_back(cfg.r0 * (0.1 + 0.8 * f));
    }
  }
  return radii;
}

double oscillation_ratio(const Field2D& field, const Field2D& grad_field,
                         const std::vector<double>& probe_radii,
                         int* skipped_out) {
  const Grid2D& g = *field.grid;
  const ProblemConfig& cfg = g.config();
  const Profile& prof = g.profile();
  const auto& rho = g.rho();
  const int k = cfg.mode_k;
  const double max_y = harmonics::max_abs_basis(k, cfg.n);
  const double max_dy = harmonics::max_abs_basis_gradient(k, cfg.n);

  // angular factor of the mode at angle theta (n = 3); n = 2 handled by sign
  auto angular = [&](double theta) -> double {
    if (cfg.n != 3) return 1.0;
    if (k == 0) return 1.0;
    const double kt = k * theta;
    return cfg.mode_i == 1 ? std::cos(kt) : std::sin(kt);
  };
  const double theta_peak =
      (cfg.n == 3 && k >= 1)
          ? (cfg.mode_i == 1 ? 0.0 : std::numbers::pi / (2.0 * k))
          : 0.0;

  double best = 0.0;
  int skipped = 0;
  for (double rx_raw : probe_radii) {
    // snap the probe to the nearest node radius; midline y_n = 0 row
    std::size_t ip = 0;
    double dmin = 1e300;
    for (std::size_t i = 0; i < g.nr(); ++i) {
      const double d = std::abs(rho[i] - rx_raw);
      if (d < dmin) { dmin = d; ip = i; }
    }
    const double rx = rho[ip];
    const double kap = prof.kappa(rx);
    const double eta = 0.25 * std::sqrt(kap);
    if (rx + eta > 1.0) {  // cylinder exits the lateral boundary
      ++skipped;
      continue;
    }

    std::size_t jp = 0;
    double dy = 1e300;
    for (std::size_t j = 0; j < g.nz(); ++j)
      if (std::abs(g.yn()[j]) < dy) { dy = std::abs(g.yn()[j]); jp = j; }

    // two angle placements: mode peak (planar gradient) and derivative peak
    GradParts parts = gradient_parts(field, ip, jp);
    std::vector<std::pair<double, double>> placements;  // (theta0, |Du|)
    placements.emplace_back(theta_peak, parts.planar * max_y);
    if (cfg.n == 3 && k >= 1)
      placements.emplace_back(theta_peak + std::numbers::pi / (2.0 * k),
                              parts.angular * max_dy);

    // the cylinder radius eta can fall below the local node spacing, so the
    // field is sub-sampled in rho by row-wise linear interpolation
    const int n_sub = 25;
    const double slo = std::max(0.0, rx - eta), shi = std::min(1.0, rx + eta);
    for (const auto& [theta0, du] : placements) {
      double lo = 1e300, hi = -1e300;
      for (int ms = 0; ms < n_sub; ++ms) {
        const double rs = slo + (shi - slo) * ms / (n_sub - 1);
        // bracketing interval and row values
        std::size_t il = 0;
        while (il + 2 < g.nr() && rho[il + 1] <= rs) ++il;
        const double t = (rs - rho[il]) / (rho[il + 1] - rho[il]);
        double wlo = 1e300, whi = -1e300;
        for (std::size_t j = 0; j < g.nz(); ++j) {
          const double w = (1.0 - t) * field.at(il, j) + t * field.at(il + 1, j);
          wlo = std::min(wlo, w);
          whi = std::max(whi, w);
        }
        if (cfg.n == 2) {
          const double yv = max_y;
          if (std::abs(rs - rx) < eta) {
            lo = std::min(lo, std::min(wlo * yv, whi * yv));
            hi = std::max(hi, std::max(wlo * yv, whi * yv));
          }
          if (std::abs(-rs - rx) < eta) {
            const double ym = (k == 0 ? max_y : -max_y);
            lo = std::min(lo, std::min(wlo * ym, whi * ym));
            hi = std::max(hi, std::max(wlo * ym, whi * ym));
          }
          continue;
        }
        // angular half-width of the disc slice at radius rs
        double half;
        if (rs + rx < eta || rs == 0.0) {
          half = std::numbers::pi;
        } else {
          const double c = (rs * rs + rx * rx - eta * eta) / (2.0 * rs * rx);
          half = std::acos(clamp(c, -1.0, 1.0));
        }
        const int nth = 9;
        for (int q = 0; q < nth; ++q) {
          const double th = theta0 - half + 2.0 * half * q / (nth - 1);
          const double yv = angular(th) * max_y;
          lo = std::min(lo, std::min(wlo * yv, whi * yv));
          hi = std::max(hi, std::max(wlo * yv, whi * yv));
        }
      }
      const double osc = hi > lo ? hi - lo : 0.0;
      if (osc < 1e-14 && du < 1e-14) continue;  // reported as 0: skip
      best = std::max(best, du * std::sqrt(kap) / osc);
    }
  }
  (void)grad_field;
  if (skipped_out) *skipped_out = skipped;
  return best;
}

SolveArtifacts run_single(const ExperimentConfig& base, double epsilon) {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = base;
  cfg.problem.epsilon = epsilon;
  cfg.problem.validate();

  auto grid = Grid2D::build(cfg.problem, cfg.grid.radial_nodes,
                            cfg.grid.vertical_intervals, cfg.grid.grading_beta);
  SolveReport rep;
  Field2D field = assemble_and_solve_mode(grid, cfg.make_boundary(), &rep);
  Field2D grad = gradient_field(field);

  SolveArtifacts out{std::move(field), std::move(grad), SweepRecord{}};
  const auto [sup, where] = sup_gradient(out.grad, 0.75);
  const std::vector<double> probes =
      make_probe_radii(cfg.problem, cfg.probes.transition, cfg.probes.flat,
                       cfg.probes.jitter, cfg.seed);
  const auto [s1, s2] = derivative_bound_stats(out.field);

  out.record.epsilon = epsilon;
  out.record.sup_grad = sup;
  out.record.r_star = where[0];
  out.record.xn_star = where[1];
  int skipped = 0;
  out.record.osc_ratio = oscillation_ratio(out.field, out.grad, probes, &skipped);
  if (skipped > 0)
    std::fprintf(stderr,
                 "warning: %d probe cylinder(s) exit the domain at eps = %g; skipped\n",
                 skipped, epsilon);
  out.record.residual = rep.residual;
  out.record.unknowns = rep.unknowns;
  out.record.dyprime_stat = s1;
  out.record.dn_stat = s2;
  out.record.wall_ms = ms_since(t0);
  return out;
}

SweepResult sweep(const ExperimentConfig& cfg, const std::vector<double>& epsilons) {
  if (epsilons.empty()) throw std::invalid_argument("sweep: empty epsilon list");
  for (double e : epsilons)
    if (!(e > 0.0 && e < 0.25))
      throw std::invalid_argument("sweep: epsilon must be in (0, 1/4)");
  for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
    if (!(epsilons[i] > epsilons[i + 1]))
      throw std::invalid_argument("sweep: epsilons must be strictly decreasing");

  const std::size_t n = epsilons.size();
  std::vector<SweepRecord> records(n);
  std::vector<std::string> errors(n);
  std::vector<char> ok(n, 0);

  unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                               : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(n));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        records[i] = run_single(cfg, epsilons[i]).record;
        ok[i] = 1;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok[i]) {
      out.failed = true;
      out.fail_reason = "epsilon " + std::to_string(epsilons[i]) + ": " + errors[i];
      break;
    }
    out.records.push_back(records[i]);
  }
  return out;
}

FitResult fit_exponent(const std::vector<SweepRecord>& records) {
  if (records.size() < 3)
    throw std::invalid_argument("fit_exponent: need >= 3 records");
  std::vector<double> x, y;
  for (const SweepRecord& r : records) {
    if (!(r.sup_grad > 0.0))
      throw std::invalid_argument("fit_exponent: sup_grad must be positive");
    x.push_back(std::log(1.0 / r.epsilon));
    y.push_back(std::log(r.sup_grad));
  }
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_exponent: degenerate epsilon list");

  FitResult fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss_res = 0.0;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.exponent * x[i]);
    ss_res += fit.residuals[i] * fit.residuals[i];
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace flatneck
