#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "flatneck/experiment.hpp"
#include "flatneck/neck_solver.hpp"

namespace flatneck {

// One epsilon measurement of a sweep.
struct SweepRecord {
  double epsilon = 0.0;
  double sup_grad = 0.0;
  double r_star = 0.0;   // argmax radius (physical)
  double xn_star = 0.0;  // argmax vertical coordinate (physical)
  double osc_ratio = 0.0;
  double residual = 0.0;
  std::size_t unknowns = 0;
  double wall_ms = 0.0;
  // eps-stability diagnostics of the chart derivative bounds
  double dyprime_stat = 0.0;
  double dn_stat = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  bool failed = false;
  std::string fail_reason;
};

struct FitResult {
  double exponent = 0.0;   // slope of log sup_grad vs log(1/eps)
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> residuals;
};

// Max nodal |Du| over the neck restricted to r <= r_max, with its location
// in physical coordinates.
std::pair<double, std::array<double, 2>> sup_gradient(const Field2D& grad_field,
                                                      double r_max = 0.75);

// Probe radii for the oscillation check: log-spaced in (r - r0)_+ between
// sqrt(eps) and 1/2, plus flat-zone points; optional seeded jitter.
std::vector<double> make_probe_radii(const ProblemConfig& cfg, int transition,
                                     int flat, double jitter, std::uint64_t seed);

// Max over probes of |Du(x)| (eps + (r-r0)_+^2)^{1/2} / osc over the discrete
// cylinder of radius eta = (eps + (r-r0)_+^2)^{1/2}/4 around the probe.
// Probes whose cylinder exits the domain are skipped (counted through
// skipped_out when given). Ratio convention: 0 when both osc and |Du| are
// below 1e-14.
double oscillation_ratio(const Field2D& field, const Field2D& grad_field,
                         const std::vector<double>& probe_radii,
                         int* skipped_out = nullptr);

// One solve per epsilon (strictly decreasing list), records in input order,
// deterministic for a fixed config; items run on a worker pool.
SweepResult sweep(const ExperimentConfig& cfg, const std::vector<double>& epsilons);

// Ordinary least squares of log(sup_grad) against log(1/eps).
FitResult fit_exponent(const std::vector<SweepRecord>& records);

// Single solve producing the record plus the fields (shared by solve/sweep).
struct SolveArtifacts {
  Field2D field;
  Field2D grad;
  SweepRecord record;
};
SolveArtifacts run_single(const ExperimentConfig& cfg, double epsilon);

}  // namespace flatneck
