#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatneck/grid2d.hpp"
#include "flatneck/problem.hpp"

namespace flatneck {

struct GridParams {
  int radial_nodes = 1200;
  int vertical_intervals = 48;
  double grading_beta = 0.10;
};

// Lateral Dirichlet data selection. "auto" picks the uniform-background-field
// analogue for the mode: the degree-k harmonic polynomial trace for k >= 1
// (constant at rho = 1) and the vertical coordinate for k = 0.
struct BoundaryParams {
  std::string kind = "auto";  // auto | mode_x1 | mode_xn | constant
  double value = 1.0;         // used by "constant"
};

struct ProbeParams {
  int transition = 32;
  int flat = 8;
  double jitter = 0.0;  // relative log-space jitter, seeded
};

struct OracleParams {
  bool mode_preservation_3d = false;
  bool manufactured = false;
};

struct ExperimentConfig {
  int schema_version = 1;
  ProblemConfig problem;
  GridParams grid;
  BoundaryParams boundary;
  std::vector<double> sweep_epsilons;
  ProbeParams probes;
  double ode_a_cut = 0.0;  // 0 -> solver default r0/16
  OracleParams oracles;
  std::string output_dir = "out";
  std::uint64_t seed = 20240601;
  int jobs = 0;  // 0 -> hardware parallelism

  // Strict parsers: unknown keys are rejected with the offending path named.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_json_file(const std::string& path);
  nlohmann::json to_json() const;

  void validate() const;  // ranges plus sweep-list rules

  // Lateral boundary data for the configured mode.
  BoundaryData make_boundary() const;

  // Output directory after the FLATNECK_OUTDIR environment override.
  std::string resolved_output_dir() const;
};

}  // namespace flatneck
