#include "flatneck/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <stdexcept>

namespace flatneck {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + where + it.key() + "'");
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"schema_version", "problem", "grid", "boundary", "sweep",
                     "probes", "ode", "oracles", "output", "seed", "jobs"},
                 "");
  take(j, "schema_version", c.schema_version);
  if (c.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version");

  if (j.contains("problem")) {
    const json& p = j.at("problem");
    reject_unknown(p, {"n", "epsilon", "a", "r0", "gamma", "mode_k", "mode_i",
                       "remainder_c"},
                   "problem.");
    take(p, "n", c.problem.n);
    take(p, "epsilon", c.problem.epsilon);
    take(p, "a", c.problem.a);
    take(p, "r0", c.problem.r0);
    take(p, "gamma", c.problem.gamma);
    take(p, "mode_k", c.problem.mode_k);
    take(p, "mode_i", c.problem.mode_i);
    take(p, "remainder_c", c.problem.remainder_c);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, {"radial_nodes", "vertical_intervals", "grading_beta"}, "grid.");
    take(g, "radial_nodes", c.grid.radial_nodes);
    take(g, "vertical_intervals", c.grid.vertical_intervals);
    take(g, "grading_beta", c.grid.grading_beta);
  }
  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    reject_unknown(b, {"kind", "value"}, "boundary.");
    take(b, "kind", c.boundary.kind);
    take(b, "value", c.boundary.value);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"epsilons"}, "sweep.");
    take(s, "epsilons", c.sweep_epsilons);
  }
  if (j.contains("probes")) {
    const json& p = j.at("probes");
    reject_unknown(p, {"transition", "flat", "jitter"}, "probes.");
    take(p, "transition", c.probes.transition);
    take(p, "flat", c.probes.flat);
    take(p, "jitter", c.probes.jitter);
  }
  if (j.contains("ode")) {
    const json& o = j.at("ode");
    reject_unknown(o, {"a_cut"}, "ode.");
    take(o, "a_cut", c.ode_a_cut);
  }
  if (j.contains("oracles")) {
    const json& o = j.at("oracles");
    reject_unknown(o, {"mode_preservation_3d", "manufactured"}, "oracles.");
    take(o, "mode_preservation_3d", c.oracles.mode_preservation_3d);
    take(o, "manufactured", c.oracles.manufactured);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"dir"}, "output.");
    take(o, "dir", c.output_dir);
  }
  take(j, "seed", c.seed);
  take(j, "jobs", c.jobs);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + std::string(e.what()));
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["problem"] = {{"n", problem.n},           {"epsilon", problem.epsilon},
                  {"a", problem.a},           {"r0", problem.r0},
                  {"gamma", problem.gamma},   {"mode_k", problem.mode_k},
                  {"mode_i", problem.mode_i}, {"remainder_c", problem.remainder_c}};
  j["grid"] = {{"radial_nodes", grid.radial_nodes},
               {"vertical_intervals", grid.vertical_intervals},
               {"grading_beta", grid.grading_beta}};
  j["boundary"] = {{"kind", boundary.kind}, {"value", boundary.value}};
  j["sweep"] = {{"epsilons", sweep_epsilons}};
  j["probes"] = {{"transition", probes.transition},
                 {"flat", probes.flat},
                 {"jitter", probes.jitter}};
  j["ode"] = {{"a_cut", ode_a_cut}};
  j["oracles"] = {{"mode_preservation_3d", oracles.mode_preservation_3d},
                  {"manufactured", oracles.manufactured}};
  j["output"] = {{"dir", output_dir}};
  j["seed"] = seed;
  j["jobs"] = jobs;
  return j;
}

void ExperimentConfig::validate() const {
  problem.validate();
  if (grid.radial_nodes < 32 || grid.radial_nodes > 200000)
    throw std::invalid_argument("config: grid.radial_nodes out of range [32, 2e5]");
  if (grid.vertical_intervals < 15 || grid.vertical_intervals > 4096)
    throw std::invalid_argument("config: grid.vertical_intervals out of range [15, 4096]");
  if (!(grid.grading_beta > 0.0 && grid.grading_beta <= 1.0))
    throw std::invalid_argument("config: grid.grading_beta out of range (0, 1]");
  if (boundary.kind != "auto" && boundary.kind != "mode_x1" &&
      boundary.kind != "mode_xn" && boundary.kind != "constant")
    throw std::invalid_argument("config: boundary.kind must be auto|mode_x1|mode_xn|constant");
  if (!std::isfinite(boundary.value))
    throw std::invalid_argument("config: boundary.value must be finite");
  if (!sweep_epsilons.empty()) {
    for (double e : sweep_epsilons)
      if (!(e > 0.0 && e < 0.25))
        throw std::invalid_argument("config: sweep epsilon must be < 1/4 and positive");
    for (std::size_t i = 0; i + 1 < sweep_epsilons.size(); ++i) {
      if (sweep_epsilons[i] == sweep_epsilons[i + 1])
        throw std::invalid_argument("config: duplicate sweep epsilon values");
      if (sweep_epsilons[i] < sweep_epsilons[i + 1])
        throw std::invalid_argument("config: sweep epsilons must be strictly decreasing");
    }
  }
  if (probes.transition < 1 || probes.transition > 4096 || probes.flat < 0 ||
      probes.flat > 4096)
    throw std::invalid_argument("config: probe counts out of range");
  if (!(probes.jitter >= 0.0 && probes.jitter <= 0.5))
    throw std::invalid_argument("config: probes.jitter out of range [0, 0.5]");
  if (ode_a_cut < 0.0 || (problem.r0 > 0.0 && ode_a_cut >= problem.r0) ||
      (problem.r0 == 0.0 && ode_a_cut >= 1e-3))
    throw std::invalid_argument("config: ode.a_cut out of range");
  if (jobs < 0 || jobs > 1024)
    throw std::invalid_argument("config: jobs out of range [0, 1024]");
}

BoundaryData ExperimentConfig::make_boundary() const {
  std::string kind = boundary.kind;
  if (kind == "auto") kind = problem.mode_k == 0 ? "mode_xn" : "mode_x1";

  if (kind == "constant") return BoundaryData::constant(boundary.value);
  if (kind == "mode_x1") {
    // mode coefficient of the degree-k harmonic polynomial trace at rho = 1
    const double c = problem.n == 2 ? std::numbers::sqrt2
                                    : std::sqrt(std::numbers::pi);
    return BoundaryData::constant(c);
  }
  // mode_xn: vertical background field, zero-mode data depending on x_n
  const double c = problem.n == 2 ? std::numbers::sqrt2
                                  : std::sqrt(2.0 * std::numbers::pi);
  return BoundaryData{[c](double xn) { return c * xn; }, BoundaryData::Axis::automatic};
}

std::string ExperimentConfig::resolved_output_dir() const {
  if (const char* env = std::getenv("FLATNECK_OUTDIR"); env && *env)
    return std::string(env);
  return output_dir;
}

}  // namespace flatneck
