// flatneck command line: solve | sweep | ode | verify
//
// exit codes: 0 success, 1 verification failures, 2 bad usage/config,
// 3 solver failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "flatneck/blowup_lab.hpp"
#include "flatneck/errors.hpp"
#include "flatneck/experiment.hpp"
#include "flatneck/io.hpp"
#include "flatneck/neck_solver.hpp"
#include "flatneck/oracle3d.hpp"
#include "flatneck/reduced_ode.hpp"
#include "flatneck/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CliOptions {
  std::string config_path;
  std::string out_override;
  int jobs = -1;
  std::string inject;
};

flatneck::ExperimentConfig load_config(const CliOptions& opt) {
  flatneck::ExperimentConfig cfg =
      flatneck::ExperimentConfig::from_json_file(opt.config_path);
  if (!opt.out_override.empty()) cfg.output_dir = opt.out_override;
  if (opt.jobs >= 0) cfg.jobs = opt.jobs;
  return cfg;
}

fs::path ensure_outdir(const flatneck::ExperimentConfig& cfg) {
  const fs::path dir = cfg.resolved_output_dir();
  fs::create_directories(dir);
  return dir;
}

int cmd_solve(const CliOptions& opt) {
  const flatneck::ExperimentConfig cfg = load_config(opt);
  const fs::path dir = ensure_outdir(cfg);

  flatneck::SolveArtifacts art = flatneck::run_single(cfg, cfg.problem.epsilon);
  flatneck::write_field_csv((dir / "field.csv").string(), art.field);
  flatneck::write_field_csv((dir / "gradient.csv").string(), art.grad,
                            flatneck::FieldChart::physical);
  flatneck::write_field_binary((dir / "field.bin").string(), art.field);

  json summary{{"schema_version", 1},
               {"kind", "solve_summary"},
               {"config", cfg.to_json()},
               {"record", flatneck::sweep_record_json(art.record)},
               {"sup_grad", art.record.sup_grad},
               {"control_case", cfg.problem.convex_control()}};
  if (cfg.oracles.mode_preservation_3d && cfg.problem.n == 3) {
    flatneck::ProblemConfig oc = cfg.problem;
    oc.epsilon = 0.2;  // the coarse voxel grid must resolve the gap
    oc.mode_k = 1;
    const flatneck::Oracle3dResult res = flatneck::mode_preservation_oracle(oc, 33);
    summary["oracle_3d"] = {{"energy_fraction", res.energy_fraction},
                            {"unknowns", res.unknowns},
                            {"residual", res.residual}};
  }
  if (cfg.oracles.manufactured) {
    const double eps = cfg.problem.epsilon;
    flatneck::ManufacturedMode mms;
    mms.w = [eps](double rho, double yn) {
      const double cy = std::cos(0.5 * M_PI * yn / eps);
      return std::sin(M_PI * rho) * cy * cy;
    };
    mms.w_rho = [eps](double rho, double yn) {
      const double cy = std::cos(0.5 * M_PI * yn / eps);
      return M_PI * std::cos(M_PI * rho) * cy * cy;
    };
    mms.w_yn = [eps](double rho, double yn) {
      return -std::sin(M_PI * rho) * 0.5 * M_PI / eps * std::sin(M_PI * yn / eps);
    };
    json errs = json::array();
    double prev = 0.0, ratio = 0.0;
    for (int scale : {1, 2}) {
      auto g = flatneck::Grid2D::build(cfg.problem, 120 * scale, 16 * scale);
      const double err = flatneck::field_l2_error(flatneck::solve_manufactured(g, mms), mms);
      errs.push_back(err);
      if (prev > 0.0) ratio = prev / err;
      prev = err;
    }
    summary["manufactured"] = {{"l2_errors", errs}, {"refinement_ratio", ratio}};
  }
  flatneck::write_json((dir / "solve_summary.json").string(), summary);
  std::cout << "solve: sup|Du| = " << flatneck::format_g17(art.record.sup_grad)
            << " at r = " << flatneck::format_g17(art.record.r_star)
            << ", artifacts in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const CliOptions& opt) {
  const flatneck::ExperimentConfig cfg = load_config(opt);
  if (cfg.sweep_epsilons.size() < 3)
    throw std::invalid_argument("config: sweep.epsilons needs >= 3 entries");
  const fs::path dir = ensure_outdir(cfg);

  const flatneck::SweepResult res = flatneck::sweep(cfg, cfg.sweep_epsilons);
  flatneck::write_sweep_csv((dir / "sweep.csv").string(), res.records);

  json summary{{"schema_version", 1},
               {"kind", "sweep_summary"},
               {"config", cfg.to_json()},
               {"control_case", cfg.problem.convex_control()},
               {"failed", res.failed}};
  json recs = json::array();
  for (const auto& r : res.records) recs.push_back(flatneck::sweep_record_json(r));
  summary["records"] = recs;
  if (res.failed) {
    summary["fail_reason"] = res.fail_reason;
    flatneck::write_json((dir / "sweep_summary.json").string(), summary);
    throw flatneck::SolverError("sweep aborted: " + res.fail_reason);
  }
  const flatneck::FitResult fit = flatneck::fit_exponent(res.records);
  summary["fit"] = flatneck::fit_json(fit);
  flatneck::write_json((dir / "sweep_summary.json").string(), summary);
  flatneck::write_json((dir / "fit.json").string(),
                       json{{"schema_version", 1},
                            {"kind", "fit_result"},
                            {"fit", flatneck::fit_json(fit)}});
  std::cout << "sweep: fitted exponent s = " << flatneck::format_g17(fit.exponent)
            << " over " << res.records.size() << " gaps, artifacts in "
            << dir.string() << "\n";
  return kExitOk;
}

int cmd_ode(const CliOptions& opt) {
  const flatneck::ExperimentConfig cfg = load_config(opt);
  const fs::path dir = ensure_outdir(cfg);

  flatneck::RadialGridSpec spec;
  spec.r_min = cfg.problem.r0 > 0.0 ? std::min(1e-4, cfg.problem.r0 / 256.0) : 1e-5;
  spec.r0 = cfg.problem.r0;
  spec.epsilon = cfg.problem.epsilon;
  spec.count = std::max(200, cfg.grid.radial_nodes / 2);
  spec.beta = cfg.grid.grading_beta;
  const flatneck::RadialGrid grid = flatneck::RadialGrid::graded(spec);

  json summary{{"schema_version", 1}, {"kind", "ode_summary"}, {"config", cfg.to_json()}};
  if (cfg.problem.mode_k >= 1) {
    const flatneck::HomogeneousSolution hom =
        flatneck::solve_homogeneous(cfg.problem, grid, cfg.ode_a_cut);
    std::ofstream h_csv(dir / "h.csv");
    h_csv << "# flatneck-h-csv schema_version=1\nr,h,r_pow_k\n";
    const auto& xs = hom.h.grid().nodes();
    for (std::size_t i = 0; i < xs.size(); ++i)
      h_csv << flatneck::format_g17(xs[i]) << ','
            << flatneck::format_g17(hom.h.values()[i]) << ','
            << flatneck::format_g17(std::pow(xs[i], cfg.problem.mode_k)) << "\n";
    summary["homogeneous"] = {{"c1", hom.c1},
                              {"a_cut", hom.a_cut},
                              {"halvings", hom.halvings},
                              {"c1_cauchy", hom.c1_cauchy},
                              {"bounds_ok", hom.bounds_ok},
                              {"bound_violation", hom.bound_violation}};
    if (!hom.bounds_ok)
      summary["verification_failure"] = "homogeneous solution violates r^k <= h <= 1";
    std::cout << "ode: C1 = " << flatneck::format_g17(hom.c1) << ", a_cut = "
              << flatneck::format_g17(hom.a_cut) << " after " << hom.halvings
              << " halvings\n";
  } else {
    // zero mode: tabulate the closed-form integrating factor instead
    std::ofstream if_csv(dir / "integrating_factor.csv");
    if_csv << "# flatneck-if-csv schema_version=1\nr,exp_minus_int_b,eps_free_product\n";
    for (double r : grid.nodes()) {
      if (r < cfg.problem.r0 / 2.0) continue;
      const double lif = flatneck::log_integrating_factor(cfg.problem, r);
      const double kap = cfg.problem.epsilon +
                         cfg.problem.a * std::pow(std::max(r - cfg.problem.r0, 0.0), 2);
      if_csv << flatneck::format_g17(r) << ',' << flatneck::format_g17(std::exp(-lif))
             << ',' << flatneck::format_g17(std::exp(-lif) * kap / cfg.problem.epsilon)
             << "\n";
    }
    std::cout << "ode: wrote integrating-factor table (zero mode)\n";
  }
  flatneck::write_json((dir / "ode_summary.json").string(), summary);
  return kExitOk;
}

int cmd_verify(const CliOptions& opt) {
  flatneck::VerifyFault fault = flatneck::VerifyFault::none;
  if (opt.inject == "drift-sign") fault = flatneck::VerifyFault::drift_sign;
  else if (!opt.inject.empty())
    throw std::invalid_argument("verify: unknown fault '" + opt.inject + "'");

  const flatneck::VerifyReport report = flatneck::run_verify_suite(fault);
  std::cout << report.to_table();
  if (!opt.out_override.empty()) {
    fs::create_directories(opt.out_override);
    std::ofstream out(fs::path(opt.out_override) / "verify_report.txt");
    out << report.to_table();
  }
  if (!report.all_passed()) {
    std::cout << "failed checks:";
    for (const auto& c : report.checks)
      if (!c.passed) std::cout << ' ' << c.name;
    std::cout << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flatneck: thin-gap insulated conductivity laboratory"};
  app.require_subcommand(1);

  CliOptions opt;

  CLI::App* solve = app.add_subcommand("solve", "one mode solve, field + gradient artifacts");
  solve->add_option("-c,--config", opt.config_path, "experiment config (JSON)")->required();
  solve->add_option("-o,--out", opt.out_override, "output directory override");
  solve->add_option("-j,--jobs", opt.jobs, "worker pool size (0 = hardware)");

  CLI::App* sweep = app.add_subcommand("sweep", "epsilon sweep with exponent fit");
  sweep->add_option("-c,--config", opt.config_path, "experiment config (JSON)")->required();
  sweep->add_option("-o,--out", opt.out_override, "output directory override");
  sweep->add_option("-j,--jobs", opt.jobs, "worker pool size (0 = hardware)");

  CLI::App* ode = app.add_subcommand("ode", "reduced radial machinery standalone");
  ode->add_option("-c,--config", opt.config_path, "experiment config (JSON)")->required();
  ode->add_option("-o,--out", opt.out_override, "output directory override");

  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("-o,--out", opt.out_override, "also write the report here");
  verify->add_option("--inject", opt.inject, "fault injection (test fixture)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (ode->parsed()) return cmd_ode(opt);
    if (verify->parsed()) return cmd_verify(opt);
    return kExitConfig;
  } catch (const flatneck::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}
