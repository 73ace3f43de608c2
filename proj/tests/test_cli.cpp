// Exit-code and determinism tests that drive the installed CLI binary.
// The binary path comes from the FLATNECK_BIN compile definition.

#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(FLATNECK_BIN) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("flatneck_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// sweep CSV with the wall_ms column dropped (wall time is not reproducible)
std::string mask_wall_ms(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string lineb;
  while (std::getline(in, lineb)) {
    const auto pos = lineb.rfind(',');
    out << (pos == std::string::npos ? lineb : lineb.substr(0, pos)) << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("solve writes artifacts and exits 0") {
  TempDir tmp("solve");
  write_file(tmp.path / "cfg.json",
             R"({"problem": {"n": 3, "epsilon": 0.01, "mode_k": 1},
                 "grid": {"radial_nodes": 200, "vertical_intervals": 16},
                 "output": {"dir": ")" + (tmp.path / "out").string() + R"("}})");
  const RunResult res = run("solve -c " + (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(tmp.path / "out" / "field.csv"));
  CHECK(fs::exists(tmp.path / "out" / "gradient.csv"));
  CHECK(fs::exists(tmp.path / "out" / "solve_summary.json"));
  CHECK(slurp(tmp.path / "out" / "solve_summary.json").find("sup_grad") != std::string::npos);
}

TEST_CASE("epsilon out of range exits 2 with a diagnostic") {
  TempDir tmp("eps");
  write_file(tmp.path / "cfg.json", R"({"problem": {"epsilon": 0.3}})");
  const RunResult res = run("solve -c " + (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("epsilon") != std::string::npos);
}

TEST_CASE("unknown config key exits 2 naming the key") {
  TempDir tmp("key");
  write_file(tmp.path / "cfg.json", R"({"problem": {"epsilonn": 0.01}})");
  const RunResult res = run("solve -c " + (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("problem.epsilonn") != std::string::npos);
}

TEST_CASE("malformed json exits 2") {
  TempDir tmp("json");
  write_file(tmp.path / "cfg.json", "{problem:");
  const RunResult res = run("solve -c " + (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 2);
}

TEST_CASE("missing subcommand or config exits 2") {
  CHECK(run("").exit_code == 2);
  CHECK(run("solve").exit_code == 2);
}

TEST_CASE("duplicate sweep epsilons exit 2") {
  TempDir tmp("dup");
  write_file(tmp.path / "cfg.json",
             R"({"grid": {"radial_nodes": 200, "vertical_intervals": 16},
                 "sweep": {"epsilons": [0.01, 0.01, 0.001]}})");
  const RunResult res = run("sweep -c " + (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 2);
}

TEST_CASE("convex control solve notes the control case") {
  TempDir tmp("convex");
  write_file(tmp.path / "cfg.json",
             R"({"problem": {"n": 2, "epsilon": 0.01, "r0": 0.0, "mode_k": 1},
                 "grid": {"radial_nodes": 200, "vertical_intervals": 16},
                 "output": {"dir": ")" + (tmp.path / "out").string() + R"("}})");
  const RunResult res = run("solve -c " + (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 0);
  CHECK(slurp(tmp.path / "out" / "solve_summary.json").find("\"control_case\": true") !=
        std::string::npos);
}

TEST_CASE("sweep is byte-identical across runs apart from wall time") {
  TempDir tmp("det");
  write_file(tmp.path / "cfg.json",
             R"({"problem": {"n": 3, "epsilon": 0.01, "mode_k": 1},
                 "grid": {"radial_nodes": 220, "vertical_intervals": 16},
                 "sweep": {"epsilons": [0.01, 0.005, 0.002]},
                 "seed": 777})");
  const std::string out1 = (tmp.path / "out1").string();
  const std::string out2 = (tmp.path / "out2").string();
  REQUIRE(run("sweep -c " + (tmp.path / "cfg.json").string() + " -o " + out1).exit_code == 0);
  REQUIRE(run("sweep -c " + (tmp.path / "cfg.json").string() + " -o " + out2).exit_code == 0);
  CHECK(mask_wall_ms(slurp(fs::path(out1) / "sweep.csv")) ==
        mask_wall_ms(slurp(fs::path(out2) / "sweep.csv")));
  CHECK(slurp(fs::path(out1) / "fit.json") == slurp(fs::path(out2) / "fit.json"));
}

TEST_CASE("ode subcommand reports the homogeneous solution") {
  TempDir tmp("ode");
  write_file(tmp.path / "cfg.json",
             R"({"problem": {"n": 3, "epsilon": 0.001, "mode_k": 1},
                 "output": {"dir": ")" + (tmp.path / "out").string() + R"("}})");
  const RunResult res = run("ode -c " + (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(tmp.path / "out" / "h.csv"));
  CHECK(slurp(tmp.path / "out" / "ode_summary.json").find("\"c1\"") != std::string::npos);
}

TEST_CASE("output dir env override is honored") {
  TempDir tmp("env");
  write_file(tmp.path / "cfg.json",
             R"({"problem": {"n": 3, "epsilon": 0.01, "mode_k": 0},
                 "grid": {"radial_nodes": 200, "vertical_intervals": 16},
                 "output": {"dir": ")" + (tmp.path / "ignored").string() + R"("}})");
  const std::string envdir = (tmp.path / "env_out").string();
  const RunResult res = run("solve -c " + (tmp.path / "cfg.json").string() +
                            " > /dev/null; FLATNECK_OUTDIR=" + envdir + " " +
                            std::string(FLATNECK_BIN) + " solve -c " +
                            (tmp.path / "cfg.json").string());
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(fs::path(envdir) / "solve_summary.json"));
}

TEST_CASE("verify exits 0 and is byte-deterministic") {
  const RunResult r1 = run("verify");
  CHECK(r1.exit_code == 0);
  CHECK(r1.output.find("checks passed") != std::string::npos);
  const RunResult r2 = run("verify");
  CHECK(r1.output == r2.output);
}

TEST_CASE("injected drift sign error is caught by the integrating-factor check") {
  const RunResult res = run("verify --inject drift-sign");
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("FAIL  integrating-factor-closed-form") != std::string::npos);
}
