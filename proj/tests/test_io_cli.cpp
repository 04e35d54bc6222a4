#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "muskat/evolution.hpp"
#include "muskat/io.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir() {
  static const fs::path base = [] {
    fs::path p = fs::temp_directory_path() / "muskatlab_io_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return base;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return all;
}

#ifdef MUSKATLAB_BIN
// Runs the CLI, captures combined stdout/stderr, returns the exit code.
int run_cli(const std::string& args, std::string* output = nullptr) {
  static int counter = 0;
  const fs::path log = scratch_dir() / ("cli_output_" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string("\"") + MUSKATLAB_BIN + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) *output = read_text(log);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}
#endif

RunConfig tiny_config(const fs::path& out_dir) {
  RunConfig cfg;
  cfg.dimension = 2;
  cfg.n = 16;
  cfg.initial.preset = "single_mode";
  cfg.initial.amplitude = 0.05;
  cfg.scheme.t_end = 0.4;
  cfg.scheme.stride = 2;
  cfg.output_dir = out_dir.string();
  return cfg;
}

}  // namespace

// ===== number formatting =====

TEST_CASE("format_g17 round trips doubles exactly") {
  const double values[] = {0.0,
                           1.0,
                           -1.0,
                           0.1,
                           4097.000000000001,
                           3.141592653589793,
                           -2.2250738585072014e-308,
                           1.7976931348623157e308,
                           5e-324};
  for (double x : values) {
    const std::string s = format_g17(x);
    char* end = nullptr;
    const double back = std::strtod(s.c_str(), &end);
    CHECK(*end == '\0');
    CHECK(back == x);
  }
  const std::string nan_str = format_g17(std::nan(""));
  CHECK(std::isnan(std::strtod(nan_str.c_str(), nullptr)));
}

// ===== snapshots =====

TEST_CASE("snapshot round trip is bit exact") {
  const Grid g = make_grid(2, 16);
  const Field f = testutil::random_field(g, 7, 0.3);
  const fs::path p = scratch_dir() / "snap.csv";
  write_snapshot(p.string(), f, 0.375);
  const Sample s = load_snapshot(p.string());
  CHECK(s.t == 0.375);
  CHECK(s.f.grid == g);
  CHECK(testutil::max_abs_diff(s.f.v, f.v) == 0.0);

  const Grid g1 = make_grid(1, 32);
  const Field f1 = testutil::random_field(g1, 8, 0.2);
  write_snapshot(p.string(), f1, 1.5);
  const Sample s1 = load_snapshot(p.string());
  CHECK(s1.f.grid == g1);
  CHECK(testutil::max_abs_diff(s1.f.v, f1.v) == 0.0);
}

TEST_CASE("snapshot loader rejects malformed files") {
  const fs::path dir = scratch_dir();
  CHECK_THROWS_AS(load_snapshot((dir / "missing.csv").string()), data_error);

  const fs::path bad_header = dir / "bad_header.csv";
  write_text(bad_header, "a,b,c\n2,8,6.28,0\n0\n");
  CHECK_THROWS_AS(load_snapshot(bad_header.string()), data_error);

  // valid header, too few values
  std::string truncated = "d,N,L,t\n1,8,6.2831853071795862,0\n";
  for (int i = 0; i < 5; ++i) truncated += "0\n";
  const fs::path trunc = dir / "truncated.csv";
  write_text(trunc, truncated);
  CHECK_THROWS_AS(load_snapshot(trunc.string()), data_error);

  std::string extra = "d,N,L,t\n1,8,6.2831853071795862,0\n";
  for (int i = 0; i < 9; ++i) extra += "0\n";
  const fs::path over = dir / "extra.csv";
  write_text(over, extra);
  CHECK_THROWS_AS(load_snapshot(over.string()), data_error);

  const fs::path badgrid = dir / "bad_grid.csv";
  write_text(badgrid, "d,N,L,t\n3,8,6.28,0\n0\n");
  CHECK_THROWS_AS(load_snapshot(badgrid.string()), error);
}

// ===== diagnostics CSV =====

TEST_CASE("diagnostics CSV round trip preserves values, NaN and flags") {
  std::vector<DiagRecord> rows(3);
  rows[0].t = 0.0;
  rows[0].l2 = 0.125;
  rows[0].identity_residual = -3.5e-4;
  rows[0].flags = "ok";
  rows[1].t = 0.1;
  rows[1].norm_1 = 0.07;
  rows[1].identity_residual = std::nan("");
  rows[1].flags = "identity_na;rough_field";
  rows[2].t = 0.2;
  rows[2].norm_2 = 1.0 / 3.0;
  rows[2].identity_residual = 5e-3;
  rows[2].flags = "rough_field";

  const fs::path p = scratch_dir() / "diag.csv";
  write_diagnostics_csv(p.string(), rows);
  const std::vector<DiagRecord> back = load_diagnostics_csv(p.string());
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].t == rows[i].t);
    CHECK(back[i].l2 == rows[i].l2);
    CHECK(back[i].norm_1 == rows[i].norm_1);
    CHECK(back[i].norm_2 == rows[i].norm_2);
    CHECK(back[i].flags == rows[i].flags);
    if (std::isnan(rows[i].identity_residual))
      CHECK(std::isnan(back[i].identity_residual));
    else
      CHECK(back[i].identity_residual == rows[i].identity_residual);
  }
}

// ===== config JSON =====

TEST_CASE("empty config object yields the defaults") {
  const RunConfig cfg = parse_config("{}");
  const RunConfig def;
  CHECK(cfg.dimension == def.dimension);
  CHECK(cfg.n == def.n);
  CHECK(cfg.period == def.period);
  CHECK(cfg.rho_bar == def.rho_bar);
  CHECK(cfg.scheme.kind == def.scheme.kind);
  CHECK(cfg.scheme.dt == def.scheme.dt);
  CHECK(cfg.rhs.path == def.rhs.path);
  CHECK(cfg.diagnostics.delta == def.diagnostics.delta);
  CHECK(cfg.output_dir == def.output_dir);
}

TEST_CASE("config JSON round trip preserves every field") {
  RunConfig cfg;
  cfg.dimension = 1;
  cfg.n = 256;
  cfg.period = 12.5;
  cfg.rho_bar = 0.7;
  cfg.scheme.kind = SchemeKind::rk4;
  cfg.scheme.dt = 0.0125;
  cfg.scheme.t_end = 2.5;
  cfg.scheme.stride = 5;
  cfg.rhs.path = RhsPath::regularized;
  cfg.rhs.eps = 0.05;
  cfg.rhs.c_const = 9.0;
  cfg.rhs.n_max = 7;
  cfg.rhs.theta = 0.4;
  cfg.rhs.dealias = false;
  cfg.initial.modes.push_back({{3}, 0.02, 1.25});
  cfg.initial.mollify_eps = 0.25;
  cfg.diagnostics.delta = 0.2;
  cfg.diagnostics.identity_tol = 0.5;
  cfg.diagnostics.per_step_tol = 1e-7;
  cfg.diagnostics.slope_tol = 1e-5;
  cfg.diagnostics.mean_tol = 1e-9;
  cfg.diagnostics.budget_tol = 1e-4;
  cfg.diagnostics.contraction_tol = 1e-3;
  cfg.output_dir = "/tmp/somewhere";

  const RunConfig back = parse_config(config_to_json(cfg));
  CHECK(back.dimension == cfg.dimension);
  CHECK(back.n == cfg.n);
  CHECK(back.period == cfg.period);
  CHECK(back.rho_bar == cfg.rho_bar);
  CHECK(back.scheme.kind == cfg.scheme.kind);
  CHECK(back.scheme.dt == cfg.scheme.dt);
  CHECK(back.scheme.t_end == cfg.scheme.t_end);
  CHECK(back.scheme.stride == cfg.scheme.stride);
  CHECK(back.rhs.path == cfg.rhs.path);
  CHECK(back.rhs.eps == cfg.rhs.eps);
  CHECK(back.rhs.c_const == cfg.rhs.c_const);
  CHECK(back.rhs.n_max == cfg.rhs.n_max);
  CHECK(back.rhs.theta == cfg.rhs.theta);
  CHECK(back.rhs.dealias == cfg.rhs.dealias);
  REQUIRE(back.initial.modes.size() == 1);
  CHECK(back.initial.modes[0].k == cfg.initial.modes[0].k);
  CHECK(back.initial.modes[0].amp == cfg.initial.modes[0].amp);
  CHECK(back.initial.modes[0].phase == cfg.initial.modes[0].phase);
  CHECK(back.initial.mollify_eps == cfg.initial.mollify_eps);
  CHECK(back.diagnostics.delta == cfg.diagnostics.delta);
  CHECK(back.diagnostics.identity_tol == cfg.diagnostics.identity_tol);
  CHECK(back.diagnostics.per_step_tol == cfg.diagnostics.per_step_tol);
  CHECK(back.diagnostics.slope_tol == cfg.diagnostics.slope_tol);
  CHECK(back.diagnostics.mean_tol == cfg.diagnostics.mean_tol);
  CHECK(back.diagnostics.budget_tol == cfg.diagnostics.budget_tol);
  CHECK(back.diagnostics.contraction_tol == cfg.diagnostics.contraction_tol);
  CHECK(back.output_dir == cfg.output_dir);
}

TEST_CASE("unknown or ill-typed config keys are rejected") {
  CHECK_THROWS_AS(parse_config("{\"frequency\": 3}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"scheme\": {\"Dt\": 0.1}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"rhs\": {\"epsilon\": 0.1}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"initial\": {\"amp\": 0.1}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"diagnostics\": {\"tol\": 0.1}}"), config_error);
  CHECK_THROWS_AS(
      parse_config("{\"initial\": {\"modes\": [{\"k\": [1,0], \"amp\": 1, \"phi\": 0}]}}"),
      config_error);
  CHECK_THROWS_AS(parse_config("{\"N\": \"big\"}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"scheme\": 3}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"scheme\": {\"kind\": \"leapfrog\"}}"), config_error);
  CHECK_THROWS_AS(parse_config("{\"rhs\": {\"path\": \"exact\"}}"), config_error);
  CHECK_THROWS_AS(
      parse_config("{\"initial\": {\"modes\": [{\"k\": [1.5], \"amp\": 1}]}}"),
      config_error);
  CHECK_THROWS_AS(parse_config("{"), config_error);
  CHECK_THROWS_AS(parse_config("[1,2]"), config_error);
}

// ===== run directories =====

TEST_CASE("write_run and load_run round trip") {
  const fs::path dir = scratch_dir() / "roundtrip_run";
  RunConfig cfg = tiny_config(dir);
  const RunResult result = run(cfg);
  REQUIRE(result.passed());
  write_run(result);

  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "snapshot_000000.csv"));

  const StoredRun stored = load_run(dir.string());
  CHECK(stored.config.dimension == cfg.dimension);
  CHECK(stored.config.n == cfg.n);
  CHECK(stored.config.scheme.t_end == cfg.scheme.t_end);
  REQUIRE(stored.samples.size() == result.samples.size());
  for (std::size_t i = 0; i < stored.samples.size(); ++i) {
    CHECK(stored.samples[i].t == result.samples[i].t);
    CHECK(testutil::max_abs_diff(stored.samples[i].f.v, result.samples[i].f.v) == 0.0);
  }
  REQUIRE(stored.diag.size() == result.diag.size());
  for (std::size_t i = 0; i < stored.diag.size(); ++i) {
    CHECK(stored.diag[i].l2 == result.diag[i].l2);
    CHECK(stored.diag[i].flags == result.diag[i].flags);
  }
}

TEST_CASE("write_run requires an output directory") {
  RunConfig cfg = tiny_config("");
  cfg.output_dir.clear();
  RunResult result = run(cfg);
  CHECK_THROWS_AS(write_run(result), config_error);
}

TEST_CASE("load_run rejects a directory without snapshots") {
  const fs::path dir = scratch_dir() / "empty_run";
  fs::create_directories(dir);
  write_text(dir / "config.json", "{}");
  CHECK_THROWS_AS(load_run(dir.string()), data_error);
}

// ===== summary JSON =====

TEST_CASE("monitors_to_json structure") {
  std::vector<MonitorResult> ms(3);
  ms[0].check_name = "alpha";
  ms[0].status = MonitorStatus::pass;
  ms[0].worst_margin = 0.25;
  ms[0].time_of_worst = 1.5;
  ms[0].note = "fine";
  ms[1].check_name = "beta";
  ms[1].status = MonitorStatus::fail;
  ms[1].worst_margin = -1e-3;
  ms[2].check_name = "gamma";
  ms[2].status = MonitorStatus::not_applicable;

  const json js = json::parse(monitors_to_json(ms, false, ""));
  REQUIRE(js.at("monitors").size() == 3);
  CHECK(js.at("monitors")[0].at("check_name") == "alpha");
  CHECK(js.at("monitors")[0].at("status") == "pass");
  CHECK(js.at("monitors")[0].at("worst_margin").get<double>() == 0.25);
  CHECK(js.at("monitors")[0].at("time_of_worst").get<double>() == 1.5);
  CHECK(js.at("monitors")[0].at("note") == "fine");
  CHECK(js.at("monitors")[1].at("status") == "fail");
  CHECK(js.at("monitors")[2].at("status") == "not_applicable");
  CHECK(js.at("aborted").get<bool>() == false);
  CHECK(js.at("passed").get<bool>() == false);  // one monitor failed

  ms.erase(ms.begin() + 1);
  const json ok = json::parse(monitors_to_json(ms, false, ""));
  CHECK(ok.at("passed").get<bool>() == true);

  const json ab = json::parse(monitors_to_json(ms, true, "step 3: blew up"));
  CHECK(ab.at("aborted").get<bool>() == true);
  CHECK(ab.at("abort_reason") == "step 3: blew up");
  CHECK(ab.at("passed").get<bool>() == false);
}

// ===== command line =====

#ifdef MUSKATLAB_BIN

TEST_CASE("cli: presets lists every built-in name") {
  std::string out;
  CHECK(run_cli("presets", &out) == 0);
  for (const char* name :
       {"single_mode", "two_mode", "bump", "near_k0", "steep_slope", "unstable"})
    CHECK(out.find(name) != std::string::npos);
}

TEST_CASE("cli: presets emits a parseable config") {
  std::string out;
  CHECK(run_cli("presets single_mode", &out) == 0);
  const RunConfig cfg = parse_config(out);
  CHECK(cfg.initial.preset == "single_mode");
  CHECK(cfg.dimension == 2);

  std::string out1;
  CHECK(run_cli("presets single_mode --dim 1", &out1) == 0);
  CHECK(parse_config(out1).dimension == 1);
}

TEST_CASE("cli: constants certificates for both dimensions") {
  std::string out2;
  CHECK(run_cli("constants", &out2) == 0);
  CHECK(out2.find("0.2487464") != std::string::npos);
  CHECK(out2.find("\"feasible\": true") != std::string::npos);

  std::string out1;
  CHECK(run_cli("constants --dim 1", &out1) == 0);
  CHECK(out1.find("0.3626057200") != std::string::npos);
}

TEST_CASE("cli: run writes artifacts and reports pass") {
  const fs::path dir = scratch_dir() / "cli_run";
  const fs::path cfg_path = scratch_dir() / "cli_run_config.json";
  write_text(cfg_path,
             "{\n"
             "  \"dimension\": 2, \"N\": 16,\n"
             "  \"scheme\": {\"t_end\": 0.4, \"stride\": 2},\n"
             "  \"initial\": {\"preset\": \"single_mode\", \"amplitude\": 0.05}\n"
             "}\n");
  std::string out;
  const int code =
      run_cli("run --config \"" + cfg_path.string() + "\" --out \"" + dir.string() + "\"", &out);
  CHECK(code == 0);
  CHECK(out.find("PASS") != std::string::npos);
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "snapshot_000000.csv"));
  const json summary = json::parse(read_text(dir / "summary.json"));
  CHECK(summary.at("passed").get<bool>() == true);
}

TEST_CASE("cli: a failing monitor exits with code 2 but still writes artifacts") {
  const fs::path dir = scratch_dir() / "cli_unstable";
  const fs::path cfg_path = scratch_dir() / "cli_unstable_config.json";
  write_text(cfg_path,
             "{\n"
             "  \"dimension\": 2, \"N\": 16, \"rho_bar\": -1.0,\n"
             "  \"scheme\": {\"t_end\": 0.3},\n"
             "  \"initial\": {\"preset\": \"single_mode\", \"amplitude\": 0.001}\n"
             "}\n");
  std::string out;
  const int code =
      run_cli("run --config \"" + cfg_path.string() + "\" --out \"" + dir.string() + "\"", &out);
  CHECK(code == 2);
  CHECK(fs::exists(dir / "summary.json"));
  const json summary = json::parse(read_text(dir / "summary.json"));
  CHECK(summary.at("passed").get<bool>() == false);
  bool saw_stable_fail = false;
  for (const json& m : summary.at("monitors"))
    if (m.at("check_name") == "stable_regime" && m.at("status") == "fail")
      saw_stable_fail = true;
  CHECK(saw_stable_fail);
}

TEST_CASE("cli: malformed config exits with code 1 and writes nothing") {
  const fs::path dir = scratch_dir() / "cli_malformed_out";
  const fs::path cfg_path = scratch_dir() / "cli_malformed.json";
  write_text(cfg_path, "{ \"dimension\": 2, ");
  std::string out;
  const int code =
      run_cli("run --config \"" + cfg_path.string() + "\" --out \"" + dir.string() + "\"", &out);
  CHECK(code == 1);
  CHECK(out.find("error:") != std::string::npos);
  CHECK(!fs::exists(dir));
}

TEST_CASE("cli: verify accepts an untouched run and flags a tampered one") {
  const fs::path dir = scratch_dir() / "cli_verify_run";
  const fs::path cfg_path = scratch_dir() / "cli_verify_config.json";
  write_text(cfg_path,
             "{\n"
             "  \"dimension\": 2, \"N\": 16,\n"
             "  \"scheme\": {\"t_end\": 0.4, \"stride\": 2},\n"
             "  \"initial\": {\"preset\": \"single_mode\", \"amplitude\": 0.05}\n"
             "}\n");
  REQUIRE(run_cli("run --config \"" + cfg_path.string() + "\" --out \"" + dir.string() + "\"") ==
          0);

  std::string out;
  CHECK(run_cli("verify \"" + dir.string() + "\"", &out) == 0);
  CHECK(out.find("stored_diagnostics") != std::string::npos);
  CHECK(fs::exists(dir / "verify_summary.json"));
  CHECK(fs::exists(dir / "verify_diagnostics.csv"));

  // tamper with one stored diagnostic value
  std::vector<DiagRecord> rows = load_diagnostics_csv((dir / "diagnostics.csv").string());
  REQUIRE(rows.size() >= 2);
  rows[1].l2 += 1e-6;
  write_diagnostics_csv((dir / "diagnostics.csv").string(), rows);

  std::string out2;
  CHECK(run_cli("verify \"" + dir.string() + "\"", &out2) == 2);
  const json summary = json::parse(read_text(dir / "verify_summary.json"));
  bool saw_integrity_fail = false;
  for (const json& m : summary.at("monitors"))
    if (m.at("check_name") == "stored_diagnostics" && m.at("status") == "fail")
      saw_integrity_fail = true;
  CHECK(saw_integrity_fail);
}

TEST_CASE("cli: verify on an empty directory is a usage error") {
  const fs::path dir = scratch_dir() / "cli_verify_empty";
  fs::create_directories(dir);
  std::string out;
  CHECK(run_cli("verify \"" + dir.string() + "\"", &out) == 1);
  CHECK(out.find("error:") != std::string::npos);
}

TEST_CASE("cli: missing subcommand or unknown flag is a usage error") {
  std::string out;
  CHECK(run_cli("", &out) != 0);
  CHECK(run_cli("run --config", &out) != 0);
  CHECK(run_cli("frobnicate", &out) != 0);
}

#endif  // MUSKATLAB_BIN
