// ===== muskatlab: run / constants / verify / presets =====
//
// Exit codes: 0 all enabled monitors pass, 1 usage/config/IO error,
// 2 a monitor failed or the run aborted.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "muskat/constants.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/io.hpp"
#include "muskat/presets.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMonitor = 2;

void print_monitors(const std::vector<muskat::MonitorResult>& monitors) {
  for (const muskat::MonitorResult& m : monitors) {
    std::printf("[%-4s] %-22s worst_margin=% .6e  t=%g%s%s\n", muskat::to_string(m.status),
                m.check_name.c_str(), m.worst_margin, m.time_of_worst,
                m.note.empty() ? "" : "  -- ", m.note.c_str());
  }
}

bool any_failure(const std::vector<muskat::MonitorResult>& monitors) {
  for (const muskat::MonitorResult& m : monitors)
    if (m.status == muskat::MonitorStatus::fail) return true;
  return false;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  muskat::RunConfig cfg = muskat::load_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (cfg.output_dir.empty())
    throw muskat::config_error("run: no output directory (set --out or config output_dir)");

  muskat::RunResult result = muskat::run(cfg);
  muskat::write_run(result);

  print_monitors(result.monitors);
  if (result.aborted)
    std::printf("run aborted: %s\n", result.abort_reason.c_str());
  std::printf("%s (artifacts in %s)\n", result.passed() ? "PASS" : "FAIL",
              cfg.output_dir.c_str());
  return result.passed() ? kExitOk : kExitMonitor;
}

int cmd_constants(int dim, double delta, int n_max) {
  const muskat::ConstantCertificate cert =
      muskat::solve_constant({dim, delta, n_max});
  std::printf(
      "{\n"
      "  \"dimension\": %d,\n"
      "  \"delta\": %s,\n"
      "  \"root\": %s,\n"
      "  \"bracket\": [%s, %s],\n"
      "  \"residual\": %s,\n"
      "  \"tail_bound\": %s,\n"
      "  \"feasible\": %s,\n"
      "  \"note\": \"%s\"\n"
      "}\n",
      cert.dim, muskat::format_g17(cert.delta).c_str(), muskat::format_g17(cert.root).c_str(),
      muskat::format_g17(cert.lo).c_str(), muskat::format_g17(cert.hi).c_str(),
      muskat::format_g17(cert.residual).c_str(), muskat::format_g17(cert.tail_bound).c_str(),
      cert.feasible ? "true" : "false", cert.note.c_str());
  return kExitOk;
}

// Recomputes every diagnostic row from the stored snapshots and cross-checks
// the stored CSV; any numeric drift beyond 1e-12 relative is a failure.
int cmd_verify(const std::string& dir, const std::string& out_dir) {
  const muskat::StoredRun stored = muskat::load_run(dir);
  const std::vector<muskat::DiagRecord> rows =
      muskat::diagnostics_rows(stored.samples, stored.config);

  muskat::MonitorResult integrity;
  integrity.check_name = "stored_diagnostics";
  integrity.status = muskat::MonitorStatus::pass;
  integrity.worst_margin = 0.0;
  if (rows.size() != stored.diag.size()) {
    integrity.status = muskat::MonitorStatus::fail;
    integrity.note = "row count: stored " + std::to_string(stored.diag.size()) +
                     ", recomputed " + std::to_string(rows.size());
  } else {
    double worst = 0.0;
    std::string worst_note;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto fields = [](const muskat::DiagRecord& r) {
        return std::vector<double>{r.t,      r.l2,     r.linf,
                                   r.grad_linf, r.norm_1, r.norm_2,
                                   r.norm_1_plus_delta, r.identity_residual};
      };
      static const char* names[] = {"t",      "l2",     "linf",
                                    "grad_linf", "norm_1", "norm_2",
                                    "norm_1_plus_delta", "identity_residual"};
      const std::vector<double> a = fields(rows[i]);
      const std::vector<double> b = fields(stored.diag[i]);
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (std::isnan(a[j]) && std::isnan(b[j])) continue;
        const double rel = std::abs(a[j] - b[j]) / std::max(1.0, std::abs(a[j]));
        if (rel > worst) {
          worst = rel;
          worst_note = std::string(names[j]) + " at row " + std::to_string(i) + ": stored " +
                       muskat::format_g17(b[j]) + ", recomputed " + muskat::format_g17(a[j]);
        }
      }
      if (rows[i].flags != stored.diag[i].flags) {
        integrity.status = muskat::MonitorStatus::fail;
        integrity.note = "flags at row " + std::to_string(i) + ": stored '" +
                         stored.diag[i].flags + "', recomputed '" + rows[i].flags + "'";
      }
    }
    integrity.worst_margin = 1e-12 - worst;
    if (worst > 1e-12) {
      integrity.status = muskat::MonitorStatus::fail;
      integrity.note = worst_note;
    }
  }

  std::vector<muskat::MonitorResult> monitors =
      muskat::sample_monitors(stored.samples, stored.config);
  monitors.push_back(integrity);

  namespace fs = std::filesystem;
  const fs::path target(out_dir.empty() ? dir : out_dir);
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(target, ec);
    if (ec)
      throw muskat::data_error("cannot create '" + target.string() + "': " + ec.message());
  }
  muskat::write_diagnostics_csv((target / "verify_diagnostics.csv").string(), rows);
  muskat::write_summary((target / "verify_summary.json").string(), monitors, false, "");

  print_monitors(monitors);
  const bool ok = !any_failure(monitors);
  std::printf("%s (verification artifacts in %s)\n", ok ? "PASS" : "FAIL",
              target.string().c_str());
  return ok ? kExitOk : kExitMonitor;
}

int cmd_presets(int dim, const std::string& emit) {
  if (!emit.empty()) {
    muskat::RunConfig cfg = muskat::preset_config(emit, dim);
    std::printf("%s", muskat::config_to_json(cfg).c_str());
    return kExitOk;
  }
  for (const std::string& name : muskat::preset_names()) std::printf("%s\n", name.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"muskatlab: pseudo-spectral laboratory for the Muskat interface equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, preset_name;
  int threads = 0;
  int dim = 2;
  double delta = 0.0;
  int n_max = 500;

  CLI::App* run_cmd = app.add_subcommand("run", "integrate a configuration and write artifacts");
  run_cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides config output_dir)");
  run_cmd->add_option("--threads", threads, "worker threads (0 = hardware default)");

  CLI::App* const_cmd =
      app.add_subcommand("constants", "print a smallness-constant certificate as JSON");
  const_cmd->add_option("--dim", dim, "interface dimension (1 or 2)");
  const_cmd->add_option("--delta", delta, "norm exponent shift in [0,1)");
  const_cmd->add_option("--n-max", n_max, "series truncation order");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "recompute diagnostics and monitors for a stored run");
  verify_cmd->add_option("dir", run_dir, "run directory produced by 'run'")->required();
  verify_cmd->add_option("--out", out_dir, "where to write verification artifacts");
  verify_cmd->add_option("--threads", threads, "worker threads (0 = hardware default)");

  CLI::App* presets_cmd = app.add_subcommand("presets", "list built-in initial data presets");
  presets_cmd->add_option("name", preset_name, "print this preset's full config as JSON");
  presets_cmd->add_option("--dim", dim, "interface dimension for the emitted config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) muskat::threads::set(threads);
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
    if (const_cmd->parsed()) return cmd_constants(dim, delta, n_max);
    if (verify_cmd->parsed()) return cmd_verify(run_dir, out_dir);
    if (presets_cmd->parsed()) return cmd_presets(dim, preset_name);
  } catch (const muskat::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
