#pragma once

// ===== on-disk formats =====
//
// Snapshot CSV: two header lines ("d,N,L,t" then the values), then one field
// value per line in row-major order, 17 significant digits.
// Diagnostics CSV: header
//   t,l2,linf,grad_linf,norm_1,norm_2,norm_1_plus_delta,identity_residual,flags
// Config: strict JSON; unknown keys anywhere are rejected.

#include <string>
#include <vector>

#include "muskat/evolution.hpp"
#include "muskat/trajectory.hpp"

namespace muskat {

std::string format_g17(double x);

// ----- field snapshots -----

void write_snapshot(const std::string& path, const Field& f, double t);
Sample load_snapshot(const std::string& path);

// ----- diagnostics CSV -----

void write_diagnostics_csv(const std::string& path, const std::vector<DiagRecord>& rows);
std::vector<DiagRecord> load_diagnostics_csv(const std::string& path);

// ----- run config JSON -----

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

// ----- run directory -----

// Writes config.json, snapshot_NNNNNN.csv per sample, diagnostics.csv and
// summary.json into cfg.output_dir (created if needed).
void write_run(const RunResult& result);

struct StoredRun {
  RunConfig config;
  Trajectory samples;
  std::vector<DiagRecord> diag;
};
StoredRun load_run(const std::string& dir);

// ----- summaries -----

std::string monitors_to_json(const std::vector<MonitorResult>& monitors,
                             bool aborted, const std::string& abort_reason);
void write_summary(const std::string& path, const std::vector<MonitorResult>& monitors,
                   bool aborted, const std::string& abort_reason);

}  // namespace muskat
