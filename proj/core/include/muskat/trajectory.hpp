#pragma once

// ===== trajectory records shared by evolution and diagnostics =====

#include <string>
#include <vector>

#include "muskat/field.hpp"

namespace muskat {

struct Sample {
  double t = 0.0;
  Field f;
};

using Trajectory = std::vector<Sample>;

// Cheap per-step monitor inputs, recorded at every time step.
struct StepRecord {
  double t = 0.0;
  double fmax = 0.0;
  double fmin = 0.0;
  double mean = 0.0;
  double norm1 = 0.0;
  double grad_linf = 0.0;
  double l2 = 0.0;
};

// One diagnostics row per stored sample (the diagnostics CSV schema).
struct DiagRecord {
  double t = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double grad_linf = 0.0;
  double norm_1 = 0.0;
  double norm_2 = 0.0;
  double norm_1_plus_delta = 0.0;
  double identity_residual = 0.0;  // NaN when the monitor is not applicable
  std::string flags = "ok";
};

enum class MonitorStatus { pass, fail, not_applicable };

struct MonitorResult {
  std::string check_name;
  MonitorStatus status = MonitorStatus::not_applicable;
  double worst_margin = 0.0;  // smallest slack seen; negative means violated
  double time_of_worst = 0.0;
  std::string note;
};

const char* to_string(MonitorStatus s);

}  // namespace muskat
