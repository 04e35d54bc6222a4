#pragma once

// ===== named experiment presets =====
//
// Each preset pins a complete run configuration so the standard experiments
// are one command each. Defaults: dim 2 on a 64^2 grid (dim 1: 256 points),
// period 2*pi, integrating-factor RK4 with dt = 0.5*h over t in [0, 5] with
// the stride chosen for ~50 stored samples, direct rhs path, rho_bar = 1.
//
//   single_mode : A*cos(x1), A = 0.2 (norm_1 = 0.2)
//   two_mode    : A*(cos(x1 + 0.3) + 0.5*cos(2*x2 + 1.1)), norm_1 = 0.2
//   bump        : smooth concentrated bump, peak amplitude 0.1
//   near_k0     : single mode scaled to norm_1 = 0.95 * critical size
//   steep_slope : A*cos(x1) with grad_linf = 0.30
//   unstable    : rho_bar = -1, single mode, amplitude 1e-3

#include <string>
#include <vector>

#include "muskat/evolution.hpp"

namespace muskat {

std::vector<std::string> preset_names();

// dim <= 0 keeps the preset default (2). Throws config_error for unknown names.
RunConfig preset_config(const std::string& name, int dim = 0);

// The initial field of a preset on a given grid. amplitude <= 0 keeps the
// preset default; otherwise it replaces the preset's base amplitude (the mode
// amplitude, the bump peak, or the norm_1 target, as listed above).
Field preset_field(const std::string& name, const Grid& g, double amplitude = 0.0);

}  // namespace muskat
