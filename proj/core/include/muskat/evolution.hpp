#pragma once

// ===== time integration =====
//
// The stiff linearization is diagonal in Fourier space, so the default scheme
// is a fourth-order integrating-factor Runge-Kutta step: the linear symbol is
// applied through exact exponentials and only the quadrature remainder is
// advanced explicitly. With the remainder disabled the scheme reproduces
// e^{symbol * t} to machine precision. Plain explicit RK4 is kept for
// convergence studies and refuses steps beyond its stability interval
// dt <= 2.8 / max_k |symbol(k)|.

#include <string>
#include <vector>

#include "muskat/rhs.hpp"
#include "muskat/trajectory.hpp"

namespace muskat {

enum class SchemeKind { if_rk4, rk4 };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::if_rk4;
  double dt = 0.0;        // <= 0 selects the default 0.5*h
  double t_end = 5.0;
  int stride = 1;         // store every stride-th step (plus t = 0)
};

struct DiagnosticsSpec {
  double delta = 0.01;        // weight offset for the fractional norms
  double identity_tol = 1e-2;
  double per_step_tol = 1e-8;
  double slope_tol = 1e-6;
  double mean_tol = 1e-10;
  double budget_tol = 1e-6;
  double contraction_tol = 1e-6;
};

struct InitialSpec {
  std::string preset;          // one of the named presets, or empty
  double amplitude = 0.0;      // preset scale override; 0 keeps the default
  struct Mode {
    std::vector<int> k;        // integer wavevector, size == dim
    double amp = 0.0;
    double phase = 0.0;
  };
  std::vector<Mode> modes;     // explicit mode list (alternative to preset)
  std::string file;            // snapshot file (alternative to both)
  double mollify_eps = 0.0;    // optional initial-data mollification
};

struct RunConfig {
  int dimension = 2;
  int n = 64;
  double period = 6.283185307179586476925286766559;
  double rho_bar = 1.0;
  SchemeSpec scheme;
  RhsSpec rhs;
  InitialSpec initial;
  DiagnosticsSpec diagnostics;
  std::string output_dir;
};

// ----- single step -----

Field step(const Field& f, const SchemeSpec& scheme, const RhsSpec& rhs, double rho_bar);

// ----- initial-data mollification -----
//
// Spectral convolution with the unit-mass Gaussian kernel; contracts both the
// sup norm and the slope sup norm, and converges to the identity at second
// order as eps -> 0. Requires eps in (0, 1].
Field mollify_initial(const Field& f0, double eps);

// ----- full run -----

struct RunResult {
  RunConfig config;                    // effective (preset-expanded) config
  Trajectory samples;
  std::vector<StepRecord> steps;
  std::vector<DiagRecord> diag;        // one row per sample
  std::vector<MonitorResult> monitors;
  bool aborted = false;
  std::string abort_reason;

  bool passed() const;                 // no monitor failed and not aborted
};

// Builds the initial field for a config (preset/modes/file + mollification).
Field initial_field(const RunConfig& cfg);

RunResult run(const RunConfig& cfg);

}  // namespace muskat
