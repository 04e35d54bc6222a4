#pragma once

// ===== provable-bound monitors =====
//
// Every a-priori estimate of the continuum theory is rephrased as a residual
// or boolean monitor over a sampled trajectory. All checks are pure functions
// of (samples, tolerances): re-running them on a stored trajectory reproduces
// the flags bit-for-bit.

#include <vector>

#include "muskat/evolution.hpp"
#include "muskat/trajectory.hpp"

namespace muskat {

// ----- energy dissipation functional (dim 2 only) -----
//
// D(f) = iint ( 1/|y| - 1/sqrt(|y|^2 + (f(x)-f(x-y))^2) ) dx dy  >=  0.
// Evaluated as [exact quadratic part 2*pi*L^2*sum_k kappa |c_k|^2] plus the
// lattice sum of the term-wise nonpositive quartic-order remainder
// r2 = 1/|y| - 1/sqrt(|y|^2+d^2) - d^2/(2|y|^3), written in a product form
// with no cancellation. The lattice quadratic symbol never exceeds 2*pi*kappa
// (checked as a property test), so the hybrid value dominates the plain
// lattice sum, which is nonnegative term-wise.
//
// Above n = 64 the x-sum of the remainder uses a stride-2 subsample with
// Richardson correction (validated against the full sum at n <= 64).
double dissipation(const Field& f);

// Reference estimator: the plain lattice sum of the full integrand, term-wise
// nonnegative by construction. The hybrid value above dominates it whenever
// the lattice quadratic symbol stays below 2*pi*kappa (property-tested).
double dissipation_lattice(const Field& f);

// Same integrand normalized by 1/|y|:
// J(f) = iint (1/|y|) (1 - 1/sqrt(1 + slope^2)) dx dy <= 4*pi*sqrt(2)*l1(f).
struct JBoundResult {
  double j = 0.0;
  double bound = 0.0;
  bool pass = false;
};
JBoundResult j_bound_check(const Field& f);

// ----- L2 energy identity -----
//
// residual(t) = d/dt ||f||_L2^2 (centered differences on the sample stride,
// one-sided second-order at the ends) + (rho_bar/pi) * D(f(t)).
// Passes when |residual| <= tol * max(|each term|) at every sample.
// Requires a uniform stride fine enough for second-order differencing;
// refuses otherwise, reporting the required stride.
struct IdentitySeries {
  std::vector<double> t;
  std::vector<double> residual;      // signed
  std::vector<double> scale;         // max(|ddt term|, |dissipation term|)
  std::vector<double> dissipation;   // D(f(t)) >= 0 checked by the caller
};
IdentitySeries l2_identity_residual(const Trajectory& traj, double rho_bar);

// ----- per-trajectory monitors -----
//
// Each returns pass/fail/not_applicable with the worst margin and its time.
// Preconditions that fail produce not_applicable (never a silent pass).

// Fails when rho_bar < 0 (heavier fluid on top: every decay estimate is void).
MonitorResult stable_regime_monitor(const RunConfig& cfg);

MonitorResult identity_monitor(const Trajectory& traj, const RunConfig& cfg,
                               std::vector<double>* residual_out = nullptr);

MonitorResult norm1_decay_monitor(const std::vector<StepRecord>& steps,
                                  const RunConfig& cfg, double step_scale = 1.0);

MonitorResult extremum_monitor(const std::vector<StepRecord>& steps,
                               const RunConfig& cfg, double step_scale = 1.0);

MonitorResult slope_monitor(const std::vector<StepRecord>& steps,
                            const RunConfig& cfg);

MonitorResult mean_monitor(const std::vector<StepRecord>& steps,
                           const RunConfig& cfg);

MonitorResult l2_contraction_monitor(const std::vector<StepRecord>& steps,
                                     const RunConfig& cfg);

// ||f||_{1+delta}(t) + mu * int_0^t ||f||_{2+delta} ds <= ||f0||_{1+delta},
// with mu from decay_margin at the run's initial norm_1. Trapezoid rule in
// time; the tolerance budget includes the estimated integration error.
MonitorResult decay_budget_monitor(const Trajectory& traj, const RunConfig& cfg,
                                   double delta);

// ||f_t||_0 <= rho_bar * norm_1 * ft_bound_factor(dim, norm_1) at every
// sample (f_t recomputed through the run's rhs path); also reports the
// cumulative int ||f_t||_1 dt in the note.
MonitorResult ft_bound_monitor(const Trajectory& traj, const RunConfig& cfg);

MonitorResult j_bound_monitor(const Trajectory& traj, const RunConfig& cfg);

MonitorResult dissipation_sign_monitor(const Trajectory& traj, const RunConfig& cfg);

// Samples (x, y) pairs on a fixed stratified sublattice and audits both the
// mean-value bound |slope quotient| <= grad_linf (within band-limited
// interpolation slack) and the positivity margin of slope_factor.
struct SlopeAudit {
  double min_factor = 0.0;
  double max_quotient = 0.0;
  double grad_linf = 0.0;
};
SlopeAudit slope_pair_audit(const Field& f);

MonitorResult slope_factor_monitor(const Trajectory& traj, const RunConfig& cfg);

// Sample-level diagnostics rows (identity residual column filled when the
// identity monitor applies).
std::vector<DiagRecord> diagnostics_rows(const Trajectory& traj, const RunConfig& cfg);

// The per-step record suite (stable regime, mean conservation, norm_1 decay,
// extremum principles, slope principle, regularized L2 contraction);
// step_scale multiplies the per-step tolerances when records are sparser than
// one per step.
std::vector<MonitorResult> step_monitors(const std::vector<StepRecord>& steps,
                                         const RunConfig& cfg, double step_scale = 1.0);

// The stored-sample suite (identity, decay budgets, ft bound, J bound,
// dissipation sign, slope-factor audit).
std::vector<MonitorResult> trajectory_monitors(const Trajectory& traj, const RunConfig& cfg);

// step_monitors over records rebuilt from the samples (stride-scaled
// tolerances) plus trajectory_monitors: everything verify can recheck from a
// stored trajectory alone.
std::vector<MonitorResult> sample_monitors(const Trajectory& traj, const RunConfig& cfg);

}  // namespace muskat
