#include "muskat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "muskat/common.hpp"
#include "muskat/constants.hpp"
#include "muskat/quadrature.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

const char* to_string(MonitorStatus s) {
  switch (s) {
    case MonitorStatus::pass: return "pass";
    case MonitorStatus::fail: return "fail";
    default: return "not_applicable";
  }
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = kTwoPi / 2.0;
constexpr double kOneThird = 1.0 / 3.0;
constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();

std::string format_at(const char* what, double value, double t) {
  std::ostringstream os;
  os << what << " " << value << " at t = " << t;
  return os.str();
}

double l2_squared(const Field& f) {
  KahanSum acc;
  for (double x : f.v) acc.add(x * x);
  return std::pow(f.grid.h(), f.grid.dim) * acc.value();
}

// ===== pair functionals over the offset table (dim 2) =====
//
// sum over a stride-s x-sublattice of (s h)^2 * sum_{y in full set} h^2 *
// ker(f(x) - f(x-y), o). Per-point partial sums are stored and reduced in a
// fixed order, so the value is independent of the thread count.

template <typename Kernel>
double pair_sum_stride(const Field& f, int stride, Kernel ker) {
  const Grid& g = f.grid;
  const OffsetTable& t = offset_table(g);
  const int n = g.n;
  const int mask = g.mask();
  const int ns = n / stride;
  const std::size_t pts = static_cast<std::size_t>(ns) * ns;
  const std::size_t m = t.half_count();
  const int* J1 = t.j1.data();
  const int* J2 = t.j2.data();
  const double* F = f.v.data();

  std::vector<double> partial(pts);
  parallel_for(pts, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const int x1 = stride * (static_cast<int>(p) / ns);
      const int x2 = stride * (static_cast<int>(p) % ns);
      const double fx = F[static_cast<std::size_t>(x1) * n + x2];
      KahanSum acc;
      for (std::size_t o = 0; o < m; ++o) {
        const std::size_t im =
            static_cast<std::size_t>((x1 - J1[o]) & mask) * n + (std::size_t)((x2 - J2[o]) & mask);
        const std::size_t ip =
            static_cast<std::size_t>((x1 + J1[o]) & mask) * n + (std::size_t)((x2 + J2[o]) & mask);
        acc.add(ker(fx - F[im], o) + ker(fx - F[ip], o));
      }
      partial[p] = acc.value();
    }
  });
  KahanSum total;
  for (double v : partial) total.add(v);
  const double hs = stride * g.h();
  return hs * hs * g.h() * g.h() * total.value();
}

// Full x-sum up to n = 64; above that, stride-2 subsample with Richardson
// correction from the stride-4 value (validated against the full sum at
// n <= 64 in the test suite).
template <typename Kernel>
double pair_functional(const Field& f, Kernel ker) {
  if (f.grid.n <= 64) return pair_sum_stride(f, 1, ker);
  const double s2 = pair_sum_stride(f, 2, ker);
  const double s4 = pair_sum_stride(f, 4, ker);
  return s2 + (s2 - s4) / 3.0;
}

void require_dim2(const Grid& g, const char* what) {
  if (g.dim != 2)
    throw config_error(std::string(what) +
                       ": the x-y double integral is defined for interface dimension 2 only "
                       "(it diverges logarithmically for dimension 1)");
}

double k_unit_of(const Grid& g) { return kTwoPi / g.period; }

// Required sample spacing for second-order differencing of the L2 energy at
// the default identity tolerance: the energy of the slowest mode decays like
// e^{-2 rho_bar kappa_1 t}, and the centered-difference relative error is
// (2 rho_bar kappa_1)^2 dt^2 / 6.
double identity_max_spacing(const Grid& g, double rho_bar, double tol) {
  const double a = 2.0 * std::abs(rho_bar) * k_unit_of(g);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(6.0 * tol) / a;
}

struct SpacingInfo {
  double dt = 0.0;
  bool uniform = false;
};

SpacingInfo sample_spacing(const Trajectory& traj) {
  SpacingInfo s;
  if (traj.size() < 2) return s;
  s.dt = traj[1].t - traj[0].t;
  s.uniform = s.dt > 0.0;
  for (std::size_t i = 2; i < traj.size() && s.uniform; ++i) {
    const double d = traj[i].t - traj[i - 1].t;
    if (std::abs(d - s.dt) > 1e-9 * std::max(s.dt, 1e-300)) s.uniform = false;
  }
  return s;
}

MonitorResult not_applicable(const char* name, const std::string& why) {
  MonitorResult r;
  r.check_name = name;
  r.status = MonitorStatus::not_applicable;
  r.note = why;
  return r;
}

// Track the smallest margin and where it occurred; fail when negative.
struct WorstTracker {
  double margin = std::numeric_limits<double>::infinity();
  double time = 0.0;
  bool any = false;
  void update(double m, double t) {
    if (!any || m < margin) {
      margin = m;
      time = t;
    }
    any = true;
  }
  MonitorResult result(const char* name, std::string note = {}) const {
    MonitorResult r;
    r.check_name = name;
    if (!any) {
      r.status = MonitorStatus::not_applicable;
      r.note = note.empty() ? "no records to check" : note;
      return r;
    }
    r.status = margin >= 0.0 ? MonitorStatus::pass : MonitorStatus::fail;
    r.worst_margin = margin;
    r.time_of_worst = time;
    r.note = std::move(note);
    return r;
  }
};

double critical_size(int dim) { return solve_constant({dim, 0.0, 500}).root; }

}  // namespace

// ===== dissipation =====

double dissipation(const Field& f) {
  require_dim2(f.grid, "dissipation");
  const Grid& g = f.grid;
  Spectrum c = to_spectral(f);
  const std::vector<double> kap = kappa_values(g);
  KahanSum qacc;
  for (std::size_t i = 0; i < c.size(); ++i) qacc.add(kap[i] * std::norm(c[i]));
  const double quad = kTwoPi * g.period * g.period * qacc.value();

  const OffsetTable& t = offset_table(g);
  const double* RA = t.r.data();
  const double* RSQ = t.r_sq.data();
  const double* IR3 = t.inv_r3.data();
  // r2 = 1/r - 1/sqrt(q) - d^2/(2 r^3)  ==  -d^4 (sqrt(q) + 2r) /
  //      (2 r^3 sqrt(q) (sqrt(q) + r)^2),  q = r^2 + d^2: term-wise <= 0 and
  // free of cancellation.
  const double rem = pair_functional(f, [=](double df, std::size_t o) {
    const double d2 = df * df;
    const double q = RSQ[o] + d2;
    const double rq = std::sqrt(q);
    const double s = rq + RA[o];
    return -(d2 * d2) * (rq + 2.0 * RA[o]) * IR3[o] / (2.0 * rq * s * s);
  });
  return quad + rem;
}

double dissipation_lattice(const Field& f) {
  require_dim2(f.grid, "dissipation_lattice");
  const OffsetTable& t = offset_table(f.grid);
  const double* RA = t.r.data();
  const double* RSQ = t.r_sq.data();
  // 1/r - 1/sqrt(q)  ==  d^2 / (r sqrt(q) (sqrt(q) + r))  >=  0 term-wise.
  return pair_functional(f, [=](double df, std::size_t o) {
    const double d2 = df * df;
    const double q = RSQ[o] + d2;
    const double rq = std::sqrt(q);
    return d2 / (RA[o] * rq * (rq + RA[o]));
  });
}

// ===== J functional =====

JBoundResult j_bound_check(const Field& f) {
  require_dim2(f.grid, "j_bound_check");
  const OffsetTable& t = offset_table(f.grid);
  const double* RA = t.r.data();
  const double* RSQ = t.r_sq.data();
  // (1/r) (1 - 1/sqrt(1 + (d/r)^2))  ==  d^2 / (r sqrt(q) (sqrt(q) + r)).
  JBoundResult out;
  out.j = pair_functional(f, [=](double df, std::size_t o) {
    const double d2 = df * df;
    const double q = RSQ[o] + d2;
    const double rq = std::sqrt(q);
    return d2 / (RA[o] * rq * (rq + RA[o]));
  });
  out.bound = 4.0 * kPi * std::sqrt(2.0) * sup_norms(f).l1;
  out.pass = out.j <= out.bound + 1e-12 * std::max(1.0, out.bound);
  return out;
}

// ===== L2 identity =====

IdentitySeries l2_identity_residual(const Trajectory& traj, double rho_bar) {
  if (traj.size() < 3)
    throw config_error("l2_identity_residual: needs at least 3 samples for differencing");
  require_dim2(traj[0].f.grid, "l2_identity_residual");
  const SpacingInfo sp = sample_spacing(traj);
  if (!sp.uniform)
    throw config_error("l2_identity_residual: samples are not uniformly spaced in time");
  const double dt_max = identity_max_spacing(traj[0].f.grid, rho_bar, 1e-2);
  if (sp.dt > dt_max) {
    std::ostringstream os;
    os << "l2_identity_residual: sample spacing " << sp.dt
       << " is too coarse for second-order differencing; required spacing <= " << dt_max
       << " (reduce the output stride)";
    throw config_error(os.str());
  }

  const std::size_t m = traj.size();
  std::vector<double> energy(m);
  IdentitySeries out;
  out.t.resize(m);
  out.residual.resize(m);
  out.scale.resize(m);
  out.dissipation.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.t[i] = traj[i].t;
    energy[i] = l2_squared(traj[i].f);
    out.dissipation[i] = dissipation(traj[i].f);
  }
  for (std::size_t i = 0; i < m; ++i) {
    double ddt;
    if (i == 0)
      ddt = (-3.0 * energy[0] + 4.0 * energy[1] - energy[2]) / (2.0 * sp.dt);
    else if (i == m - 1)
      ddt = (3.0 * energy[m - 1] - 4.0 * energy[m - 2] + energy[m - 3]) / (2.0 * sp.dt);
    else
      ddt = (energy[i + 1] - energy[i - 1]) / (2.0 * sp.dt);
    const double diss_term = (rho_bar / kPi) * out.dissipation[i];
    out.residual[i] = ddt + diss_term;
    out.scale[i] = std::max(std::abs(ddt), std::abs(diss_term));
  }
  return out;
}

// ===== monitors =====

MonitorResult stable_regime_monitor(const RunConfig& cfg) {
  MonitorResult r;
  r.check_name = "stable_regime";
  r.worst_margin = cfg.rho_bar;
  if (cfg.rho_bar < 0.0) {
    r.status = MonitorStatus::fail;
    r.note = "rho_bar < 0: heavier fluid on top, decay estimates do not apply";
  } else {
    r.status = MonitorStatus::pass;
  }
  return r;
}

MonitorResult identity_monitor(const Trajectory& traj, const RunConfig& cfg,
                               std::vector<double>* residual_out) {
  static const char* kName = "l2_identity";
  if (residual_out) residual_out->assign(traj.size(), kQuietNan);
  if (cfg.dimension != 2)
    return not_applicable(kName, "dissipation integral undefined for dimension 1");
  if (cfg.rho_bar == 0.0) return not_applicable(kName, "rho_bar = 0: no evolution");
  if (cfg.rhs.path == RhsPath::regularized)
    return not_applicable(kName, "identity holds for the unregularized equation only");
  if (cfg.rhs.path == RhsPath::series && cfg.rhs.n_max == 0)
    return not_applicable(kName, "linear-only evolution: the identity is for the full equation");
  if (traj.size() < 3) return not_applicable(kName, "fewer than 3 stored samples");

  IdentitySeries series;
  try {
    series = l2_identity_residual(traj, cfg.rho_bar);
  } catch (const config_error& e) {
    return not_applicable(kName, e.what());
  }
  if (residual_out) *residual_out = series.residual;

  const double tol = cfg.diagnostics.identity_tol;
  WorstTracker w;
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    w.update(tol * series.scale[i] - std::abs(series.residual[i]), series.t[i]);
    if (series.scale[i] > 0.0)
      worst_rel = std::max(worst_rel, std::abs(series.residual[i]) / series.scale[i]);
  }
  std::ostringstream os;
  os << "max relative residual " << worst_rel << " (tol " << tol << ")";
  return w.result(kName, os.str());
}

MonitorResult norm1_decay_monitor(const std::vector<StepRecord>& steps, const RunConfig& cfg,
                                  double step_scale) {
  static const char* kName = "norm1_decay";
  if (cfg.rho_bar <= 0.0)
    return not_applicable(kName, "decay requires the stable regime (rho_bar > 0)");
  if (steps.empty()) return not_applicable(kName, "no records");
  const double k0 = critical_size(cfg.dimension);
  if (!(steps.front().norm1 < k0)) {
    std::ostringstream os;
    os << "norm_1(f0) = " << steps.front().norm1 << " is not below the critical size " << k0;
    return not_applicable(kName, os.str());
  }
  const double tol = cfg.diagnostics.per_step_tol * step_scale;
  WorstTracker w;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i)
    w.update(tol - (steps[i + 1].norm1 - steps[i].norm1), steps[i + 1].t);
  if (!w.any) return not_applicable(kName, "single record: nothing to compare");
  return w.result(kName, format_at("largest per-step increase", tol - w.margin, w.time));
}

MonitorResult extremum_monitor(const std::vector<StepRecord>& steps, const RunConfig& cfg,
                               double step_scale) {
  static const char* kName = "extremum";
  if (steps.size() < 2) return not_applicable(kName, "fewer than 2 records");
  const double tol = cfg.diagnostics.per_step_tol * step_scale;
  WorstTracker w;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    w.update(tol - (steps[i + 1].fmax - steps[i].fmax), steps[i + 1].t);
    w.update(tol - (steps[i].fmin - steps[i + 1].fmin), steps[i + 1].t);
  }
  return w.result(kName);
}

MonitorResult slope_monitor(const std::vector<StepRecord>& steps, const RunConfig& cfg) {
  static const char* kName = "slope_principle";
  if (cfg.rho_bar <= 0.0)
    return not_applicable(kName, "slope principle requires the stable regime (rho_bar > 0)");
  if (steps.empty()) return not_applicable(kName, "no records");
  const double g0 = steps.front().grad_linf;
  if (!(g0 < kOneThird)) {
    std::ostringstream os;
    os << "grad_linf(f0) = " << g0 << " is not below 1/3";
    return not_applicable(kName, os.str());
  }
  const double tol = cfg.diagnostics.slope_tol;
  WorstTracker w;
  for (const StepRecord& s : steps) {
    w.update(g0 + tol - s.grad_linf, s.t);
    w.update(kOneThird - s.grad_linf, s.t);
  }
  return w.result(kName, format_at("grad_linf(f0) =", g0, steps.front().t));
}

MonitorResult mean_monitor(const std::vector<StepRecord>& steps, const RunConfig& cfg) {
  static const char* kName = "mean_conservation";
  if (steps.empty()) return not_applicable(kName, "no records");
  const double mean0 = steps.front().mean;
  const double tol = cfg.diagnostics.mean_tol * std::max(1.0, std::abs(mean0));
  WorstTracker w;
  for (const StepRecord& s : steps) w.update(tol - std::abs(s.mean - mean0), s.t);
  return w.result(kName);
}

MonitorResult l2_contraction_monitor(const std::vector<StepRecord>& steps, const RunConfig& cfg) {
  static const char* kName = "l2_contraction";
  if (cfg.rhs.path != RhsPath::regularized)
    return not_applicable(kName,
                          "checked on the regularized path only (covered by l2_identity "
                          "otherwise)");
  if (cfg.rho_bar < 0.0)
    return not_applicable(kName, "requires rho_bar >= 0");
  if (steps.size() < 2) return not_applicable(kName, "fewer than 2 records");
  const double tol = cfg.diagnostics.contraction_tol;
  WorstTracker w;
  for (std::size_t i = 0; i + 1 < steps.size(); ++i)
    w.update(tol - (steps[i + 1].l2 - steps[i].l2), steps[i + 1].t);
  return w.result(kName);
}

MonitorResult decay_budget_monitor(const Trajectory& traj, const RunConfig& cfg, double delta) {
  const char* name = delta == 0.0 ? "decay_budget_delta0" : "decay_budget";
  if (cfg.rho_bar <= 0.0)
    return not_applicable(name, "decay budget requires the stable regime (rho_bar > 0)");
  if (traj.size() < 2) return not_applicable(name, "fewer than 2 samples");
  if (!(delta >= 0.0) || delta >= 1.0)
    throw config_error("decay_budget_monitor: requires 0 <= delta < 1");

  const Grid& g = traj[0].f.grid;
  const double n1_0 = norm_s(traj[0].f, 1.0);
  if (!(n1_0 < 1.0)) return not_applicable(name, "norm_1(f0) >= 1: outside the series regime");
  const double mu = decay_margin({cfg.dimension, delta, 500}, n1_0);
  if (!(mu > 0.0)) {
    std::ostringstream os;
    os << "decay margin mu = " << mu << " at norm_1(f0) = " << n1_0 << " is not positive";
    return not_applicable(name, os.str());
  }

  const std::size_t m = traj.size();
  std::vector<double> n1d(m), n2d(m);
  for (std::size_t i = 0; i < m; ++i) {
    Spectrum c = to_spectral(traj[i].f);
    n1d[i] = norm_s(g, c, 1.0 + delta);
    n2d[i] = norm_s(g, c, 2.0 + delta);
  }

  // Trapezoid integral of the higher norm with a running second-difference
  // error estimate (|E| <= sum dt^3 |g''| / 12 per interval).
  const double tol = cfg.diagnostics.budget_tol;
  WorstTracker w;
  double integral = 0.0;
  double err_est = 0.0;
  w.update(tol - 0.0, traj[0].t);  // t = 0 term: budget of the initial sample is 0
  for (std::size_t i = 1; i < m; ++i) {
    const double dt = traj[i].t - traj[i - 1].t;
    integral += 0.5 * dt * (n2d[i] + n2d[i - 1]);
    const std::size_t j = std::min(std::max<std::size_t>(i, 1), m - 2);
    if (m >= 3) err_est += (dt / 12.0) * std::abs(n2d[j + 1] - 2.0 * n2d[j] + n2d[j - 1]);
    const double budget = n1d[i] + mu * integral - n1d[0];
    w.update(tol + mu * err_est - budget, traj[i].t);
  }
  std::ostringstream os;
  os << "mu = " << mu << ", integral error estimate " << err_est;
  return w.result(name, os.str());
}

MonitorResult ft_bound_monitor(const Trajectory& traj, const RunConfig& cfg) {
  static const char* kName = "ft_bound";
  if (cfg.rho_bar <= 0.0)
    return not_applicable(kName, "a-priori bound requires the stable regime (rho_bar > 0)");
  if (cfg.rhs.path == RhsPath::regularized)
    return not_applicable(kName, "bound derived for the unregularized equation");
  if (traj.empty()) return not_applicable(kName, "no samples");

  const Grid& g = traj[0].f.grid;
  WorstTracker w;
  double prev_ft1 = 0.0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double n1 = norm_s(traj[i].f, 1.0);
    if (!(n1 < 0.9)) {
      std::ostringstream os;
      os << "norm_1 = " << n1 << " at t = " << traj[i].t << ": outside the small-data regime";
      return not_applicable(kName, os.str());
    }
    RhsResult ft;
    try {
      ft = rhs_eval(traj[i].f, cfg.rhs, cfg.rho_bar);
    } catch (const error& e) {
      return not_applicable(kName, std::string("rhs evaluation refused: ") + e.what());
    }
    Spectrum c = to_spectral(ft.value);
    const double ft0 = norm_s(g, c, 0.0);
    const double ft1 = norm_s(g, c, 1.0);
    const double bound = cfg.rho_bar * n1 * ft_bound_factor(cfg.dimension, n1);
    w.update(bound + 1e-9 * std::max(1.0, bound) - ft0, traj[i].t);
    if (i > 0) cumulative += 0.5 * (traj[i].t - traj[i - 1].t) * (ft1 + prev_ft1);
    prev_ft1 = ft1;
  }
  std::ostringstream os;
  os << "cumulative integral of norm_1(f_t) dt = " << cumulative;
  if (!std::isfinite(cumulative)) {
    MonitorResult r = w.result(kName, os.str());
    r.status = MonitorStatus::fail;
    return r;
  }
  return w.result(kName, os.str());
}

MonitorResult j_bound_monitor(const Trajectory& traj, const RunConfig& cfg) {
  static const char* kName = "j_bound";
  if (cfg.dimension != 2) return not_applicable(kName, "defined for interface dimension 2 only");
  if (traj.empty()) return not_applicable(kName, "no samples");
  WorstTracker w;
  for (const Sample& s : traj) {
    const JBoundResult r = j_bound_check(s.f);
    w.update(r.bound + 1e-12 * std::max(1.0, r.bound) - r.j, s.t);
  }
  return w.result(kName);
}

MonitorResult dissipation_sign_monitor(const Trajectory& traj, const RunConfig& cfg) {
  static const char* kName = "dissipation_sign";
  if (cfg.dimension != 2) return not_applicable(kName, "defined for interface dimension 2 only");
  if (traj.empty()) return not_applicable(kName, "no samples");
  WorstTracker w;
  for (const Sample& s : traj) w.update(dissipation(s.f), s.t);
  return w.result(kName, "margin is min D(f(t)) over the samples");
}

// ===== slope-factor audit =====

SlopeAudit slope_pair_audit(const Field& f) {
  const Grid& g = f.grid;
  const OffsetTable& t = offset_table(g);
  Spectrum c = to_spectral(f);
  const std::vector<std::vector<double>> grad = gradient_values(g, c);

  SlopeAudit audit;
  audit.min_factor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    double len_sq = grad[0][i] * grad[0][i];
    if (g.dim == 2) len_sq += grad[1][i] * grad[1][i];
    audit.grad_linf = std::max(audit.grad_linf, std::sqrt(len_sq));
  }

  const int n = g.n;
  const int mask = g.mask();
  const std::size_t m = t.half_count();
  const std::size_t o_step = std::max<std::size_t>(1, m / 257);
  const int sx = std::max(1, n / 16);

  auto visit = [&](double fx, double sdir, double fm, std::size_t o) {
    // +y and -y slope quotients vs the directional derivative along +-y.
    const double delta = (fx - fm) * t.inv_r[o];
    audit.max_quotient = std::max(audit.max_quotient, std::abs(delta));
    audit.min_factor = std::min(audit.min_factor, slope_factor(delta, sdir));
  };

  if (g.dim == 2) {
    for (int x1 = 0; x1 < n; x1 += sx)
      for (int x2 = 0; x2 < n; x2 += sx) {
        const std::size_t x = static_cast<std::size_t>(x1) * n + x2;
        const double fx = f.v[x];
        for (std::size_t o = 0; o < m; o += o_step) {
          const std::size_t im =
              static_cast<std::size_t>((x1 - t.j1[o]) & mask) * n +
              (std::size_t)((x2 - t.j2[o]) & mask);
          const std::size_t ip =
              static_cast<std::size_t>((x1 + t.j1[o]) & mask) * n +
              (std::size_t)((x2 + t.j2[o]) & mask);
          const double sdir =
              (grad[0][x] * t.y1[o] + grad[1][x] * t.y2[o]) * t.inv_r[o];
          visit(fx, sdir, f.v[im], o);
          visit(fx, -sdir, f.v[ip], o);
        }
      }
  } else {
    for (int x1 = 0; x1 < n; x1 += sx) {
      const std::size_t x = static_cast<std::size_t>(x1);
      const double fx = f.v[x];
      for (std::size_t o = 0; o < m; o += o_step) {
        const std::size_t im = static_cast<std::size_t>((x1 - t.j1[o]) & mask);
        const std::size_t ip = static_cast<std::size_t>((x1 + t.j1[o]) & mask);
        const double sdir = grad[0][x] * t.y1[o] * t.inv_r[o];
        visit(fx, sdir, f.v[im], o);
        visit(fx, -sdir, f.v[ip], o);
      }
    }
  }
  if (!std::isfinite(audit.min_factor)) audit.min_factor = 0.0;
  return audit;
}

MonitorResult slope_factor_monitor(const Trajectory& traj, const RunConfig& cfg) {
  static const char* kName = "slope_factor";
  if (traj.empty()) return not_applicable(kName, "no samples");
  (void)cfg;
  WorstTracker w;
  double max_q = 0.0;
  for (const Sample& s : traj) {
    const SlopeAudit a = slope_pair_audit(s.f);
    max_q = std::max(max_q, a.max_quotient);
    if (a.grad_linf < kOneThird && a.max_quotient <= kOneThird)
      w.update(a.min_factor, s.t);
  }
  if (!w.any) {
    std::ostringstream os;
    os << "no sample kept all slope quotients within [-1/3, 1/3] (max quotient " << max_q << ")";
    return not_applicable(kName, os.str());
  }
  return w.result(kName, "margin is min slope_factor over sampled pairs");
}

// ===== per-sample rows and monitor suites =====

std::vector<DiagRecord> diagnostics_rows(const Trajectory& traj, const RunConfig& cfg) {
  std::vector<double> residual;
  identity_monitor(traj, cfg, &residual);

  std::vector<DiagRecord> rows;
  rows.reserve(traj.size());
  const double delta = cfg.diagnostics.delta;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Sample& s = traj[i];
    DiagRecord row;
    row.t = s.t;
    const SupNorms sn = sup_norms(s.f);
    row.l2 = sn.l2;
    row.linf = sn.linf;
    row.grad_linf = sn.grad_linf;
    Spectrum c = to_spectral(s.f);
    row.norm_1 = norm_s(s.f.grid, c, 1.0);
    row.norm_2 = norm_s(s.f.grid, c, 2.0);
    row.norm_1_plus_delta = norm_s(s.f.grid, c, 1.0 + delta);
    row.identity_residual = i < residual.size() ? residual[i] : kQuietNan;
    std::string flags;
    if (!std::isfinite(row.identity_residual)) flags = "identity_na";
    if (spectral_tail_ratio(s.f.grid, c) > 1e-8)
      flags += flags.empty() ? "rough_field" : ";rough_field";
    row.flags = flags.empty() ? "ok" : flags;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MonitorResult> step_monitors(const std::vector<StepRecord>& steps,
                                         const RunConfig& cfg, double step_scale) {
  std::vector<MonitorResult> out;
  out.push_back(stable_regime_monitor(cfg));
  out.push_back(mean_monitor(steps, cfg));
  out.push_back(norm1_decay_monitor(steps, cfg, step_scale));
  out.push_back(extremum_monitor(steps, cfg, step_scale));
  out.push_back(slope_monitor(steps, cfg));
  out.push_back(l2_contraction_monitor(steps, cfg));
  return out;
}

std::vector<MonitorResult> trajectory_monitors(const Trajectory& traj, const RunConfig& cfg) {
  std::vector<MonitorResult> out;
  out.push_back(identity_monitor(traj, cfg));
  out.push_back(decay_budget_monitor(traj, cfg, cfg.diagnostics.delta));
  out.push_back(decay_budget_monitor(traj, cfg, 0.0));
  out.push_back(ft_bound_monitor(traj, cfg));
  out.push_back(j_bound_monitor(traj, cfg));
  out.push_back(dissipation_sign_monitor(traj, cfg));
  out.push_back(slope_factor_monitor(traj, cfg));
  return out;
}

std::vector<MonitorResult> sample_monitors(const Trajectory& traj, const RunConfig& cfg) {
  std::vector<StepRecord> records;
  records.reserve(traj.size());
  for (const Sample& s : traj) {
    StepRecord r;
    r.t = s.t;
    const SupNorms sn = sup_norms(s.f);
    r.fmax = *std::max_element(s.f.v.begin(), s.f.v.end());
    r.fmin = *std::min_element(s.f.v.begin(), s.f.v.end());
    r.mean = field_mean(s.f);
    r.norm1 = norm_s(s.f, 1.0);
    r.grad_linf = sn.grad_linf;
    r.l2 = sn.l2;
    records.push_back(r);
  }

  double step_scale = 1.0;
  const SpacingInfo sp = sample_spacing(traj);
  const double dt =
      cfg.scheme.dt > 0.0 ? cfg.scheme.dt : 0.5 * (cfg.period / std::max(1, cfg.n));
  if (sp.uniform && dt > 0.0) step_scale = std::max(1.0, std::round(sp.dt / dt));

  std::vector<MonitorResult> out = step_monitors(records, cfg, step_scale);
  std::vector<MonitorResult> traj_side = trajectory_monitors(traj, cfg);
  out.insert(out.end(), std::make_move_iterator(traj_side.begin()),
             std::make_move_iterator(traj_side.end()));
  return out;
}

}  // namespace muskat
