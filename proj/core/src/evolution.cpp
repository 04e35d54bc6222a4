#include "muskat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "muskat/common.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/io.hpp"
#include "muskat/presets.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

namespace {

double effective_dt(const Grid& g, const SchemeSpec& scheme) {
  if (scheme.dt > 0.0) {
    if (!std::isfinite(scheme.dt)) throw config_error("scheme: dt must be finite");
    return scheme.dt;
  }
  return 0.5 * g.h();
}

// ===== one time integrator instance (fixed grid, path, dt) =====
//
// State lives in spectral space. The integrating-factor scheme applies the
// exact exponential of the linear symbol and advances only the quadrature
// remainder explicitly (classical fourth-order Lawson scheme):
//
//   k1 = G(c)                      k3 = G(Eh c + (dt/2) k2)
//   k2 = G(Eh (c + (dt/2) k1))     k4 = G(E c + dt Eh k3)
//   c+ = E c + (dt/6) (E k1 + 2 Eh (k2 + k3) + k4),
//
// with E = e^{dt l}, Eh = e^{dt l / 2}. With G == 0 this reproduces e^{t l}
// exactly; the symbol vanishes at k = 0, so the mean is conserved bitwise.

struct Integrator {
  Grid g;
  SchemeKind kind;
  RhsSpec spec;
  double rho_bar;
  double dt;
  std::vector<double> ell, efull, ehalf;

  Integrator(const Grid& g_, SchemeKind kind_, const RhsSpec& spec_, double rho_bar_, double dt_)
      : g(g_), kind(kind_), spec(spec_), rho_bar(rho_bar_), dt(dt_) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("step: dt must be positive");
    ell = linear_symbol(g, spec, rho_bar);
    double lmax = 0.0;
    for (double e : ell) lmax = std::max(lmax, std::abs(e));
    if (kind == SchemeKind::rk4 && lmax > 0.0 && dt > 2.8 / lmax) {
      std::ostringstream os;
      os << "explicit RK4 refused: dt = " << dt << " exceeds the stability interval 2.8/max|l(k)| = "
         << 2.8 / lmax << "; reduce dt or use the integrating-factor scheme";
      throw numeric_error(os.str());
    }
    if (kind == SchemeKind::if_rk4) {
      efull.resize(ell.size());
      ehalf.resize(ell.size());
      for (std::size_t i = 0; i < ell.size(); ++i) {
        efull[i] = std::exp(dt * ell[i]);
        ehalf[i] = std::exp(0.5 * dt * ell[i]);
      }
    }
  }

  Spectrum eval_g(const Spectrum& c, const char* stage) const {
    Field f = to_physical(g, c);
    for (std::size_t i = 0; i < f.v.size(); ++i) {
      if (!std::isfinite(f.v[i])) {
        std::ostringstream os;
        os << "time step stage " << stage << ": non-finite field value at grid point " << i;
        throw numeric_error(os.str());
      }
    }
    Spectrum k = to_spectral(rhs_remainder(f, spec, rho_bar));
    k[0] = 0.0;  // the remainder is mean-free; drop transform roundoff in the conserved mode
    return k;
  }

  Spectrum eval_full(const Spectrum& c, const char* stage) const {
    Spectrum k = eval_g(c, stage);
    for (std::size_t i = 0; i < k.size(); ++i) k[i] += ell[i] * c[i];
    return k;
  }

  Spectrum advance(const Spectrum& c) const {
    const std::size_t m = c.size();
    if (kind == SchemeKind::if_rk4) {
      const Spectrum k1 = eval_g(c, "k1");
      Spectrum a(m);
      for (std::size_t i = 0; i < m; ++i) a[i] = ehalf[i] * (c[i] + 0.5 * dt * k1[i]);
      const Spectrum k2 = eval_g(a, "k2");
      for (std::size_t i = 0; i < m; ++i) a[i] = ehalf[i] * c[i] + 0.5 * dt * k2[i];
      const Spectrum k3 = eval_g(a, "k3");
      for (std::size_t i = 0; i < m; ++i) a[i] = efull[i] * c[i] + dt * ehalf[i] * k3[i];
      const Spectrum k4 = eval_g(a, "k4");
      Spectrum out(m);
      for (std::size_t i = 0; i < m; ++i)
        out[i] = efull[i] * c[i] +
                 (dt / 6.0) * (efull[i] * k1[i] + 2.0 * ehalf[i] * (k2[i] + k3[i]) + k4[i]);
      return out;
    }
    const Spectrum k1 = eval_full(c, "k1");
    Spectrum a(m);
    for (std::size_t i = 0; i < m; ++i) a[i] = c[i] + 0.5 * dt * k1[i];
    const Spectrum k2 = eval_full(a, "k2");
    for (std::size_t i = 0; i < m; ++i) a[i] = c[i] + 0.5 * dt * k2[i];
    const Spectrum k3 = eval_full(a, "k3");
    for (std::size_t i = 0; i < m; ++i) a[i] = c[i] + dt * k3[i];
    const Spectrum k4 = eval_full(a, "k4");
    Spectrum out(m);
    for (std::size_t i = 0; i < m; ++i)
      out[i] = c[i] + (dt / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    return out;
  }
};

void validate_run_config(const RunConfig& cfg) {
  make_grid(cfg.dimension, cfg.n, cfg.period);  // validates dimension/n/period
  if (!std::isfinite(cfg.rho_bar)) throw config_error("config: rho_bar must be finite");
  if (!(cfg.scheme.t_end > 0.0) || !std::isfinite(cfg.scheme.t_end))
    throw config_error("config: t_end must be positive and finite");
  if (cfg.scheme.stride < 1) throw config_error("config: stride must be >= 1");
  const DiagnosticsSpec& d = cfg.diagnostics;
  if (!(d.delta >= 0.0) || d.delta >= 1.0)
    throw config_error("config: diagnostics.delta must lie in [0, 1)");
  for (double tol : {d.identity_tol, d.per_step_tol, d.slope_tol, d.mean_tol, d.budget_tol,
                     d.contraction_tol})
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw config_error("config: diagnostics tolerances must be positive");
}

StepRecord record_of(const Grid& g, double t, const Field& f, const Spectrum& c) {
  StepRecord r;
  r.t = t;
  r.fmax = *std::max_element(f.v.begin(), f.v.end());
  r.fmin = *std::min_element(f.v.begin(), f.v.end());
  r.mean = c[0].real();
  r.norm1 = norm_s(g, c, 1.0);
  KahanSum e;
  for (const std::complex<double>& z : c) e.add(std::norm(z));
  r.l2 = std::sqrt(std::pow(g.period, g.dim) * e.value());
  const std::vector<std::vector<double>> grad = gradient_values(g, c);
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    double len_sq = grad[0][i] * grad[0][i];
    if (g.dim == 2) len_sq += grad[1][i] * grad[1][i];
    r.grad_linf = std::max(r.grad_linf, std::sqrt(len_sq));
  }
  return r;
}

}  // namespace

Field step(const Field& f, const SchemeSpec& scheme, const RhsSpec& rhs, double rho_bar) {
  const double dt = effective_dt(f.grid, scheme);
  const Integrator integ(f.grid, scheme.kind, rhs, rho_bar, dt);
  return to_physical(f.grid, integ.advance(to_spectral(f)));
}

Field mollify_initial(const Field& f0, double eps) {
  if (!(eps > 0.0) || !(eps <= 1.0))
    throw config_error("mollify_initial: requires eps in (0, 1]");
  return mollify(f0, eps);
}

Field initial_field(const RunConfig& cfg) {
  const Grid g = make_grid(cfg.dimension, cfg.n, cfg.period);
  const InitialSpec& ini = cfg.initial;
  const int sources =
      (ini.preset.empty() ? 0 : 1) + (ini.modes.empty() ? 0 : 1) + (ini.file.empty() ? 0 : 1);
  if (sources == 0)
    throw config_error("initial: specify one of preset, modes, or file");
  if (sources > 1)
    throw config_error("initial: preset, modes, and file are mutually exclusive");

  Field f;
  if (!ini.file.empty()) {
    f = load_snapshot(ini.file).f;
    if (!(f.grid == g))
      throw config_error("initial: snapshot grid does not match the run configuration");
  } else if (!ini.modes.empty()) {
    f = make_field(g);
    const double h = g.h();
    for (const InitialSpec::Mode& mode : ini.modes) {
      if (static_cast<int>(mode.k.size()) != g.dim)
        throw config_error("initial: mode wavevector length must equal the dimension");
      if (!std::isfinite(mode.amp) || !std::isfinite(mode.phase))
        throw config_error("initial: mode amplitude and phase must be finite");
      const double k_unit = 6.283185307179586476925286766559 / g.period;
      for (std::size_t i = 0; i < f.v.size(); ++i) {
        double arg = mode.phase;
        if (g.dim == 2) {
          arg += k_unit * mode.k[0] * (h * static_cast<double>(i / g.n)) +
                 k_unit * mode.k[1] * (h * static_cast<double>(i % g.n));
        } else {
          arg += k_unit * mode.k[0] * (h * static_cast<double>(i));
        }
        f.v[i] += mode.amp * std::cos(arg);
      }
    }
  } else {
    f = preset_field(ini.preset, g, ini.amplitude);
  }

  if (ini.mollify_eps != 0.0) f = mollify_initial(f, ini.mollify_eps);
  return f;
}

bool RunResult::passed() const {
  if (aborted) return false;
  for (const MonitorResult& m : monitors)
    if (m.status == MonitorStatus::fail) return false;
  return true;
}

RunResult run(const RunConfig& cfg) {
  validate_run_config(cfg);
  RunResult res;
  res.config = cfg;

  const Grid g = make_grid(cfg.dimension, cfg.n, cfg.period);
  Field f = initial_field(cfg);
  const double dt = effective_dt(g, cfg.scheme);
  const int stride = cfg.scheme.stride;
  long nsteps = static_cast<long>(std::ceil(cfg.scheme.t_end / dt - 1e-12));
  if (nsteps < 1) nsteps = 1;
  // Round the step count up to a stride multiple so the stored samples stay
  // uniformly spaced (the identity differencing requires that).
  nsteps = ((nsteps + stride - 1) / stride) * stride;

  const Integrator integ(g, cfg.scheme.kind, cfg.rhs, cfg.rho_bar, dt);
  Spectrum c = to_spectral(f);
  res.steps.push_back(record_of(g, 0.0, f, c));
  res.samples.push_back({0.0, f});

  for (long i = 1; i <= nsteps; ++i) {
    const double t = static_cast<double>(i) * dt;
    try {
      c = integ.advance(c);
      f = to_physical(g, c);
      for (double v : f.v)
        if (!std::isfinite(v)) throw numeric_error("non-finite field after the step");
    } catch (const error& e) {
      res.aborted = true;
      std::ostringstream os;
      os << "step " << i << " (t = " << t << "): " << e.what();
      res.abort_reason = os.str();
      break;
    }
    res.steps.push_back(record_of(g, t, f, c));
    if (i % stride == 0) res.samples.push_back({t, f});
  }

  res.monitors = step_monitors(res.steps, cfg, 1.0);
  std::vector<MonitorResult> traj = trajectory_monitors(res.samples, cfg);
  res.monitors.insert(res.monitors.end(), std::make_move_iterator(traj.begin()),
                      std::make_move_iterator(traj.end()));
  MonitorResult completed;
  completed.check_name = "completed";
  completed.status = res.aborted ? MonitorStatus::fail : MonitorStatus::pass;
  completed.note = res.abort_reason;
  res.monitors.push_back(completed);

  res.diag = diagnostics_rows(res.samples, cfg);
  return res;
}

}  // namespace muskat
