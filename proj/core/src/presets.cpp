#include "muskat/presets.hpp"

#include <cmath>

#include "muskat/common.hpp"
#include "muskat/constants.hpp"
#include "muskat/field.hpp"

namespace muskat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// x coordinate along axis 0 (and axis 1 for dim 2) of a flat index.
double coord(const Grid& g, std::size_t i, int axis) {
  const double h = g.h();
  if (g.dim == 1) return h * static_cast<double>(i);
  return axis == 0 ? h * static_cast<double>(i / static_cast<std::size_t>(g.n))
                   : h * static_cast<double>(i % static_cast<std::size_t>(g.n));
}

Field cosine_mode(const Grid& g, double amp, int k_axis0, int k_axis1, double phase) {
  Field f = make_field(g);
  const double k_unit = kTwoPi / g.period;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    double arg = k_unit * k_axis0 * coord(g, i, 0) + phase;
    if (g.dim == 2) arg += k_unit * k_axis1 * coord(g, i, 1);
    f.v[i] = amp * std::cos(arg);
  }
  return f;
}

Field bump_field(const Grid& g, double peak) {
  // Smooth concentrated bump: product of exp(2 (cos x_i - 1)) per axis,
  // mean-subtracted and rescaled so the peak magnitude equals `peak`.
  Field f = make_field(g);
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    double v = std::exp(2.0 * (std::cos(coord(g, i, 0)) - 1.0));
    if (g.dim == 2) v *= std::exp(2.0 * (std::cos(coord(g, i, 1)) - 1.0));
    f.v[i] = v;
  }
  const double mean = field_mean(f);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    f.v[i] -= mean;
    max_abs = std::max(max_abs, std::abs(f.v[i]));
  }
  const double scale = peak / max_abs;
  for (double& v : f.v) v *= scale;
  return f;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"single_mode", "two_mode", "bump", "near_k0", "steep_slope", "unstable"};
}

Field preset_field(const std::string& name, const Grid& g, double amplitude) {
  const bool has_amp = amplitude > 0.0;
  if (name == "single_mode") return cosine_mode(g, has_amp ? amplitude : 0.2, 1, 0, 0.0);
  if (name == "two_mode") {
    // norm_1 = 2 A: A cos(x1 + 0.3) contributes A, A/2 cos(2 x2 + 1.1)
    // contributes 2 * A/2. The amplitude parameter is the norm_1 target.
    const double target = has_amp ? amplitude : 0.2;
    const double a = 0.5 * target;
    Field f = cosine_mode(g, a, 1, 0, 0.3);
    const Field second =
        g.dim == 2 ? cosine_mode(g, 0.5 * a, 0, 2, 1.1) : cosine_mode(g, 0.5 * a, 2, 0, 1.1);
    for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] += second.v[i];
    return f;
  }
  if (name == "bump") return bump_field(g, has_amp ? amplitude : 0.1);
  if (name == "near_k0") {
    // The amplitude parameter is the norm_1 target; default 95% of critical.
    const double k0 = solve_constant({g.dim, 0.0, 500}).root;
    return cosine_mode(g, has_amp ? amplitude : 0.95 * k0, 1, 0, 0.0);
  }
  if (name == "steep_slope") return cosine_mode(g, has_amp ? amplitude : 0.30, 1, 0, 0.0);
  if (name == "unstable") return cosine_mode(g, has_amp ? amplitude : 1e-3, 1, 0, 0.0);
  throw config_error("unknown preset '" + name + "'");
}

RunConfig preset_config(const std::string& name, int dim) {
  if (dim <= 0) dim = 2;
  if (dim != 1 && dim != 2) throw config_error("preset_config: dimension must be 1 or 2");
  {
    // Validate the name eagerly (preset_field throws on unknown names).
    bool known = false;
    for (const std::string& p : preset_names()) known = known || (p == name);
    if (!known) throw config_error("unknown preset '" + name + "'");
  }

  RunConfig cfg;
  cfg.dimension = dim;
  cfg.n = (dim == 2) ? 64 : 256;
  cfg.period = kTwoPi;
  cfg.rho_bar = (name == "unstable") ? -1.0 : 1.0;
  cfg.scheme.kind = SchemeKind::if_rk4;
  cfg.scheme.dt = 0.0;  // default 0.5 * h
  cfg.scheme.t_end = 5.0;
  const double dt_eff = 0.5 * (cfg.period / cfg.n);
  const double nsteps = std::ceil(cfg.scheme.t_end / dt_eff);
  cfg.scheme.stride = std::max(1, static_cast<int>(std::lround(nsteps / 50.0)));
  cfg.rhs = RhsSpec{};
  cfg.initial.preset = name;
  return cfg;
}

}  // namespace muskat
