#include "muskat/rhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "muskat/common.hpp"
#include "muskat/constants.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// ===== remainder quadrature drivers =====
//
// Gather form: every grid point x accumulates its own sum over the fixed
// offset order, each half-set offset contributing the +y and -y terms of the
// principal-value pairing.  Results are independent of the thread count bit
// for bit, because no partial sums ever cross points.
//
//   num(x, y) = (grad f(x) - grad f(x - y)) . y
//   term(x,y) = num(x, y) * K(f(x) - f(x - y), y)
//   out(x)    = scale * sum_half [ term(x, +y) + term(x, -y) ]
//
// K >= 0 carries the kernel shape; each path supplies its own K below.

template <typename Kernel>
std::vector<double> remainder_dim2(const Field& f, const OffsetTable& t,
                                   const std::vector<std::vector<double>>& grad,
                                   double scale, Kernel ker) {
  const Grid& g = f.grid;
  const int n = g.n;
  const int mask = g.mask();
  const std::size_t m = t.half_count();
  const int* J1 = t.j1.data();
  const int* J2 = t.j2.data();
  const double* Y1 = t.y1.data();
  const double* Y2 = t.y2.data();
  const double* F = f.v.data();
  const double* G1 = grad[0].data();
  const double* G2 = grad[1].data();

  std::vector<double> out(g.size());
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const int x1 = static_cast<int>(x) / n;
      const int x2 = static_cast<int>(x) & mask;
      const double fx = F[x];
      const double g1x = G1[x];
      const double g2x = G2[x];
      KahanSum acc;
      for (std::size_t o = 0; o < m; ++o) {
        const std::size_t im =
            static_cast<std::size_t>((x1 - J1[o]) & mask) * n + (std::size_t)((x2 - J2[o]) & mask);
        const std::size_t ip =
            static_cast<std::size_t>((x1 + J1[o]) & mask) * n + (std::size_t)((x2 + J2[o]) & mask);
        const double num_m = (g1x - G1[im]) * Y1[o] + (g2x - G2[im]) * Y2[o];
        const double num_p = (g1x - G1[ip]) * Y1[o] + (g2x - G2[ip]) * Y2[o];
        acc.add(num_m * ker(fx - F[im], o) - num_p * ker(fx - F[ip], o));
      }
      out[x] = scale * acc.value();
    }
  });
  return out;
}

template <typename Kernel>
std::vector<double> remainder_dim1(const Field& f, const OffsetTable& t,
                                   const std::vector<std::vector<double>>& grad,
                                   double scale, Kernel ker) {
  const Grid& g = f.grid;
  const int mask = g.mask();
  const std::size_t m = t.half_count();
  const int* J = t.j1.data();
  const double* Y = t.y1.data();
  const double* F = f.v.data();
  const double* G = grad[0].data();

  std::vector<double> out(g.size());
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const int xi = static_cast<int>(x);
      const double fx = F[x];
      const double gx = G[x];
      KahanSum acc;
      for (std::size_t o = 0; o < m; ++o) {
        const std::size_t im = static_cast<std::size_t>((xi - J[o]) & mask);
        const std::size_t ip = static_cast<std::size_t>((xi + J[o]) & mask);
        const double num_m = (gx - G[im]) * Y[o];
        const double num_p = (gx - G[ip]) * Y[o];
        acc.add(num_m * ker(fx - F[im], o) - num_p * ker(fx - F[ip], o));
      }
      out[x] = scale * acc.value();
    }
  });
  return out;
}

void require_finite_rhs(const Grid& g, const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream os;
      os << what << ": non-finite value at grid point ";
      if (g.dim == 2) {
        os << "(" << i / static_cast<std::size_t>(g.n) << ", " << i % static_cast<std::size_t>(g.n)
           << ")";
      } else {
        os << i;
      }
      throw numeric_error(os.str());
    }
  }
}

// Shared per-call state.
struct RhsContext {
  Spectrum c;
  std::vector<double> kappa;
  std::vector<std::vector<double>> grad;
  double tail_ratio = 0.0;
};

RhsContext make_context(const Field& f, double rho_bar) {
  if (!std::isfinite(rho_bar)) throw config_error("rhs: rho_bar must be finite");
  RhsContext ctx;
  ctx.c = to_spectral(f);  // rejects non-finite input
  ctx.kappa = kappa_values(f.grid);
  ctx.grad = gradient_values(f.grid, ctx.c);
  ctx.tail_ratio = spectral_tail_ratio(f.grid, ctx.c);
  return ctx;
}

void validate_spec(const Grid& g, const RhsSpec& spec) {
  (void)g;
  switch (spec.path) {
    case RhsPath::direct:
      return;
    case RhsPath::series:
      if (spec.n_max < 0) throw config_error("rhs_series: n_max must be >= 0");
      if (spec.n_max > 10000) throw config_error("rhs_series: n_max too large");
      return;
    case RhsPath::regularized:
      if (!(spec.eps > 0.0) || !(spec.eps <= 0.5))
        throw config_error(
            "rhs_regularized: requires 0 < eps <= 0.5 (use rhs_direct for eps = 0)");
      if (!(spec.c_const > 0.0) || !std::isfinite(spec.c_const))
        throw config_error("rhs_regularized: requires c_const > 0");
      return;
  }
  throw config_error("rhs: unknown path");
}

// Series applicability: the Taylor expansion of the kernel shape converges
// for slope quotients below 1; refuse when the certified slope bound norm_1
// exceeds the configured threshold.
void check_series_applicable(const Grid& g, const RhsContext& ctx, const RhsSpec& spec,
                             double* norm1_out) {
  const double norm1 = norm_s(g, ctx.c, 1.0);
  if (norm1_out) *norm1_out = norm1;
  if (!(norm1 <= spec.theta)) {
    std::ostringstream os;
    os << "rhs_series: norm_1(f) = " << norm1
       << " exceeds the applicability threshold theta = " << spec.theta;
    throw numeric_error(os.str());
  }
}

// Raw lattice remainder (before dealias / mean cleanup), path-dispatched.
std::vector<double> remainder_raw(const Field& f, const RhsContext& ctx, const RhsSpec& spec,
                                  double rho_bar) {
  const Grid& g = f.grid;
  const OffsetTable& t = offset_table(g);
  const double cell = std::pow(g.h(), g.dim);
  const double scale = -rho_bar / (g.dim == 2 ? kTwoPi : kTwoPi / 2.0) * cell;

  std::vector<double> rem;
  switch (spec.path) {
    case RhsPath::direct: {
      if (g.dim == 2) {
        const double* RSQ = t.r_sq.data();
        const double* RA = t.r.data();
        const double* IR3 = t.inv_r3.data();
        rem = remainder_dim2(f, t, ctx.grad, scale, [=](double df, std::size_t o) {
          // R(d/r)/r^3 with R(z) = 1 - (1+z^2)^{-3/2}, cancellation-free:
          //   R/r^3 = d^2 (q + r sqrt(q) + r^2) / ((sqrt(q)+r) q sqrt(q) r^3),
          //   q = r^2 + d^2.
          const double d2 = df * df;
          const double q = RSQ[o] + d2;
          const double rq = std::sqrt(q);
          return d2 * (q + RA[o] * rq + RSQ[o]) / ((rq + RA[o]) * q * rq) * IR3[o];
        });
      } else {
        const double* RSQ = t.r_sq.data();
        rem = remainder_dim1(f, t, ctx.grad, scale, [=](double df, std::size_t o) {
          // R(d/y)/y^2 with R(z) = z^2/(1+z^2)  ==  d^2 / (y^2 (y^2 + d^2)).
          const double d2 = df * df;
          return d2 / ((RSQ[o] + d2) * RSQ[o]);
        });
      }
      break;
    }
    case RhsPath::series: {
      check_series_applicable(g, ctx, spec, nullptr);
      if (spec.n_max == 0) {
        rem.assign(g.size(), 0.0);
        return rem;  // exactly the linear operator; nothing to clean
      }
      // Alternating Taylor coefficients of R, evaluated by Horner in u = z^2:
      //   P(u) = u (a_1 - u (a_2 - u (a_3 - ... ))).
      std::vector<double> ac(static_cast<std::size_t>(spec.n_max) + 1, 1.0);
      if (g.dim == 2)
        for (int k = 1; k <= spec.n_max; ++k) ac[static_cast<std::size_t>(k)] = a_coeff(k);
      const double* AC = ac.data();
      const int nm = spec.n_max;

      if (g.dim == 2) {
        const double* IR = t.inv_r.data();
        const double* IR3 = t.inv_r3.data();
        rem = remainder_dim2(f, t, ctx.grad, scale, [=](double df, std::size_t o) {
          const double zr = df * IR[o];
          const double u = zr * zr;
          double p = AC[nm];
          for (int k = nm - 1; k >= 1; --k) p = AC[k] - u * p;
          return u * p * IR3[o];
        });
      } else {
        const double* IR = t.inv_r.data();
        rem = remainder_dim1(f, t, ctx.grad, scale, [=](double df, std::size_t o) {
          const double zr = df * IR[o];
          const double u = zr * zr;
          double p = AC[nm];
          for (int k = nm - 1; k >= 1; --k) p = AC[k] - u * p;
          return u * p * (IR[o] * IR[o]);
        });
      }
      break;
    }
    case RhsPath::regularized: {
      const std::vector<double>& rp = t.pow_r(spec.eps);
      const double* RP = rp.data();
      if (g.dim == 2) {
        const double* RSQ = t.r_sq.data();
        const double* RA = t.r.data();
        const double* IR3 = t.inv_r3.data();
        rem = remainder_dim2(f, t, ctx.grad, scale, [=](double df, std::size_t o) {
          const double d2 = df * df;
          const double q = RSQ[o] + d2;
          const double rq = std::sqrt(q);
          return d2 * (q + RA[o] * rq + RSQ[o]) / ((rq + RA[o]) * q * rq) * IR3[o] * RP[o];
        });
      } else {
        const double* RSQ = t.r_sq.data();
        rem = remainder_dim1(f, t, ctx.grad, scale, [=](double df, std::size_t o) {
          const double d2 = df * df;
          return d2 / ((RSQ[o] + d2) * RSQ[o]) * RP[o];
        });
      }
      break;
    }
  }
  require_finite_rhs(g, rem, "rhs quadrature");
  return rem;
}

// Remainder hygiene: project to the 2/3 band (optional) and zero the mean
// mode (the continuum remainder is a divergence, so its mean vanishes there).
std::vector<double> clean_remainder(const Grid& g, std::vector<double> rem, bool dealias) {
  Field raw{g, std::move(rem)};
  Spectrum cr = to_spectral(raw);
  if (dealias) dealias_23_inplace(g, cr);
  cr[0] = 0.0;
  return to_physical(g, cr).v;
}

// ifft of (symbol .* c); symbol is real, given per flat mode index.
std::vector<double> multiplier_values(const Grid& g, const Spectrum& c,
                                      const std::vector<double>& symbol) {
  Spectrum cs(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) cs[i] = symbol[i] * c[i];
  return to_physical(g, cs).v;
}

std::vector<double> symbol_from_kappa(const std::vector<double>& kappa, const RhsSpec& spec,
                                      double rho_bar, int dim) {
  std::vector<double> symbol(kappa.size());
  if (spec.path == RhsPath::regularized) {
    const double mu = softened_linear_coeff(dim, spec.eps);
    for (std::size_t i = 0; i < symbol.size(); ++i) {
      const double k = kappa[i];
      symbol[i] = (k == 0.0)
                      ? 0.0
                      : -(spec.eps * spec.c_const + rho_bar * mu) * std::pow(k, 1.0 - spec.eps) -
                            spec.eps * k * k;
    }
  } else {
    for (std::size_t i = 0; i < symbol.size(); ++i) symbol[i] = -rho_bar * kappa[i];
  }
  return symbol;
}

// sum_{n > n_max} a_n z^{2n}; geometric majorant from the first omitted term
// (the coefficient ratio a_{n+1}/a_n decreases, so the first ratio dominates).
double series_tail_sum(int dim, int n_max, double z) {
  const double z2 = z * z;
  if (z2 == 0.0) return 0.0;
  if (z2 >= 1.0) return std::numeric_limits<double>::infinity();
  const int n1 = n_max + 1;
  const double a_next = (dim == 2) ? a_coeff(n1) : 1.0;
  const double first = a_next * std::pow(z2, n1);
  const double ratio = z2 * ((dim == 2) ? (2.0 * n1 + 3.0) / (2.0 * n1 + 2.0) : 1.0);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return first / (1.0 - ratio);
}

RhsOptions options_of(const RhsSpec& spec) {
  RhsOptions opt;
  opt.dealias = spec.dealias;
  opt.theta = spec.theta;
  return opt;
}

RhsSpec spec_of(RhsPath path, const RhsOptions& opt) {
  RhsSpec spec;
  spec.path = path;
  spec.dealias = opt.dealias;
  spec.theta = opt.theta;
  return spec;
}

}  // namespace

double slope_factor(double delta, double s) {
  return 1.0 + 3.0 * delta * (s - delta) / (1.0 + delta * delta);
}

RhsResult rhs_eval(const Field& f, const RhsSpec& spec, double rho_bar) {
  const Grid& g = f.grid;
  validate_spec(g, spec);
  RhsContext ctx = make_context(f, rho_bar);

  std::vector<double> rem = remainder_raw(f, ctx, spec, rho_bar);
  std::vector<double> remc = clean_remainder(g, std::move(rem), spec.dealias);
  std::vector<double> lin =
      multiplier_values(g, ctx.c, symbol_from_kappa(ctx.kappa, spec, rho_bar, g.dim));

  RhsResult out{make_field(g), {}, ctx.tail_ratio, 0.0, 0.0};
  for (std::size_t i = 0; i < lin.size(); ++i) out.value.v[i] = lin[i] + remc[i];
  if (rho_bar < 0.0) out.flags.push_back("unstable_regime");
  if (ctx.tail_ratio > 1e-8) out.flags.push_back("rough_field");

  if (spec.path == RhsPath::series) {
    // Rigorous truncation-tail bound: |num| <= norm_2(f) |y|^2 and the slope
    // quotient obeys |f(x)-f(x-y)|/|y| <= norm_1(f), so the omitted terms sum
    // below pref * norm_2 * tail_weight_sum * sum_{n>n_max} a_n norm_1^{2n}.
    const double norm1 = norm_s(g, ctx.c, 1.0);
    const double norm2 = norm_s(g, ctx.c, 2.0);
    const double pref_abs = std::abs(rho_bar) / (g.dim == 2 ? kTwoPi : kTwoPi / 2.0);
    const double tail = series_tail_sum(g.dim, spec.n_max, norm1);
    out.tail_linf = pref_abs * norm2 * offset_table(g).tail_weight_sum * tail;
    out.tail_l2 = out.tail_linf * std::sqrt(std::pow(g.period, g.dim));
  }
  return out;
}

std::vector<double> linear_symbol(const Grid& g, const RhsSpec& spec, double rho_bar) {
  validate_spec(g, spec);
  if (!std::isfinite(rho_bar)) throw config_error("rhs: rho_bar must be finite");
  return symbol_from_kappa(kappa_values(g), spec, rho_bar, g.dim);
}

Field rhs_remainder(const Field& f, const RhsSpec& spec, double rho_bar) {
  const Grid& g = f.grid;
  validate_spec(g, spec);
  RhsContext ctx = make_context(f, rho_bar);
  std::vector<double> rem = remainder_raw(f, ctx, spec, rho_bar);
  return Field{g, clean_remainder(g, std::move(rem), spec.dealias)};
}

RhsResult rhs_direct(const Field& f, double rho_bar, const RhsOptions& opt) {
  return rhs_eval(f, spec_of(RhsPath::direct, opt), rho_bar);
}

RhsResult rhs_series(const Field& f, int n_max, double rho_bar, const RhsOptions& opt) {
  RhsSpec spec = spec_of(RhsPath::series, opt);
  spec.n_max = n_max;
  return rhs_eval(f, spec, rho_bar);
}

RhsResult rhs_regularized(const Field& f, double eps, double c_const, double rho_bar,
                          const RhsOptions& opt) {
  RhsSpec spec = spec_of(RhsPath::regularized, opt);
  spec.eps = eps;
  spec.c_const = c_const;
  return rhs_eval(f, spec, rho_bar);
}

}  // namespace muskat
