#include "muskat/constants.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace muskat {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTailCertLimit = 1e-14;

void check_cond(const SeriesCondition& cond) {
  if (cond.dim != 1 && cond.dim != 2) {
    throw config_error("series condition: dim must be 1 or 2");
  }
  if (!(cond.delta >= 0.0 && cond.delta < 1.0)) {
    throw config_error("series condition: delta must lie in [0, 1)");
  }
  if (cond.n_max < 0 || cond.n_max > 10000) {
    throw config_error("series condition: n_max must lie in [0, 10^4]");
  }
}

}  // namespace

double a_coeff(int n) {
  if (n < 0 || n > 10000) throw config_error("a_coeff: n must lie in [0, 10^4]");
  // a_0 = 1, a_{n+1} = a_n * (2n+3)/(2n+2): overflow-free and exact in the
  // sense of one rounding per step.
  double a = 1.0;
  for (int i = 0; i < n; ++i) {
    a *= static_cast<double>(2 * i + 3) / static_cast<double>(2 * i + 2);
  }
  return a;
}

SeriesEval series_value(const SeriesCondition& cond, double x) {
  check_cond(cond);
  if (!(x >= 0.0)) throw config_error("series_value: x must be >= 0");
  if (x >= 1.0) {
    std::ostringstream msg;
    msg << "series_value: divergent at x = " << x << " (radius of convergence is 1)";
    throw numeric_error(msg.str());
  }

  const double pref = cond.dim == 2 ? kPi : 2.0;
  const double wexp = 1.0 + cond.delta;
  const double xx = x * x;

  SeriesEval out;
  if (x == 0.0) {
    out.certified = true;
    return out;
  }

  KahanSum acc;
  double a = 1.0;        // a_n, starting at a_0
  double xpow = 1.0;     // x^{2n}
  for (int n = 1; n <= cond.n_max; ++n) {
    a *= cond.dim == 2 ? static_cast<double>(2 * n + 1) / static_cast<double>(2 * n) : 1.0;
    xpow *= xx;
    acc.add(std::pow(static_cast<double>(2 * n + 1), wexp) * a * xpow);
  }
  out.value = pref * acc.value();

  // Geometric tail: the term ratio x^2 * ((2n+3)/(2n+1))^{1+delta} * a_{n+1}/a_n
  // decreases toward x^2, so the first omitted term over (1 - first ratio)
  // dominates the tail whenever that ratio is below 1.
  const int n1 = cond.n_max + 1;
  const double a_next =
      cond.dim == 2 ? a * static_cast<double>(2 * n1 + 1) / static_cast<double>(2 * n1) : 1.0;
  const double t_next = pref * std::pow(static_cast<double>(2 * n1 + 1), wexp) * a_next *
                        xpow * xx;
  const double ratio =
      xx * std::pow(static_cast<double>(2 * n1 + 3) / (2 * n1 + 1), wexp) *
      (cond.dim == 2 ? static_cast<double>(2 * n1 + 3) / (2 * n1 + 2) : 1.0);
  if (ratio < 1.0) {
    out.tail_bound = t_next / (1.0 - ratio);
    out.certified = out.tail_bound < kTailCertLimit;
  } else {
    out.tail_bound = std::numeric_limits<double>::infinity();
    out.certified = false;
  }
  return out;
}

double series_closed_form_delta0(int dim, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw config_error("closed form: requires 0 <= x < 1");
  const double xx = x * x;
  if (dim == 2) return kPi * ((1.0 + 2.0 * xx) * std::pow(1.0 - xx, -2.5) - 1.0);
  if (dim == 1) return 2.0 * ((1.0 + xx) / ((1.0 - xx) * (1.0 - xx)) - 1.0);
  throw config_error("closed form: dim must be 1 or 2");
}

ConstantCertificate solve_constant(const SeriesCondition& cond) {
  check_cond(cond);
  ConstantCertificate cert;
  cert.dim = cond.dim;
  cert.delta = cond.delta;

  auto eval = [&](double x) {
    const SeriesEval e = series_value(cond, x);
    if (!e.certified) {
      std::ostringstream msg;
      msg << "solve_constant: series tail not certified at x = " << x
          << " (tail bound " << e.tail_bound << "); raise n_max";
      throw numeric_error(msg.str());
    }
    return e;
  };

  // The series is strictly increasing in x (every term is); scan for the
  // bracket, then bisect it down to 1e-12.
  const double x_hi_limit = 1.0 - 1e-6;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (double x = 0.05; x <= x_hi_limit; x += 0.05) {
    const double v = eval(std::min(x, x_hi_limit)).value;
    if (v > 1.0) {
      hi = std::min(x, x_hi_limit);
      bracketed = true;
      break;
    }
    lo = x;
  }
  if (!bracketed && eval(x_hi_limit).value > 1.0) {
    hi = x_hi_limit;
    bracketed = true;
  }
  if (!bracketed) {
    cert.feasible = false;
    cert.note = "condition infeasible: series stays below 1 on [0, 1 - 1e-6)";
    return cert;
  }

  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (eval(mid).value < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  cert.lo = lo;
  cert.hi = hi;
  cert.root = 0.5 * (lo + hi);
  const SeriesEval at_root = eval(cert.root);
  cert.residual = at_root.value - 1.0;
  cert.tail_bound = at_root.tail_bound;
  cert.feasible = true;
  return cert;
}

double decay_margin(const SeriesCondition& cond, double x) {
  return 1.0 - series_value(cond, x).value;
}

double softened_linear_coeff(int dim, double eps) {
  if (dim != 1 && dim != 2) throw config_error("softened_linear_coeff: dim must be 1 or 2");
  if (!(eps >= 0.0 && eps <= 0.5)) {
    throw config_error("softened_linear_coeff: eps must lie in [0, 0.5]");
  }
  if (eps == 0.0) return 1.0;
  // Gamma(eps) = Gamma(1 + eps)/eps keeps the small-eps evaluation stable.
  const double gamma_eps = std::tgamma(1.0 + eps) / eps;
  const double sine = std::sin(0.5 * kPi * eps);
  if (dim == 1) return (2.0 / kPi) * gamma_eps * sine;
  const double angular = 2.0 * std::sqrt(kPi) * std::tgamma(1.0 - 0.5 * eps) /
                         std::tgamma(0.5 * (3.0 - eps));
  return gamma_eps * sine * angular / (2.0 * kPi);
}

double ft_bound_factor(int dim, double x) {
  if (!(x >= 0.0)) throw config_error("ft_bound_factor: x must be >= 0");
  if (x >= 1.0) {
    throw numeric_error("ft_bound_factor: series bound diverges at x >= 1");
  }
  const double xx = x * x;
  if (dim == 2) return 1.0 + kPi * (std::pow(1.0 - xx, -1.5) - 1.0);
  if (dim == 1) return 1.0 + 2.0 * xx / (1.0 - xx);
  throw config_error("ft_bound_factor: dim must be 1 or 2");
}

}  // namespace muskat
