#pragma once

// ===== smallness constants and series certificates =====
//
// The decay theory hinges on the weighted coefficient series
//   S_d(x) = pref_d * sum_{n>=1} (2n+1)^{1+delta} * a_n(d) * x^{2n}
// with a_n = (2n+1)!/(2^n n!)^2, pref = pi for dim 2 and a_n = 1, pref = 2 for
// dim 1. The critical data size is the root of S_d(x) = 1; the decay margin at
// a given data size x is mu = 1 - S_d(x). Everything here reports rigorous
// truncation tails so a partial sum doubles as a one-sided certificate.

#include <string>

#include "muskat/common.hpp"

namespace muskat {

// a_n = (2n+1)!/(2^n n!)^2 via the overflow-free recurrence
// a_0 = 1, a_{n+1} = a_n * (2n+3)/(2n+2). Requires 0 <= n <= 10^4.
double a_coeff(int n);

struct SeriesCondition {
  int dim = 2;          // interface dimension, 1 or 2
  double delta = 0.0;   // weight exponent offset, in [0, 1)
  int n_max = 500;      // truncation index
};

struct SeriesEval {
  double value = 0.0;       // partial sum through n_max
  double tail_bound = 0.0;  // rigorous bound on the omitted tail
  bool certified = false;   // tail_bound < 1e-14
};

// Requires 0 <= x < 1 (the series diverges at 1; refuses beyond).
SeriesEval series_value(const SeriesCondition& cond, double x);

// Closed forms of the delta = 0 sums, used as independent oracles:
//   dim 2: pi * ((1 + 2x^2)/(1 - x^2)^{5/2} - 1)
//   dim 1: 2 * ((1 + x^2)/(1 - x^2)^2 - 1)
double series_closed_form_delta0(int dim, double x);

struct ConstantCertificate {
  int dim = 2;
  double delta = 0.0;
  double root = 0.0;        // bisection root of S_d(x) = 1
  double lo = 0.0;          // bracket with S(lo) < 1 < S(hi), hi - lo <= 1e-12
  double hi = 0.0;
  double residual = 0.0;    // S(root) - 1
  double tail_bound = 0.0;  // series tail bound at the root
  bool feasible = false;    // false when no sign change exists on [0, 1)
  std::string note;
};

ConstantCertificate solve_constant(const SeriesCondition& cond);

// mu = 1 - S_d(x); nonpositive when x is at or beyond the critical size.
double decay_margin(const SeriesCondition& cond, double x);

// Multiplier norm factor of the softened singular kernel: the linearization
// of the |y|^{-(d+1-eps)} kernel is -mu_eps * |kappa|^{1-eps} with mu_0 = 1.
//   dim 2: Gamma(eps) sin(pi eps/2) * [2 sqrt(pi) Gamma(1-eps/2)/Gamma((3-eps)/2)] / (2 pi)
//   dim 1: (2/pi) Gamma(eps) sin(pi eps/2)
double softened_linear_coeff(int dim, double eps);

// Growth factor of the a-priori time-derivative bound:
//   dim 2: 1 + pi * ((1 - x^2)^{-3/2} - 1)      (= 1 + pi * sum a_n x^{2n})
//   dim 1: 1 + 2 * x^2 / (1 - x^2)              (= 1 + 2 * sum x^{2n})
// Requires x < 1.
double ft_bound_factor(int dim, double x);

}  // namespace muskat
