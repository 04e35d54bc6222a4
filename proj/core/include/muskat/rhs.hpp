#pragma once

// ===== evolution right-hand sides =====
//
// All three paths share one hybrid decomposition: the linearization -rho_bar *
// |nabla| f is applied as the exact Fourier multiplier, and the lattice
// quadrature is reserved for the O(slope^2) remainder kernel, evaluated over
// the symmetrized half-period offset table (quadrature.hpp). Splitting this
// way keeps the only discretization error in a term that is already small:
// the punctured lattice sum of the full kernel carries a percent-scale defect
// in its linear symbol, which would swamp every tolerance downstream.
//
//   direct      : remainder uses R(z) = 1 - (1+z^2)^{-3/2} (dim 2) or
//                 R(z) = z^2/(1+z^2) (dim 1) with z the slope quotient,
//                 evaluated in cancellation-free form.
//   series      : remainder uses the degree-n_max Taylor polynomial of R,
//                 so direct-vs-series differences measure exactly the tail.
//   regularized : adds -eps*C*|kappa|^{1-eps} and -eps*kappa^2 dissipation,
//                 softens the kernel by |y|^eps, and applies the softened
//                 linearization -rho_bar * mu_eps * |kappa|^{1-eps} exactly;
//                 at eps = 0 it reduces to the direct path, same code.
//
// The nonlinear remainder output is 2/3-rule dealiased (configurable) and its
// mean mode is zeroed: the continuum remainder is a divergence, so this makes
// mean conservation exact instead of aliasing-limited.

#include <string>
#include <vector>

#include "muskat/field.hpp"
#include "muskat/quadrature.hpp"

namespace muskat {

struct RhsOptions {
  bool dealias = true;     // 2/3-rule the remainder output
  double theta = 0.3;      // series-path applicability threshold on norm_1
};

enum class RhsPath { direct, series, regularized };

struct RhsSpec {
  RhsPath path = RhsPath::direct;
  double eps = 0.1;       // regularized path
  double c_const = 8.0;   // regularized path
  int n_max = 4;          // series path; 0 = linear only
  double theta = 0.3;     // series-path applicability threshold
  bool dealias = true;
};

struct RhsResult {
  Field value;                       // f_t on the grid
  std::vector<std::string> flags;    // e.g. "unstable_regime", "rough_field"
  double spectral_tail_ratio = 0.0;  // input smoothness indicator

  // Series path only: rigorous bounds on the truncation error of the value.
  double tail_linf = 0.0;
  double tail_l2 = 0.0;
};

// Slope-quotient factor of the gradient maximum principle:
// 1 + 3*delta*(s - delta)/(1 + delta^2); >= 0.4 on [-1/3, 1/3]^2.
double slope_factor(double delta, double s);

RhsResult rhs_direct(const Field& f, double rho_bar, const RhsOptions& opt = {});

// Requires norm_1(f) <= opt.theta; n_max = 0 gives the pure linear operator.
RhsResult rhs_series(const Field& f, int n_max, double rho_bar, const RhsOptions& opt = {});

// Requires 0 < eps <= 0.5 and c_const > 0.
RhsResult rhs_regularized(const Field& f, double eps, double c_const, double rho_bar,
                          const RhsOptions& opt = {});

// Path-generic dispatch of the three evaluators above.
RhsResult rhs_eval(const Field& f, const RhsSpec& spec, double rho_bar);

// The two halves of the hybrid split, for integrating-factor schemes:
// the exact linear symbol per flat mode index, and the cleaned quadrature
// remainder alone (value = ifft(symbol .* fft f) + remainder).
std::vector<double> linear_symbol(const Grid& g, const RhsSpec& spec, double rho_bar);
Field rhs_remainder(const Field& f, const RhsSpec& spec, double rho_bar);

}  // namespace muskat
