#pragma once

// ===== Fourier-side machinery =====
//
// Conventions (part of the wire format):
//   - to_spectral returns c_k = (1/N^d) * sum_x f(x) e^{-i k.x}, so the pure
//     mode A*cos(k.x) has coeff(+-k) = A/2.
//   - physical wavenumber kappa = |m| * (2*pi/L) with m the integer wavevector.
//   - the k=0 mode is frozen by every |kappa|^s multiplier with s != 0, and is
//     excluded from all homogeneous norms: constants are invisible to them.
//   - derivative multipliers zero the Nyquist plane per axis (the self-paired
//     mode has no odd counterpart); even multipliers keep it.

#include "muskat/field.hpp"

namespace muskat {

// ----- transforms -----

Spectrum to_spectral(const Field& f);                    // rejects non-finite input
Field to_physical(const Grid& g, const Spectrum& c);     // projects conjugate symmetry

// ----- multipliers -----

// |kappa|^s multiplier; s >= -1. Preserves reality.
Field apply_lambda(const Field& f, double s);
void apply_lambda_inplace(const Grid& g, Spectrum& c, double s);

// Spectral gradient, one component per interface dimension.
std::vector<Field> gradient(const Field& f);
std::vector<std::vector<double>> gradient_values(const Grid& g, const Spectrum& c);

Field laplacian(const Field& f);
std::vector<double> laplacian_values(const Grid& g, const Spectrum& c);

// Zeroes every mode with 3*|m_axis| > N on any axis (2/3-rule truncation).
Field dealias_23(const Field& f);
void dealias_23_inplace(const Grid& g, Spectrum& c);

// Gaussian spectral mollifier exp(-(eps*kappa)^2/2); value 1 at k=0.
Field mollify(const Field& f, double eps);

// ----- norms -----

// sum over k != 0 of kappa^s |c_k|.
double norm_s(const Field& f, double s);
double norm_s(const Grid& g, const Spectrum& c, double s);

// (sum over k != 0 of kappa^{s*p} |c_k|^p)^{1/p}; reduces to norm_s at p=1.
double norm_sp(const Field& f, double s, double p);

struct SupNorms {
  double linf = 0.0;       // max |f| on the grid
  double grad_linf = 0.0;  // max Euclidean length of the spectral gradient
  double l2 = 0.0;         // sqrt(h^d * sum f^2)
  double l1 = 0.0;         // h^d * sum |f|
};
SupNorms sup_norms(const Field& f);

// Largest coefficient magnitude beyond the 2/3 band over the overall peak;
// 0 for band-limited or zero fields.
double spectral_tail_ratio(const Field& f);
double spectral_tail_ratio(const Grid& g, const Spectrum& c);

// Physical wavenumber kappa = |m| * 2*pi/L per flat index.
std::vector<double> kappa_values(const Grid& g);

// ----- integral-form evaluation of the half-Laplacian -----
//
// Direct principal-value lattice evaluation of |nabla| f with periodic-image
// extension out to radius rings*L/2, a lattice-defect correction for the
// punctured singular cell, and a far-tail correction for the mean-zero part.
// Used as an independent cross-check of the exact multiplier.
// rings <= 0 selects the per-dimension default (dim 2: 8, dim 1: 64).

Field lambda_integral(const Field& f, int rings = 0);

}  // namespace muskat
