#pragma once

// ===== interface field =====
//
// A field is the grid plus its real values in row-major order: for dim 2 the
// flat index is i1*n + i2 with x = (i1*h, i2*h); for dim 1 it is just i.
// Spectral coefficients are produced on demand by to_spectral (spectral.hpp)
// and use the same flat layout indexed by FFT indices.

#include <array>
#include <complex>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

struct Field {
  Grid grid;
  std::vector<double> v;
};

using Spectrum = std::vector<std::complex<double>>;

Field make_field(const Grid& g);                          // zero field
Field make_field(const Grid& g, std::vector<double> v);   // size-checked

double field_mean(const Field& f);

// Exact lattice translation: out(x) = f(x - j*h) with periodic wrap.
Field circshift(const Field& f, const std::array<int, 2>& j);

// Coefficient accessors by signed wavevector (k2 ignored for dim 1).
std::complex<double> coeff_at(const Spectrum& c, const Grid& g, int k1, int k2 = 0);
void set_coeff(Spectrum& c, const Grid& g, int k1, int k2, std::complex<double> value);

}  // namespace muskat
