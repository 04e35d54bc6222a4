#pragma once

// ===== periodic computational lattice =====
//
// The interface graph lives on a uniform periodic grid with N points per axis
// and period L. dim is the dimension of the interface itself: dim 1 evolves a
// curve (two bulk fluids in the plane), dim 2 evolves a surface (three-space).

#include <cstddef>

#include "muskat/common.hpp"

namespace muskat {

struct Grid {
  int dim = 2;           // 1 or 2
  int n = 64;            // points per axis, power of two, >= 8
  double period = 0.0;   // L > 0

  double h() const { return period / n; }
  std::size_t size() const { return dim == 1 ? static_cast<std::size_t>(n)
                                             : static_cast<std::size_t>(n) * n; }
  int mask() const { return n - 1; }  // n is a power of two

  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && period == o.period;
  }
};

// Validates and builds a grid; period defaults to 2*pi.
Grid make_grid(int dim, int n, double period = 6.283185307179586476925286766559);

// FFT index i in [0, n) <-> signed wave index m in [-n/2, n/2).
inline int wave_of_index(int i, int n) { return i < n / 2 ? i : i - n; }
inline int index_of_wave(int m, int n) { return m >= 0 ? m : m + n; }

}  // namespace muskat
