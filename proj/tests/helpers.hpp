#pragma once

// ===== shared test utilities =====
//
// The random fields use a fixed-seed mt19937_64 with the 53-bit mantissa
// construction, so every platform draws the same sequence.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "muskat/field.hpp"
#include "muskat/spectral.hpp"

namespace testutil {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Sum of a few random low-frequency cosines, rescaled so norm_1 hits the
// target exactly. k_cap bounds |m| per axis (default keeps the field far
// below the 2/3 band at any tested resolution).
inline muskat::Field random_field(const muskat::Grid& g, std::uint64_t seed,
                                  double norm1_target, int k_cap = 0, int n_modes = 6) {
  if (k_cap <= 0) k_cap = std::max(1, g.n / 8);
  std::mt19937_64 rng(seed);
  muskat::Field f = muskat::make_field(g);
  const double h = g.h();
  const double two_pi_over_l = 2.0 * 3.14159265358979323846 / g.period;
  for (int mode = 0; mode < n_modes; ++mode) {
    const int m1 = 1 + static_cast<int>(unit_uniform(rng) * k_cap);
    const int m2 = g.dim == 2 ? static_cast<int>(unit_uniform(rng) * (k_cap + 1)) : 0;
    const double amp = 0.25 + unit_uniform(rng);
    const double phase = 6.283185307179586 * unit_uniform(rng);
    for (std::size_t i = 0; i < f.v.size(); ++i) {
      const double x1 = h * static_cast<double>(g.dim == 2 ? i / g.n : i);
      const double x2 = g.dim == 2 ? h * static_cast<double>(i % g.n) : 0.0;
      f.v[i] += amp * std::cos(two_pi_over_l * (m1 * x1 + m2 * x2) + phase);
    }
  }
  const double n1 = muskat::norm_s(f, 1.0);
  const double scale = n1 > 0.0 ? norm1_target / n1 : 0.0;
  for (double& x : f.v) x *= scale;
  return f;
}

// A*cos(k.x + phase) sampled on the grid.
inline muskat::Field cosine(const muskat::Grid& g, double a, int m1, int m2 = 0,
                            double phase = 0.0) {
  muskat::Field f = muskat::make_field(g);
  const double h = g.h();
  const double w = 2.0 * 3.14159265358979323846 / g.period;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    const double x1 = h * static_cast<double>(g.dim == 2 ? i / g.n : i);
    const double x2 = g.dim == 2 ? h * static_cast<double>(i % g.n) : 0.0;
    f.v[i] = a * std::cos(w * (m1 * x1 + m2 * x2) + phase);
  }
  return f;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs(const std::vector<double>& a) {
  double worst = 0.0;
  for (double x : a) worst = std::max(worst, std::abs(x));
  return worst;
}

inline double l2_diff(const muskat::Field& a, const muskat::Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    const double d = a.v[i] - b.v[i];
    s += d * d;
  }
  const double cell = a.grid.dim == 2 ? a.grid.h() * a.grid.h() : a.grid.h();
  return std::sqrt(cell * s);
}

inline double l2_value(const muskat::Field& a) {
  double s = 0.0;
  for (double x : a.v) s += x * x;
  const double cell = a.grid.dim == 2 ? a.grid.h() * a.grid.h() : a.grid.h();
  return std::sqrt(cell * s);
}

}  // namespace testutil
