#pragma once

// ===== lattice offset tables for the singular-integral quadratures =====
//
// The y-quadratures run over the punctured lattice ball 0 < |j| < rings*N/2
// (strict Euclidean comparison, exact in integer arithmetic), with weight h^d.
// rings = 1 is the half-period minimal-image ball used by the evolution
// kernels; larger rings extend over periodic images for the integral-form
// half-Laplacian. Offsets are stored as a half set (j paired with -j for the
// symmetrized principal-value evaluation) in a fixed enumeration order, which
// makes every per-point reduction deterministic.

#include <cstddef>
#include <memory>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

struct OffsetTable {
  Grid grid;
  int rings = 1;
  double radius = 0.0;       // rings * L / 2

  // Half set (j1 > 0) or (j1 == 0 and j2 > 0); j2 unused for dim 1.
  std::vector<int> j1, j2;
  std::vector<double> y1, y2;      // displacement j*h
  std::vector<double> r;           // |y|
  std::vector<double> r_sq;        // |y|^2
  std::vector<double> inv_r;       // 1/|y|
  std::vector<double> inv_r3;      // 1/|y|^3

  std::size_t half_count() const { return r.size(); }
  std::size_t full_count() const { return 2 * r.size(); }

  double qsum_inv_r = 0.0;         // sum over the full set of h^d / |y|
  double tail_weight_sum = 0.0;    // full-set sum of h^d / |y| (dim 2) or h^d (dim 1);
                                   // weight of the series truncation-tail bound

  // |y|^eps over the half set, cached per exponent (for the softened kernels).
  const std::vector<double>& pow_r(double eps) const;

  struct PowCache;
  std::shared_ptr<PowCache> pow_cache;
};

// Shared, immutable tables cached per (grid, rings). rings must be >= 1.
const OffsetTable& offset_table(const Grid& g, int rings = 1);

}  // namespace muskat
