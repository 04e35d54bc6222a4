#include "muskat/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <sstream>

#include "muskat/quadrature.hpp"

namespace muskat {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// ===== FFT engine =====
//
// Plans are cached per (dim, n) behind one mutex; execution copies through the
// plan-owned buffer under the same lock, so the public transforms stay pure
// and thread-safe. Transform cost is negligible next to the y-quadratures.

struct PlanSet {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_complex* buf = nullptr;
  std::size_t size = 0;
};

std::mutex g_fft_mutex;
std::map<std::pair<int, int>, PlanSet>& plan_cache() {
  static std::map<std::pair<int, int>, PlanSet> cache;
  return cache;
}

PlanSet& plans_for(const Grid& g) {
  auto key = std::make_pair(g.dim, g.n);
  auto& cache = plan_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  PlanSet p;
  p.size = g.size();
  p.buf = fftw_alloc_complex(p.size);
  if (g.dim == 1) {
    p.fwd = fftw_plan_dft_1d(g.n, p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(g.n, p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    p.fwd = fftw_plan_dft_2d(g.n, g.n, p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_2d(g.n, g.n, p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  return cache.emplace(key, p).first->second;
}

Spectrum fft_forward_scaled(const Field& f) {
  std::lock_guard<std::mutex> lock(g_fft_mutex);
  PlanSet& p = plans_for(f.grid);
  for (std::size_t i = 0; i < p.size; ++i) {
    p.buf[i][0] = f.v[i];
    p.buf[i][1] = 0.0;
  }
  fftw_execute(p.fwd);
  Spectrum c(p.size);
  const double scale = 1.0 / static_cast<double>(p.size);
  for (std::size_t i = 0; i < p.size; ++i) {
    c[i] = {p.buf[i][0] * scale, p.buf[i][1] * scale};
  }
  return c;
}

std::vector<double> fft_backward_real(const Grid& g, const Spectrum& c) {
  std::lock_guard<std::mutex> lock(g_fft_mutex);
  PlanSet& p = plans_for(g);
  std::memcpy(p.buf, c.data(), p.size * sizeof(fftw_complex));
  fftw_execute(p.bwd);
  std::vector<double> v(p.size);
  for (std::size_t i = 0; i < p.size; ++i) v[i] = p.buf[i][0];
  return v;
}

// Applies body(flat, m1, m2) over all modes; m2 = 0 for dim 1.
template <typename Body>
void for_each_mode(const Grid& g, Body&& body) {
  const int n = g.n;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) body(static_cast<std::size_t>(i), wave_of_index(i, n), 0);
  } else {
    std::size_t flat = 0;
    for (int i1 = 0; i1 < n; ++i1) {
      const int m1 = wave_of_index(i1, n);
      for (int i2 = 0; i2 < n; ++i2, ++flat) body(flat, m1, wave_of_index(i2, n));
    }
  }
}

}  // namespace

// ===== transforms =====

Spectrum to_spectral(const Field& f) {
  require_finite(f.v, "to_spectral");
  return fft_forward_scaled(f);
}

Field to_physical(const Grid& g, const Spectrum& c) {
  if (c.size() != g.size()) {
    throw data_error("to_physical: coefficient array size does not match grid");
  }
  // Project onto conjugate symmetry so the output is real by construction.
  Spectrum sym(c.size());
  const int n = g.n;
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const int ineg = (n - i) & g.mask();
      sym[i] = 0.5 * (c[i] + std::conj(c[ineg]));
    }
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      const int r1 = ((n - i1) & g.mask()) * n;
      const int f1 = i1 * n;
      for (int i2 = 0; i2 < n; ++i2) {
        const int ineg = r1 + ((n - i2) & g.mask());
        sym[f1 + i2] = 0.5 * (c[f1 + i2] + std::conj(c[ineg]));
      }
    }
  }
  return Field{g, fft_backward_real(g, sym)};
}

// ===== multipliers =====

void apply_lambda_inplace(const Grid& g, Spectrum& c, double s) {
  if (s < -1.0) {
    throw config_error("apply_lambda: exponent must satisfy s >= -1");
  }
  if (s == 0.0) return;
  const double k_unit = kTwoPi / g.period;
  for_each_mode(g, [&](std::size_t flat, int m1, int m2) {
    const double mm = static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2;
    if (mm == 0.0) {
      c[flat] = 0.0;  // constants are frozen by every homogeneous multiplier
    } else {
      c[flat] *= std::pow(k_unit * std::sqrt(mm), s);
    }
  });
}

Field apply_lambda(const Field& f, double s) {
  Spectrum c = to_spectral(f);
  apply_lambda_inplace(f.grid, c, s);
  return to_physical(f.grid, c);
}

std::vector<std::vector<double>> gradient_values(const Grid& g, const Spectrum& c) {
  const double k_unit = kTwoPi / g.period;
  const int nyq = -g.n / 2;
  std::vector<std::vector<double>> out;
  for (int axis = 0; axis < g.dim; ++axis) {
    Spectrum dc(c.size());
    for_each_mode(g, [&](std::size_t flat, int m1, int m2) {
      const int m = axis == 0 ? m1 : m2;
      // The Nyquist mode is self-conjugate and has no odd partner: zero it.
      const double mult = (m == nyq) ? 0.0 : k_unit * m;
      dc[flat] = std::complex<double>(0.0, mult) * c[flat];
    });
    out.push_back(fft_backward_real(g, dc));
  }
  return out;
}

std::vector<Field> gradient(const Field& f) {
  Spectrum c = to_spectral(f);
  std::vector<Field> out;
  for (auto& comp : gradient_values(f.grid, c)) {
    out.push_back(Field{f.grid, std::move(comp)});
  }
  return out;
}

std::vector<double> laplacian_values(const Grid& g, const Spectrum& c) {
  const double k_unit = kTwoPi / g.period;
  Spectrum dc(c.size());
  for_each_mode(g, [&](std::size_t flat, int m1, int m2) {
    const double mm = static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2;
    dc[flat] = -(k_unit * k_unit * mm) * c[flat];
  });
  return fft_backward_real(g, dc);
}

Field laplacian(const Field& f) {
  Spectrum c = to_spectral(f);
  return Field{f.grid, laplacian_values(f.grid, c)};
}

void dealias_23_inplace(const Grid& g, Spectrum& c) {
  const int n = g.n;
  for_each_mode(g, [&](std::size_t flat, int m1, int m2) {
    if (3 * std::abs(m1) > n || 3 * std::abs(m2) > n) c[flat] = 0.0;
  });
}

Field dealias_23(const Field& f) {
  Spectrum c = to_spectral(f);
  dealias_23_inplace(f.grid, c);
  return to_physical(f.grid, c);
}

Field mollify(const Field& f, double eps) {
  if (!(eps >= 0.0)) throw config_error("mollify: eps must be >= 0");
  if (eps == 0.0) return f;
  const double k_unit = kTwoPi / f.grid.period;
  Spectrum c = to_spectral(f);
  for_each_mode(f.grid, [&](std::size_t flat, int m1, int m2) {
    const double mm = static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2;
    const double ek = eps * k_unit;
    c[flat] *= std::exp(-0.5 * ek * ek * mm);
  });
  return to_physical(f.grid, c);
}

// ===== norms =====

double norm_s(const Grid& g, const Spectrum& c, double s) {
  const double k_unit = kTwoPi / g.period;
  KahanSum acc;
  for_each_mode(g, [&](std::size_t flat, int m1, int m2) {
    const double mm = static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2;
    if (mm == 0.0) return;  // k = 0 carries no weight in homogeneous norms
    const double kappa = k_unit * std::sqrt(mm);
    acc.add((s == 0.0 ? 1.0 : std::pow(kappa, s)) * std::abs(c[flat]));
  });
  return acc.value();
}

double norm_s(const Field& f, double s) {
  if (s < 0.0) throw config_error("norm_s: requires s >= 0");
  Spectrum c = to_spectral(f);
  return norm_s(f.grid, c, s);
}

double norm_sp(const Field& f, double s, double p) {
  if (p < 1.0) throw config_error("norm_sp: requires p >= 1");
  Spectrum c = to_spectral(f);
  const double k_unit = kTwoPi / f.grid.period;
  KahanSum acc;
  for_each_mode(f.grid, [&](std::size_t flat, int m1, int m2) {
    const double mm = static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2;
    if (mm == 0.0) return;
    const double kappa = k_unit * std::sqrt(mm);
    acc.add(std::pow(kappa, s * p) * std::pow(std::abs(c[flat]), p));
  });
  return std::pow(acc.value(), 1.0 / p);
}

SupNorms sup_norms(const Field& f) {
  const Grid& g = f.grid;
  SupNorms out;
  KahanSum sum_sq, sum_abs;
  for (double x : f.v) {
    out.linf = std::max(out.linf, std::abs(x));
    sum_sq.add(x * x);
    sum_abs.add(std::abs(x));
  }
  const double cell = std::pow(g.h(), g.dim);
  out.l2 = std::sqrt(cell * sum_sq.value());
  out.l1 = cell * sum_abs.value();

  Spectrum c = to_spectral(f);
  const auto grad = gradient_values(g, c);
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    double len_sq = grad[0][i] * grad[0][i];
    if (g.dim == 2) len_sq += grad[1][i] * grad[1][i];
    out.grad_linf = std::max(out.grad_linf, std::sqrt(len_sq));
  }
  return out;
}

double spectral_tail_ratio(const Grid& g, const Spectrum& c) {
  const int n = g.n;
  double peak = 0.0, tail = 0.0;
  for_each_mode(g, [&](std::size_t flat, int m1, int m2) {
    const double mag = std::abs(c[flat]);
    peak = std::max(peak, mag);
    if (3 * std::abs(m1) > n || 3 * std::abs(m2) > n) tail = std::max(tail, mag);
  });
  return peak == 0.0 ? 0.0 : tail / peak;
}

double spectral_tail_ratio(const Field& f) {
  Spectrum c = to_spectral(f);
  return spectral_tail_ratio(f.grid, c);
}

std::vector<double> kappa_values(const Grid& g) {
  std::vector<double> out(g.size());
  const double k_unit = kTwoPi / g.period;
  for_each_mode(g, [&](std::size_t flat, int m1, int m2) {
    const double mm = static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2;
    out[flat] = k_unit * std::sqrt(mm);
  });
  return out;
}

// ===== integral-form half-Laplacian =====
//
// dim 2:  (1/2pi) [ sum_{half} h^2 (2f(x) - f(x-y) - f(x+y)) / |y|^3
//                   - (lap f(x)/4) * G_set + 2 pi (f(x) - mean) / R ]
//   where G_set = 2 pi R - sum_{full} h^2/|y| is the lattice defect of the
//   1/|y| kernel over the same offset set (the punctured singular cell makes
//   the paired integrand behave like (lap f/2)/|y| near 0, and the defect of
//   that kernel is exactly what the sum omits).
// dim 1:  (1/pi)  [ sum_{j>0} h (2f(x) - f(x-y) - f(x+y)) / y^2
//                   - (h/2) f''(x) + 2 (f(x) - mean) / R ]
//   (the one-dimensional lattice sum is spectrally exact apart from the
//   missing j = 0 term, whose even-part limit is -f''(x)/2, and the tail).
// The far-tail corrections use the mean-zero part of f over radius R.

Field lambda_integral(const Field& f, int rings) {
  const Grid& g = f.grid;
  if (rings <= 0) rings = (g.dim == 2) ? 8 : 64;
  const OffsetTable& table = offset_table(g, rings);
  const double R = table.radius;
  const double mean = field_mean(f);
  Spectrum c = to_spectral(f);
  const std::vector<double> lap = laplacian_values(g, c);

  const int n = g.n;
  const int mask = g.mask();
  const double cell = std::pow(g.h(), g.dim);
  const std::size_t points = g.size();
  Field out = make_field(g);
  const std::size_t m = table.half_count();

  if (g.dim == 2) {
    const double g_set = kTwoPi * R - table.qsum_inv_r;
    parallel_for(points, [&](std::size_t begin, std::size_t end) {
      for (std::size_t x = begin; x < end; ++x) {
        const int x1 = static_cast<int>(x) / n;
        const int x2 = static_cast<int>(x) & mask;
        const double fx = f.v[x];
        KahanSum acc;
        for (std::size_t o = 0; o < m; ++o) {
          const int jm1 = (x1 - table.j1[o]) & mask;
          const int jm2 = (x2 - table.j2[o]) & mask;
          const int jp1 = (x1 + table.j1[o]) & mask;
          const int jp2 = (x2 + table.j2[o]) & mask;
          const double pair = 2.0 * fx - f.v[jm1 * n + jm2] - f.v[jp1 * n + jp2];
          acc.add(pair * table.inv_r3[o]);
        }
        out.v[x] = (cell * acc.value() - 0.25 * lap[x] * g_set +
                    kTwoPi * (fx - mean) / R) / kTwoPi;
      }
    });
  } else {
    const double h = g.h();
    parallel_for(points, [&](std::size_t begin, std::size_t end) {
      for (std::size_t x = begin; x < end; ++x) {
        const int xi = static_cast<int>(x);
        const double fx = f.v[x];
        KahanSum acc;
        for (std::size_t o = 0; o < m; ++o) {
          const int jm = (xi - table.j1[o]) & mask;
          const int jp = (xi + table.j1[o]) & mask;
          const double pair = 2.0 * fx - f.v[jm] - f.v[jp];
          acc.add(pair * table.inv_r[o] * table.inv_r[o]);
        }
        constexpr double kPi = kTwoPi / 2.0;
        out.v[x] = (cell * acc.value() - 0.5 * h * lap[x] + 2.0 * (fx - mean) / R) / kPi;
      }
    });
  }
  return out;
}

}  // namespace muskat
