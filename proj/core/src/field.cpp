#include "muskat/field.hpp"

#include <sstream>
#include <utility>

namespace muskat {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid make_grid(int dim, int n, double period) {
  if (dim != 1 && dim != 2) {
    throw config_error("grid: dim must be 1 or 2, got " + std::to_string(dim));
  }
  if (n < 8 || !is_power_of_two(n)) {
    throw config_error("grid: points per axis must be a power of two >= 8, got " +
                       std::to_string(n));
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw config_error("grid: period must be positive and finite");
  }
  return Grid{dim, n, period};
}

Field make_field(const Grid& g) { return Field{g, std::vector<double>(g.size(), 0.0)}; }

Field make_field(const Grid& g, std::vector<double> v) {
  if (v.size() != g.size()) {
    std::ostringstream msg;
    msg << "field: expected " << g.size() << " values, got " << v.size();
    throw data_error(msg.str());
  }
  return Field{g, std::move(v)};
}

double field_mean(const Field& f) {
  KahanSum acc;
  for (double x : f.v) acc.add(x);
  return acc.value() / static_cast<double>(f.v.size());
}

Field circshift(const Field& f, const std::array<int, 2>& j) {
  const Grid& g = f.grid;
  const int n = g.n;
  const int mask = g.mask();
  Field out = make_field(g);
  if (g.dim == 1) {
    for (int i = 0; i < n; ++i) {
      out.v[i] = f.v[(i - j[0]) & mask];
    }
  } else {
    for (int i1 = 0; i1 < n; ++i1) {
      const int s1 = ((i1 - j[0]) & mask) * n;
      double* row = &out.v[static_cast<std::size_t>(i1) * n];
      for (int i2 = 0; i2 < n; ++i2) {
        row[i2] = f.v[s1 + ((i2 - j[1]) & mask)];
      }
    }
  }
  return out;
}

namespace {

std::size_t flat_index_of_wave(const Grid& g, int k1, int k2) {
  const int n = g.n;
  if (k1 < -n / 2 || k1 >= n / 2 || (g.dim == 2 && (k2 < -n / 2 || k2 >= n / 2))) {
    throw config_error("coefficient access: wavevector outside [-N/2, N/2)");
  }
  const int i1 = index_of_wave(k1, n);
  if (g.dim == 1) return static_cast<std::size_t>(i1);
  const int i2 = index_of_wave(k2, n);
  return static_cast<std::size_t>(i1) * n + i2;
}

}  // namespace

std::complex<double> coeff_at(const Spectrum& c, const Grid& g, int k1, int k2) {
  return c[flat_index_of_wave(g, k1, k2)];
}

void set_coeff(Spectrum& c, const Grid& g, int k1, int k2, std::complex<double> value) {
  c[flat_index_of_wave(g, k1, k2)] = value;
}

}  // namespace muskat
