#include "muskat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace muskat {

struct OffsetTable::PowCache {
  std::mutex mutex;
  std::map<double, std::vector<double>> by_eps;
};

const std::vector<double>& OffsetTable::pow_r(double eps) const {
  std::lock_guard<std::mutex> lock(pow_cache->mutex);
  auto it = pow_cache->by_eps.find(eps);
  if (it != pow_cache->by_eps.end()) return it->second;
  std::vector<double> p(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) p[i] = std::pow(r[i], eps);
  return pow_cache->by_eps.emplace(eps, std::move(p)).first->second;
}

namespace {

OffsetTable build_table(const Grid& g, int rings) {
  OffsetTable t;
  t.grid = g;
  t.rings = rings;
  t.radius = rings * g.period / 2.0;
  t.pow_cache = std::make_shared<OffsetTable::PowCache>();

  const double h = g.h();
  const long jmax = static_cast<long>(rings) * g.n / 2;  // ball |j| < jmax, exact
  const double cell = std::pow(h, g.dim);

  KahanSum qsum, tail_sum;
  if (g.dim == 1) {
    for (long j = 1; j < jmax; ++j) {
      const double y = j * h;
      t.j1.push_back(static_cast<int>(j));
      t.j2.push_back(0);
      t.y1.push_back(y);
      t.y2.push_back(0.0);
      t.r.push_back(y);
      t.r_sq.push_back(y * y);
      t.inv_r.push_back(1.0 / y);
      t.inv_r3.push_back(1.0 / (y * y * y));
      qsum.add(2.0 * cell / y);
      tail_sum.add(2.0 * cell);
    }
  } else {
    // Fixed enumeration order: j1 ascending, then j2; half set is
    // (j1 > 0) or (j1 == 0 and j2 > 0).
    const long limit_sq = jmax * jmax;
    for (long j1 = 0; j1 < jmax; ++j1) {
      const long j2_lo = (j1 == 0) ? 1 : -(jmax - 1);
      for (long j2 = j2_lo; j2 < jmax; ++j2) {
        if (j1 * j1 + j2 * j2 >= limit_sq) continue;
        if (j1 == 0 && j2 <= 0) continue;
        const double y1 = j1 * h;
        const double y2 = j2 * h;
        const double r = std::sqrt(y1 * y1 + y2 * y2);
        t.j1.push_back(static_cast<int>(j1));
        t.j2.push_back(static_cast<int>(j2));
        t.y1.push_back(y1);
        t.y2.push_back(y2);
        t.r.push_back(r);
        t.r_sq.push_back(r * r);
        t.inv_r.push_back(1.0 / r);
        t.inv_r3.push_back(1.0 / (r * r * r));
        qsum.add(2.0 * cell / r);
        tail_sum.add(2.0 * cell / r);
      }
    }
  }
  t.qsum_inv_r = qsum.value();
  t.tail_weight_sum = g.dim == 2 ? t.qsum_inv_r : tail_sum.value();
  return t;
}

}  // namespace

const OffsetTable& offset_table(const Grid& g, int rings) {
  if (rings < 1) throw config_error("offset_table: rings must be >= 1");
  static std::mutex cache_mutex;
  static std::map<std::tuple<int, int, int, double>, std::unique_ptr<OffsetTable>> cache;

  const auto key = std::make_tuple(g.dim, g.n, rings, g.period);
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<OffsetTable>(build_table(g, rings))).first;
  }
  return *it->second;
}

}  // namespace muskat
