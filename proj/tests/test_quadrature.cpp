#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <utility>

#include "muskat/quadrature.hpp"

using namespace muskat;

TEST_CASE("offset table covers the punctured ball exactly once up to sign") {
  const Grid g = make_grid(2, 16);
  const OffsetTable& t = offset_table(g);
  const int jmax = g.n / 2;

  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < t.half_count(); ++i) {
    const int j1 = t.j1[i];
    const int j2 = t.j2[i];
    CHECK((j1 > 0 || (j1 == 0 && j2 > 0)));           // half-set convention
    CHECK(j1 * j1 + j2 * j2 < jmax * jmax);           // strict integer ball
    CHECK(seen.insert({j1, j2}).second);              // no duplicates
    CHECK(seen.count({-j1, -j2}) == 0);               // never both signs
  }
  // Count: the full punctured ball has 2 * half_count points.
  std::size_t ball = 0;
  for (int a = -jmax; a <= jmax; ++a)
    for (int b = -jmax; b <= jmax; ++b)
      if ((a != 0 || b != 0) && a * a + b * b < jmax * jmax) ++ball;
  CHECK(t.full_count() == ball);
}

TEST_CASE("offset table geometry arrays") {
  const Grid g = make_grid(2, 16);
  const OffsetTable& t = offset_table(g);
  const double h = g.h();
  for (std::size_t i = 0; i < t.half_count(); ++i) {
    CHECK(t.y1[i] == doctest::Approx(t.j1[i] * h).epsilon(1e-15));
    CHECK(t.y2[i] == doctest::Approx(t.j2[i] * h).epsilon(1e-15));
    const double r = std::hypot(t.y1[i], t.y2[i]);
    CHECK(t.r[i] == doctest::Approx(r).epsilon(1e-14));
    CHECK(t.r_sq[i] == doctest::Approx(r * r).epsilon(1e-14));
    CHECK(t.inv_r[i] == doctest::Approx(1.0 / r).epsilon(1e-14));
    CHECK(t.inv_r3[i] == doctest::Approx(1.0 / (r * r * r)).epsilon(1e-14));
  }
  CHECK(t.radius == doctest::Approx(0.5 * g.period).epsilon(1e-15));
}

TEST_CASE("tail weight sums") {
  const Grid g2 = make_grid(2, 16);
  const OffsetTable& t2 = offset_table(g2);
  const double cell2 = g2.h() * g2.h();
  double want2 = 0.0;
  for (std::size_t i = 0; i < t2.half_count(); ++i) want2 += 2.0 * cell2 / t2.r[i];
  CHECK(t2.qsum_inv_r == doctest::Approx(want2).epsilon(1e-12));
  CHECK(t2.tail_weight_sum == doctest::Approx(want2).epsilon(1e-12));

  const Grid g1 = make_grid(1, 64);
  const OffsetTable& t1 = offset_table(g1);
  CHECK(t1.tail_weight_sum ==
        doctest::Approx(2.0 * t1.half_count() * g1.h()).epsilon(1e-12));
}

TEST_CASE("dim 1 table") {
  const Grid g = make_grid(1, 32);
  const OffsetTable& t = offset_table(g);
  CHECK(t.half_count() == 15);  // j = 1 .. n/2 - 1
  for (std::size_t i = 0; i < t.half_count(); ++i) {
    CHECK(t.j1[i] == static_cast<int>(i) + 1);
    CHECK(t.j2[i] == 0);
  }
}

TEST_CASE("enumeration order is fixed (j1 ascending, then j2)") {
  const Grid g = make_grid(2, 16);
  const OffsetTable& t = offset_table(g);
  for (std::size_t i = 1; i < t.half_count(); ++i) {
    const bool ordered =
        t.j1[i] > t.j1[i - 1] || (t.j1[i] == t.j1[i - 1] && t.j2[i] > t.j2[i - 1]);
    CHECK(ordered);
  }
}

TEST_CASE("tables are cached per grid and rings") {
  const Grid g = make_grid(2, 16);
  const OffsetTable& a = offset_table(g);
  const OffsetTable& b = offset_table(g);
  CHECK(&a == &b);
  const OffsetTable& wide = offset_table(g, 2);
  CHECK(&wide != &a);
  CHECK(wide.radius == doctest::Approx(g.period).epsilon(1e-15));
  CHECK(wide.half_count() > a.half_count());
  CHECK_THROWS_AS(offset_table(g, 0), config_error);
}

TEST_CASE("softened radial powers are cached and correct") {
  const Grid g = make_grid(2, 16);
  const OffsetTable& t = offset_table(g);
  const std::vector<double>& p = t.pow_r(0.1);
  REQUIRE(p.size() == t.half_count());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] == doctest::Approx(std::pow(t.r[i], 0.1)).epsilon(1e-14));
  }
  CHECK(&t.pow_r(0.1) == &p);  // second lookup reuses the cache
}
