#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "helpers.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/io.hpp"
#include "muskat/presets.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;
using testutil::cosine;
using testutil::random_field;

namespace {

RunConfig small_run(int dim, int n, double amp, double t_end) {
  RunConfig cfg;
  cfg.dimension = dim;
  cfg.n = n;
  cfg.initial.preset = "single_mode";
  cfg.initial.amplitude = amp;
  cfg.scheme.t_end = t_end;
  cfg.scheme.stride = 2;
  return cfg;
}

const MonitorResult* find_monitor(const RunResult& r, const std::string& name) {
  for (const MonitorResult& m : r.monitors)
    if (m.check_name == name) return &m;
  return nullptr;
}

}  // namespace

TEST_CASE("zero field is a fixed point of both schemes") {
  const Grid g = make_grid(2, 16);
  const Field zero = make_field(g);
  for (SchemeKind kind : {SchemeKind::if_rk4, SchemeKind::rk4}) {
    SchemeSpec scheme;
    scheme.kind = kind;
    scheme.dt = 0.05;
    const Field next = step(zero, scheme, RhsSpec{}, 1.0);
    CHECK(testutil::max_abs(next.v) == 0.0);
  }
}

TEST_CASE("integrating factor reproduces the linear decay to machine precision") {
  const Grid g = make_grid(2, 32);
  SchemeSpec scheme;
  scheme.dt = 0.05;
  RhsSpec rhs;
  rhs.path = RhsPath::series;
  rhs.n_max = 0;  // linear-only evolution

  Field f = cosine(g, 0.1, 2, 0);  // |k| = 2: decay rate 2 * rho_bar
  const int nsteps = 40;
  for (int i = 0; i < nsteps; ++i) f = step(f, scheme, rhs, 1.0);
  const double t = nsteps * scheme.dt;
  const Field want = cosine(g, 0.1 * std::exp(-2.0 * t), 2, 0);
  CHECK(testutil::max_abs_diff(f.v, want.v) < 1e-13);
}

TEST_CASE("the mean is conserved bitwise along a run, for both schemes") {
  for (SchemeKind kind : {SchemeKind::if_rk4, SchemeKind::rk4}) {
    RunConfig cfg;
    cfg.dimension = 2;
    cfg.n = 32;
    cfg.scheme.kind = kind;
    cfg.scheme.t_end = 0.5;
    cfg.scheme.stride = 2;
    cfg.initial.modes.push_back({{0, 0}, 0.125, 0.0});  // nonzero mean
    cfg.initial.modes.push_back({{1, 0}, 0.1, 0.0});
    const RunResult r = run(cfg);
    REQUIRE(!r.aborted);
    REQUIRE(r.steps.size() > 3);
    for (const StepRecord& s : r.steps) CHECK(s.mean == r.steps[0].mean);
  }
}

TEST_CASE("the field-level step keeps the mean to roundoff") {
  const Grid g = make_grid(2, 32);
  Field f = random_field(g, 51, 0.2);
  for (double& x : f.v) x += 0.125;
  const double mean0 = field_mean(f);
  SchemeSpec scheme;
  scheme.dt = 0.02;
  for (int i = 0; i < 5; ++i) f = step(f, scheme, RhsSpec{}, 1.0);
  CHECK(std::abs(field_mean(f) - mean0) < 1e-14);
}

TEST_CASE("explicit RK4 refuses steps beyond its stability interval") {
  const Grid g = make_grid(2, 64);  // max kappa = 32*sqrt(2), limit ~ 0.0619
  const Field f = cosine(g, 0.1, 1, 0);
  SchemeSpec scheme;
  scheme.kind = SchemeKind::rk4;
  scheme.dt = 0.1;
  bool threw = false;
  try {
    step(f, scheme, RhsSpec{}, 1.0);
  } catch (const numeric_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("stability") != std::string::npos);
  }
  CHECK(threw);
  scheme.dt = 0.05;
  CHECK_NOTHROW(step(f, scheme, RhsSpec{}, 1.0));
}

TEST_CASE("explicit RK4 and integrating factor agree on smooth data") {
  const Grid g = make_grid(2, 32);
  Field a = cosine(g, 0.1, 1, 0);
  Field b = a;
  SchemeSpec ifs;
  ifs.dt = 0.01;
  SchemeSpec ex;
  ex.kind = SchemeKind::rk4;
  ex.dt = 0.01;
  for (int i = 0; i < 20; ++i) {
    a = step(a, ifs, RhsSpec{}, 1.0);
    b = step(b, ex, RhsSpec{}, 1.0);
  }
  CHECK(testutil::max_abs_diff(a.v, b.v) < 1e-9);
}

TEST_CASE("dt halving shows fourth-order self-convergence") {
  const Grid g = make_grid(2, 32);
  const Field f0 = cosine(g, 0.2, 1, 0);
  const double t_end = 0.4;
  auto integrate = [&](double dt) {
    SchemeSpec scheme;
    scheme.kind = SchemeKind::rk4;  // the integrating factor is too accurate to measure
    scheme.dt = dt;
    Field f = f0;
    const int n = static_cast<int>(std::lround(t_end / dt));
    for (int i = 0; i < n; ++i) f = step(f, scheme, RhsSpec{}, 1.0);
    return f;
  };
  const Field fine = integrate(0.0125);
  const double e1 = testutil::max_abs_diff(integrate(0.05).v, fine.v);
  const double e2 = testutil::max_abs_diff(integrate(0.025).v, fine.v);
  const double ratio = e1 / e2;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("mollify_initial") {
  const Grid g = make_grid(2, 32);
  Field c = make_field(g);
  for (double& x : c.v) x = 2.5;
  CHECK(testutil::max_abs_diff(mollify_initial(c, 0.5).v, c.v) < 1e-13);

  const Field mode = cosine(g, 0.2, 3, 0);
  const Field molly = mollify_initial(mode, 0.2);
  const double ratio = molly.v[0] / mode.v[0];
  CHECK(ratio > 0.0);
  CHECK(ratio <= 1.0);
  const Field want = cosine(g, 0.2 * ratio, 3, 0);
  CHECK(testutil::max_abs_diff(molly.v, want.v) < 1e-12);

  const Field f = random_field(g, 53, 0.3);
  const SupNorms before = sup_norms(f);
  const SupNorms after = sup_norms(mollify_initial(f, 0.3));
  CHECK(after.linf <= before.linf + 1e-10);
  CHECK(after.grad_linf <= before.grad_linf + 1e-10);

  // second-order convergence to the identity
  const double d1 = testutil::max_abs_diff(mollify_initial(f, 0.1).v, f.v);
  const double d2 = testutil::max_abs_diff(mollify_initial(f, 0.05).v, f.v);
  CHECK(d1 / d2 > 3.0);
  CHECK(d1 / d2 < 5.0);

  CHECK_THROWS_AS(mollify_initial(f, 0.0), config_error);
  CHECK_THROWS_AS(mollify_initial(f, 1.5), config_error);
}

TEST_CASE("initial_field sources") {
  RunConfig cfg;
  cfg.dimension = 2;
  cfg.n = 16;
  CHECK_THROWS_AS(initial_field(cfg), config_error);  // no source

  cfg.initial.preset = "single_mode";
  const Field preset = initial_field(cfg);
  CHECK(sup_norms(preset).linf == doctest::Approx(0.2).epsilon(1e-12));

  cfg.initial.modes.push_back({{1, 0}, 0.1, 0.0});
  CHECK_THROWS_AS(initial_field(cfg), config_error);  // two sources
  cfg.initial.preset.clear();
  const Field modes = initial_field(cfg);
  CHECK(testutil::max_abs_diff(modes.v, cosine(make_grid(2, 16), 0.1, 1, 0).v) < 1e-14);

  cfg.initial.modes[0].k = {1};
  CHECK_THROWS_AS(initial_field(cfg), config_error);  // wavevector length
  cfg.initial.modes.clear();

  const std::string path = "initial_field_roundtrip.csv";
  write_snapshot(path, modes, 0.0);
  cfg.initial.file = path;
  const Field from_file = initial_field(cfg);
  CHECK(testutil::max_abs_diff(from_file.v, modes.v) == 0.0);
  cfg.n = 32;
  CHECK_THROWS_AS(initial_field(cfg), config_error);  // grid mismatch
  std::remove(path.c_str());
}

TEST_CASE("zero-data run: trivial trajectory, all monitors clean") {
  RunConfig cfg;
  cfg.dimension = 2;
  cfg.n = 16;
  cfg.initial.modes.push_back({{1, 0}, 0.0, 0.0});
  cfg.scheme.t_end = 1.0;
  cfg.scheme.stride = 5;
  const RunResult r = run(cfg);
  CHECK(!r.aborted);
  CHECK(r.passed());
  for (const Sample& s : r.samples) CHECK(testutil::max_abs(s.f.v) == 0.0);
  for (const MonitorResult& m : r.monitors) CHECK(m.status != MonitorStatus::fail);
  REQUIRE(!r.diag.empty());
  CHECK(r.diag[0].l2 == 0.0);
  CHECK(r.diag[0].norm_1 == 0.0);
}

TEST_CASE("runs are deterministic") {
  const RunConfig cfg = small_run(2, 16, 0.1, 0.5);
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].t == b.samples[i].t);
    CHECK(testutil::max_abs_diff(a.samples[i].f.v, b.samples[i].f.v) == 0.0);
  }
  REQUIRE(a.monitors.size() == b.monitors.size());
  for (std::size_t i = 0; i < a.monitors.size(); ++i) {
    CHECK(a.monitors[i].status == b.monitors[i].status);
    CHECK(a.monitors[i].worst_margin == b.monitors[i].worst_margin);
  }
}

TEST_CASE("small single-mode run decays and passes") {
  const RunConfig cfg = small_run(2, 32, 0.1, 1.0);
  const RunResult r = run(cfg);
  CHECK(!r.aborted);
  CHECK(r.passed());
  for (std::size_t i = 1; i < r.steps.size(); ++i)
    CHECK(r.steps[i].norm1 <= r.steps[i - 1].norm1 + 1e-8);
  const MonitorResult* decay = find_monitor(r, "norm1_decay");
  REQUIRE(decay != nullptr);
  CHECK(decay->status == MonitorStatus::pass);
  const MonitorResult* completed = find_monitor(r, "completed");
  REQUIRE(completed != nullptr);
  CHECK(completed->status == MonitorStatus::pass);
}

TEST_CASE("unstable sign grows and is flagged, without aborting") {
  RunConfig cfg = small_run(2, 32, 0.001, 1.0);
  cfg.rho_bar = -1.0;
  const RunResult r = run(cfg);
  CHECK(!r.aborted);
  CHECK(!r.passed());
  CHECK(r.steps.back().norm1 > r.steps.front().norm1);
  const MonitorResult* stable = find_monitor(r, "stable_regime");
  REQUIRE(stable != nullptr);
  CHECK(stable->status == MonitorStatus::fail);
}

TEST_CASE("regularized runs contract the L2 norm") {
  RunConfig cfg = small_run(2, 32, 0.1, 1.0);
  cfg.rhs.path = RhsPath::regularized;
  cfg.rhs.eps = 0.1;
  cfg.rhs.c_const = 8.0;
  const RunResult r = run(cfg);
  CHECK(r.passed());
  for (std::size_t i = 1; i < r.steps.size(); ++i)
    CHECK(r.steps[i].l2 <= r.steps[0].l2 + 1e-6);
  const MonitorResult* contraction = find_monitor(r, "l2_contraction");
  REQUIRE(contraction != nullptr);
  CHECK(contraction->status == MonitorStatus::pass);
}

TEST_CASE("sample times stay uniform when nsteps rounds up to the stride") {
  RunConfig cfg = small_run(2, 16, 0.05, 1.0);
  cfg.scheme.dt = 0.03;
  cfg.scheme.stride = 7;  // ceil(1/0.03) = 34 -> rounds up to 35
  const RunResult r = run(cfg);
  REQUIRE(r.samples.size() >= 3);
  const double gap = r.samples[1].t - r.samples[0].t;
  for (std::size_t i = 1; i < r.samples.size(); ++i) {
    CHECK(r.samples[i].t - r.samples[i - 1].t == doctest::Approx(gap).epsilon(1e-9));
  }
  CHECK(r.samples.back().t >= cfg.scheme.t_end - 1e-12);
}

TEST_CASE("run validation rejects bad configs") {
  RunConfig cfg = small_run(2, 16, 0.1, 1.0);
  cfg.scheme.t_end = -1.0;
  CHECK_THROWS_AS(run(cfg), config_error);
  cfg = small_run(2, 16, 0.1, 1.0);
  cfg.scheme.stride = 0;
  CHECK_THROWS_AS(run(cfg), config_error);
  cfg = small_run(2, 16, 0.1, 1.0);
  cfg.diagnostics.delta = 1.0;
  CHECK_THROWS_AS(run(cfg), config_error);
  cfg = small_run(2, 20, 0.1, 1.0);  // not a power of two
  CHECK_THROWS_AS(run(cfg), config_error);
}

TEST_CASE("preset configs run end to end in dim 1") {
  RunConfig cfg = preset_config("single_mode", 1);
  cfg.n = 64;
  cfg.scheme.t_end = 0.5;
  cfg.scheme.stride = 4;
  const RunResult r = run(cfg);
  CHECK(r.passed());
  CHECK(r.config.dimension == 1);
}
