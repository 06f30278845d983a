#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vfem/driver.hpp"

using vfem::Certificate;
using vfem::DomainError;
using vfem::Forcing;
using vfem::IntegrationResult;
using vfem::Interval;
using vfem::IVector;
using vfem::RunConfig;
using vfem::Verdict;

namespace {

Forcing single_mode(double amplitude, int mode = 1) {
  Forcing f;
  f.period = Interval(1.0);
  f.terms = {{Interval(amplitude),
              mode,
              {Interval(0.0), Interval(1.0), Interval(0.0)}}};
  return f;
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.forcing = single_mode(2.0);
  cfg.mesh_k = 8;
  cfg.steps_per_period = 128;
  cfg.leading_count = 3;
  cfg.burn_in_periods = 2;
  cfg.grid.resolution = 5;
  cfg.grid.passes = 3;
  return cfg;
}

}  // namespace

TEST_CASE("validate rejects bad configurations") {
  RunConfig ok = small_config();
  CHECK_NOTHROW(vfem::validate(ok));

  RunConfig c = ok;
  c.mesh_k = 2;
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.steps_per_period = 0;
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.leading_count = 0;
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.leading_count = c.mesh_k - 1;
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.taylor_order = 0;
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.forcing.period = Interval(0.0);
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.initial_box.assign(3, {0.0, 1.0});
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.initial_box.assign(c.mesh_k - 1, {0.0, 1.0});
  c.initial_box[1] = {1.0, 0.0};
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
  c = ok;
  c.initial_inflate = 0.0;
  CHECK_THROWS_AS(vfem::validate(c), DomainError);
}

TEST_CASE("step_window covers the period without gaps") {
  Forcing f = single_mode(1.0);
  int steps = 7;
  double prev = 0.0;
  for (int i = 0; i < steps; ++i) {
    Interval w = vfem::detail::step_window(f, steps, i);
    CHECK(w.lo() <= prev);
    CHECK(w.hi() >= static_cast<double>(i + 1) / steps);
    prev = w.hi();
  }
  CHECK(prev >= 1.0);
}

TEST_CASE("reference_flow reproduces scalar exponential decay") {
  // k = 2 leaves one coordinate with A = -12; no forcing
  Forcing f = single_mode(0.0);
  vfem::Mesh mesh = vfem::make_mesh(2);
  auto [mass, stiffness] = vfem::assemble(mesh);
  vfem::DiagonalBasis basis = vfem::diagonalize(mass, stiffness, mesh);
  vfem::InclusionProblem prob =
      vfem::make_problem(basis, mesh, f, IVector(1, Interval(0.0)), 1);
  REQUIRE(prob.A(0, 0).mid() == Catch::Approx(-12.0).epsilon(1e-9));
  std::vector<double> beta =
      vfem::reference_flow(prob, {1.0}, 0.0, 0.1, 64);
  CHECK(beta[0] == Catch::Approx(std::exp(-1.2)).epsilon(1e-6));
}

TEST_CASE("reference_solve of zero forcing stays at rest") {
  RunConfig cfg = small_config();
  cfg.forcing = single_mode(0.0);
  cfg.steps_per_period = 16;
  auto sol = vfem::reference_solve(cfg);
  REQUIRE(sol.size() == 17);
  for (const auto& state : sol)
    for (double v : state) CHECK(v == 0.0);
}

TEST_CASE("initial_coefficient_box honors an explicit box") {
  RunConfig cfg = small_config();
  cfg.initial_box.assign(cfg.mesh_k - 1, {-0.25, 0.5});
  IVector box = vfem::initial_coefficient_box(cfg);
  REQUIRE(static_cast<int>(box.size()) == cfg.mesh_k - 1);
  for (const Interval& b : box) {
    CHECK(b.lo() == -0.25);
    CHECK(b.hi() == 0.5);
  }
}

TEST_CASE("box_inside is a componentwise subset test") {
  IVector a{Interval(0.0, 1.0), Interval(-1.0, 0.0)};
  IVector b{Interval(-0.5, 1.5), Interval(-2.0, 0.5)};
  CHECK(vfem::box_inside(a, b));
  CHECK_FALSE(vfem::box_inside(b, a));
  CHECK_FALSE(vfem::box_inside(a, IVector{Interval(0.0, 1.0)}));
}

TEST_CASE("unforced dynamics verify a periodic trajectory at the origin") {
  RunConfig cfg = small_config();
  cfg.forcing = single_mode(0.0);
  cfg.initial_box.assign(cfg.mesh_k - 1, {-1e-3, 1e-3});
  Certificate cert = vfem::verify_periodic(cfg);
  CHECK(cert.verdict == Verdict::periodic_verified);
  CHECK(cert.reason == "final box contained in initial box");
  REQUIRE(cert.run.completed);
  // everything contracts toward the origin
  for (const Interval& b : cert.run.final_box) CHECK(b.mag() < 1e-3);
}

TEST_CASE("a box away from the attractor is not verified") {
  RunConfig cfg = small_config();
  cfg.forcing = single_mode(0.0);
  cfg.initial_box.assign(cfg.mesh_k - 1, {0.05, 0.0501});
  Certificate cert = vfem::verify_periodic(cfg);
  CHECK(cert.verdict == Verdict::not_verified);
  CHECK(cert.reason == "final box escapes the initial box");
  CHECK(cert.run.completed);
}

TEST_CASE("a stiff leading block fails gracefully") {
  // 8 steps per period put the stiffest leading coordinate far outside the
  // explicit Taylor stability region, so the step must blow up and report it
  RunConfig cfg = small_config();
  cfg.steps_per_period = 8;
  cfg.leading_count = 6;
  cfg.initial_box.assign(cfg.mesh_k - 1, {-0.1, 0.1});
  Certificate cert = vfem::verify_periodic(cfg);
  CHECK(cert.verdict == Verdict::failed);
  CHECK_FALSE(cert.run.completed);
  CHECK(cert.run.failed_step >= 0);
  CHECK(cert.reason.find("step") == 0);
  CHECK_FALSE(cert.run.failure.empty());
}

TEST_CASE("certified boxes contain the reference trajectory every step") {
  RunConfig cfg = small_config();
  IntegrationResult res = vfem::integrate_period(cfg);
  REQUIRE(res.completed);
  REQUIRE(static_cast<int>(res.trace.size()) == cfg.steps_per_period);

  vfem::Mesh mesh = vfem::make_mesh(cfg.mesh_k);
  auto [mass, stiffness] = vfem::assemble(mesh);
  vfem::DiagonalBasis basis = vfem::diagonalize(mass, stiffness, mesh);
  int n = cfg.mesh_k - 1;
  vfem::InclusionProblem prob = vfem::make_problem(
      basis, mesh, cfg.forcing, IVector(n, Interval(0.0)), cfg.leading_count);

  std::vector<double> beta = vfem::reference_solve(cfg).front();
  for (int l = 0; l < n; ++l) {
    CHECK(beta[l] >= res.initial_box[l].lo());
    CHECK(beta[l] <= res.initial_box[l].hi());
  }
  double dt = 1.0 / cfg.steps_per_period;
  for (int i = 0; i < cfg.steps_per_period; ++i) {
    beta = vfem::reference_flow(prob, beta, i * dt, (i + 1) * dt, 24);
    for (int l = 0; l < n; ++l) {
      CHECK(beta[l] >= res.trace[i].beta_box[l].lo());
      CHECK(beta[l] <= res.trace[i].beta_box[l].hi());
    }
  }

  // trace invariants: refined endpoint radii stay ordered and the
  // unresolved-part bounds follow the refined curvature bound
  for (const vfem::TraceStep& ts : res.trace) {
    CHECK(ts.bounds.R1.hi() <= ts.bounds.R2.hi());
    CHECK(ts.bounds.R2.hi() <= ts.bounds.R3.hi());
    Interval expect = mesh.h / vfem::pi() * ts.bounds.R3;
    CHECK(ts.qk.h1.hi() == Catch::Approx(expect.hi()).epsilon(1e-12));
  }
}
