#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lagflow/config.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/flow.hpp"
#include "lagflow/spectrum.hpp"

using namespace lagflow;
using namespace lagflow::flow;
using doctest::Approx;

namespace {

PotentialField mode_field(int N, const SymMatrix& A, double amp) {
  PotentialField f = make_field(A.dim(), N, A);
  for (std::size_t p = 0; p < f.grid.size(); ++p) f.v[p] = amp * std::cos(f.grid.coordinate(f.grid.coords(p)[0]));
  remove_mean(f);
  return f;
}

// Amplitude of the cos x1 component.
double cos_coefficient(const PotentialField& f) {
  double s = 0.0;
  for (std::size_t p = 0; p < f.grid.size(); ++p) s += f.v[p] * std::cos(f.grid.coordinate(f.grid.coords(p)[0]));
  return 2.0 * s / static_cast<double>(f.grid.size());
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("IntegratorSpec validation") {
  IntegratorSpec s;
  CHECK_NOTHROW(validate(s));
  s.cfl = 0.0;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = {};
  s.t_end = -1.0;
  CHECK_THROWS_AS(validate(s), ConfigError);
  s = {};
  s.max_steps = -1;
  CHECK_THROWS_AS(validate(s), ConfigError);
  CHECK(parse_scheme("rk4") == Scheme::rk4);
  CHECK_THROWS_AS(parse_scheme("leapfrog"), ConfigError);
}

TEST_CASE("stable_dt is cfl h^2 / (2n)") {
  IntegratorSpec s;
  const Grid g(2, 64);
  CHECK(stable_dt(g, s) == Approx(0.5 * g.spacing() * g.spacing() / 4.0).epsilon(1e-15));
  s.cfl = 0.25;
  const Grid g3(3, 32);
  CHECK(stable_dt(g3, s) == Approx(0.25 * g3.spacing() * g3.spacing() / 6.0).epsilon(1e-15));
}

TEST_CASE("quadratic fields are stationary up to the phase") {
  const double a[] = {1.0, 0.3, 0.3, 0.5};
  const SymMatrix A = SymMatrix::from_row_major(2, a);
  const RhsResult r = rhs(make_field(2, 32, A), Flavor::two_convex);
  const double theta_A = spectrum::lagrangian_angle(eigenvalues_sym(A));
  CHECK(r.mean == Approx(theta_A).epsilon(1e-14));
  for (double x : r.theta) CHECK(std::abs(x) <= 1e-15);

  FlowState st{make_field(2, 32, A)};
  const double dt = 0.01;
  step(st, {}, Flavor::two_convex, dt);
  CHECK(st.status == Status::running);
  CHECK(st.field.t == dt);
  CHECK(st.field.phase == Approx(dt * theta_A).epsilon(1e-14));
  for (double x : st.field.v) CHECK(std::abs(x) <= 1e-15);
}

TEST_CASE("a state outside the region exits without being advanced") {
  const double a[] = {-1.0, 0.0, 0.0, -0.5};
  FlowState st{mode_field(32, SymMatrix::from_row_major(2, a), 0.01)};
  const auto before = st.field.v;
  step(st, {}, Flavor::two_convex, 1e-3);
  CHECK(st.status == Status::region_exit);
  CHECK(st.field.v == before);
  CHECK(st.field.t == 0.0);
  CHECK(st.min_margin < 0.0);

  // terminal states stay terminal
  step(st, {}, Flavor::two_convex, 1e-3);
  CHECK(st.field.t == 0.0);
}

TEST_CASE("area-decreasing flavor uses its own margin") {
  const double a[] = {1.5, 0.0, 0.0, 1.5};  // two-convex, |l1 l2| > 1
  FlowState tc{make_field(2, 32, SymMatrix::from_row_major(2, a))};
  FlowState ad = tc;
  step(tc, {}, Flavor::two_convex, 1e-3);
  step(ad, {}, Flavor::area_decreasing, 1e-3);
  CHECK(tc.status == Status::running);
  CHECK(ad.status == Status::region_exit);
}

TEST_CASE("non-finite data sets nan_blowup") {
  FlowState st{make_field(2, 32, SymMatrix(2))};
  st.field.v[5] = std::nan("");
  CHECK_THROWS_AS(rhs(st.field, Flavor::two_convex), NanBlowup);
  step(st, {}, Flavor::two_convex, 1e-3);
  CHECK(st.status == Status::nan_blowup);
}

TEST_CASE("mean of v stays zero along the flow") {
  const double a[] = {1.0, 0.0, 0.0, 1.0};
  FlowState st{mode_field(32, SymMatrix::from_row_major(2, a), 0.2)};
  for (std::size_t p = 0; p < st.field.v.size(); ++p) st.field.v[p] += 0.01 * std::sin(3.0 * st.field.grid.coordinate(st.field.grid.coords(p)[1]));
  IntegratorSpec spec;
  const double dt = stable_dt(st.field.grid, spec);
  for (int k = 0; k < 50; ++k) {
    step(st, spec, Flavor::two_convex, dt);
    REQUIRE(std::abs(mean(st.field.v)) <= 1e-12);
  }
  CHECK(st.step_index == 50);
}

TEST_CASE("small modes decay at the linearized rate g^11 |k|^2") {
  // A = I gives g = 2I; the discrete symbol of d11 on cos x1 is (2 - 2 cos h) / h^2.
  FlowState st{mode_field(32, SymMatrix::identity(2), 1e-4)};
  IntegratorSpec spec;
  spec.scheme = Scheme::rk4;
  const double h = st.field.grid.spacing();
  const double symbol = (2.0 - 2.0 * std::cos(h)) / (h * h);
  const double dt = stable_dt(st.field.grid, spec);
  const double c0 = cos_coefficient(st.field);
  const int steps = static_cast<int>(std::lround(0.5 / dt));
  for (int k = 0; k < steps; ++k) step(st, spec, Flavor::two_convex, dt);
  const double want = c0 * std::exp(-0.5 * symbol * st.field.t);
  CHECK(cos_coefficient(st.field) == Approx(want).epsilon(1e-5));
}

TEST_CASE("euler and rk4 agree to first order in dt") {
  const double a[] = {2.0, 0.0, 0.0, -0.3};
  FlowState e{mode_field(32, SymMatrix::from_row_major(2, a), 0.05)};
  FlowState r = e;
  IntegratorSpec se, sr;
  sr.scheme = Scheme::rk4;
  const double dt = stable_dt(e.field.grid, se);
  for (int k = 0; k < 100; ++k) {
    step(e, se, Flavor::two_convex, dt);
    step(r, sr, Flavor::two_convex, dt);
  }
  double worst = 0.0;
  for (std::size_t p = 0; p < e.field.v.size(); ++p) worst = std::max(worst, std::abs(e.field.v[p] - r.field.v[p]));
  CHECK(worst <= 10.0 * dt * 0.05);
  CHECK(worst > 0.0);
}

TEST_CASE("angle residual is small and decays with refinement") {
  const auto residual = [](int N) {
    FlowState st{mode_field(N, SymMatrix::identity(2), 0.2)};
    IntegratorSpec spec;
    return angle_residual(st, spec, Flavor::two_convex, stable_dt(st.field.grid, spec));
  };
  const double r32 = residual(32), r64 = residual(64);
  CHECK(r32 <= 5e-3);
  CHECK(r64 / r32 <= 0.35);
}

TEST_CASE("run: heat-1d preset") {
  RunConfig c = config_from_preset("heat-1d");
  c.integrator.t_end = 1.0;
  const FlowTrajectory tr = run(c);
  CHECK(tr.status == Status::t_end);
  REQUIRE(tr.rows.size() >= 2);
  CHECK(tr.rows.front().t == 0.0);
  CHECK(tr.rows.back().t == Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < tr.rows.size(); ++i) CHECK(tr.rows[i].t > tr.rows[i - 1].t);
  // |A|^2 ~ eps^2 e^{-2t} sin^2: the sup decays like e^{-2t}
  CHECK(tr.rows.back().max_a2 / tr.rows.front().max_a2 == Approx(std::exp(-2.0)).epsilon(0.05));
}

TEST_CASE("run: observer, snapshots and determinism") {
  RunConfig c = config_from_preset("tc-small");
  c.points_per_axis = 32;
  c.integrator.t_end = 0.5;
  c.output.sample_interval = 0.1;
  c.output.snapshot_cadence = 2;
  c.output.snapshot_dir = "snapshots";  // stored in memory here; the CLI writes them
  int calls = 0, snaps = 0;
  const FlowTrajectory a = run(c, [&](const FlowState&, const monitors::DiagnosticsRow&, bool snap) {
    ++calls;
    snaps += snap ? 1 : 0;
  });
  CHECK(calls == static_cast<int>(a.rows.size()));
  CHECK(snaps == static_cast<int>(a.snapshots.size()));
  CHECK(snaps == (calls + 1) / 2);
  const FlowTrajectory b = run(c);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].t == b.rows[i].t);
    CHECK(a.rows[i].min_logdet_s2 == b.rows[i].min_logdet_s2);
    CHECK(a.rows[i].max_a2 == b.rows[i].max_a2);
  }
  CHECK(a.final_state.field.v == b.final_state.field.v);
}

TEST_CASE("run: max_steps and immediate convergence") {
  RunConfig c = config_from_preset("tc-small");
  c.points_per_axis = 16;
  c.integrator.max_steps = 10;
  const FlowTrajectory tr = run(c);
  CHECK(tr.status == Status::max_steps);
  CHECK(tr.final_state.step_index == 10);

  const FlowTrajectory flat = run(config_from_preset("quad-identity"));
  CHECK(flat.status == Status::converged);
  CHECK(flat.rows.size() == 1);
}

TEST_CASE("run: initial data outside the flavor's region exits at once") {
  RunConfig c = config_from_preset("quad-identity");
  c.recipe.A = {-1.0, 0.0, 0.0, -1.0};
  c.recipe.kind = scenarios::RecipeKind::modes;
  c.recipe.modes = {{{1, 0, 0, 0}, 0.01, 0.0}};
  const FlowTrajectory tr = run(c);
  CHECK(tr.status == Status::region_exit);
  CHECK(tr.final_state.field.t == 0.0);
  CHECK(tr.rows.size() == 1);
}
