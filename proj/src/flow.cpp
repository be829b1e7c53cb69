#include "lagflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "lagflow/config.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/geometry.hpp"
#include "lagflow/parallel.hpp"
#include "lagflow/scenarios.hpp"
#include "lagflow/spectrum.hpp"

namespace lagflow::flow {

namespace {

// Remaining time below this fraction of dt counts as reaching t_end.
constexpr double kTimeEps = 1e-3;

double point_margin(const EigenTuple& l, Flavor flavor) {
  double m = std::numeric_limits<double>::infinity();
  const int n = l.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double prod = l[i] * l[j];
      if (flavor == Flavor::two_convex)
        m = std::min({m, l[i] + l[j], 1.0 + prod});
      else
        m = std::min(m, 1.0 - prod * prod);
    }
  return m;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Integrates one step without region bookkeeping. Returns the margin of the
// starting state.
double advance(PotentialField& f, const IntegratorSpec& spec, Flavor flavor, double dt) {
  const RhsResult k1 = rhs(f, flavor);
  const std::size_t count = f.v.size();
  if (spec.scheme == Scheme::euler) {
    for (std::size_t p = 0; p < count; ++p) f.v[p] += dt * k1.theta[p];
    f.phase += dt * k1.mean;
  } else {
    PotentialField stage = f;
    const auto stage_eval = [&](const RhsResult& prev, double frac) {
      for (std::size_t p = 0; p < count; ++p) stage.v[p] = f.v[p] + frac * dt * prev.theta[p];
      return rhs(stage, flavor);
    };
    const RhsResult k2 = stage_eval(k1, 0.5);
    const RhsResult k3 = stage_eval(k2, 0.5);
    const RhsResult k4 = stage_eval(k3, 1.0);
    for (std::size_t p = 0; p < count; ++p)
      f.v[p] += dt / 6.0 * (k1.theta[p] + 2.0 * k2.theta[p] + 2.0 * k3.theta[p] + k4.theta[p]);
    f.phase += dt / 6.0 * (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean);
  }
  remove_mean(f);
  f.t += dt;
  return k1.min_margin;
}

std::vector<double> full_theta(const PotentialField& f) {
  RhsResult r = rhs(f, Flavor::two_convex);
  for (double& x : r.theta) x += r.mean;
  return std::move(r.theta);
}

bool is_terminal(Status s) { return s != Status::running; }

}  // namespace

std::string_view to_string(Scheme s) { return s == Scheme::euler ? "euler" : "rk4"; }

std::string_view to_string(Status s) {
  switch (s) {
    case Status::running:
      return "running";
    case Status::converged:
      return "converged";
    case Status::region_exit:
      return "region_exit";
    case Status::nan_blowup:
      return "nan_blowup";
    case Status::max_steps:
      return "max_steps";
    case Status::t_end:
      return "t_end";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "euler") return Scheme::euler;
  if (s == "rk4") return Scheme::rk4;
  throw ConfigError("unknown integrator scheme '" + std::string(s) + "'");
}

void validate(const IntegratorSpec& spec) {
  if (!(spec.cfl > 0.0 && spec.cfl <= 1.0)) throw ConfigError("integrator.cfl must be in (0, 1]");
  if (!(spec.t_end >= 0.0) || !std::isfinite(spec.t_end)) throw ConfigError("integrator.t_end must be finite and >= 0");
  if (spec.max_steps < 0) throw ConfigError("integrator.max_steps must be >= 0");
}

RhsResult rhs(const PotentialField& field, Flavor flavor) {
  const std::size_t count = field.grid.size();
  RhsResult out;
  out.theta.resize(count);
  out.min_margin = std::numeric_limits<double>::infinity();
  std::mutex merge;
  bool nan_seen = false;

  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    double local_margin = std::numeric_limits<double>::infinity();
    bool local_nan = false;
    for (std::size_t p = begin; p < end; ++p) {
      const SymMatrix h = hessian_at(field, p);
      if (!h.finite()) {
        local_nan = true;
        out.theta[p] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const EigenTuple l = eigenvalues_sym(h);
      out.theta[p] = spectrum::lagrangian_angle(l);
      local_margin = std::min(local_margin, point_margin(l, flavor));
    }
    const std::lock_guard lock(merge);
    out.min_margin = std::min(out.min_margin, local_margin);
    nan_seen = nan_seen || local_nan;
  });
  if (nan_seen) throw NanBlowup("non-finite Hessian encountered");

  out.mean = compensated_mean(out.theta);
  for (double& x : out.theta) x -= out.mean;
  return out;
}

double stable_dt(const Grid& grid, const IntegratorSpec& spec) {
  const double h = grid.spacing();
  return spec.cfl * h * h / (2.0 * grid.dim());
}

void step(FlowState& state, const IntegratorSpec& spec, Flavor flavor, double dt) {
  if (is_terminal(state.status)) return;
  PotentialField next = state.field;
  try {
    state.min_margin = advance(next, spec, flavor, dt);
  } catch (const NanBlowup&) {
    state.status = Status::nan_blowup;
    return;
  }
  if (!(state.min_margin > 0.0)) {
    state.status = Status::region_exit;
    return;
  }
  state.field = std::move(next);
  state.dt_last = dt;
  ++state.step_index;
  if (!all_finite(state.field.v) || !std::isfinite(state.field.phase)) state.status = Status::nan_blowup;
}

double angle_residual(const FlowState& state, const IntegratorSpec& spec, Flavor flavor, double dt) {
  const PotentialField& f = state.field;
  const std::vector<double> before = full_theta(f);

  PotentialField angle = make_field(f.dim(), f.grid.points_per_axis(), SymMatrix(f.dim()));
  angle.v = before;
  std::vector<double> expected(before.size());
  parallel_for(before.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const SymMatrix g_inv = geometry::inverse_metric(hessian_at(f, p));
      const SymMatrix d2 = periodic_hessian_at(angle, p);
      double s = 0.0;
      for (int i = 0; i < f.dim(); ++i)
        for (int j = 0; j < f.dim(); ++j) s += g_inv(i, j) * d2(i, j);
      expected[p] = s;
    }
  });

  PotentialField trial = f;
  try {
    advance(trial, spec, flavor, dt);
  } catch (const NanBlowup&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const std::vector<double> after = full_theta(trial);
  double worst = 0.0;
  for (std::size_t p = 0; p < before.size(); ++p)
    worst = std::max(worst, std::abs((after[p] - before[p]) / dt - expected[p]));
  return worst;
}

FlowTrajectory run(const RunConfig& config, const Observer& observer) {
  validate(config);
  const IntegratorSpec& spec = config.integrator;
  FlowTrajectory traj;
  FlowState state;
  state.field = scenarios::generate(config.recipe, config.n, config.points_per_axis);

  const double dt = stable_dt(state.field.grid, spec);
  traj.dt = dt;
  const auto every = std::max<std::int64_t>(1, std::llround(config.output.sample_interval / dt));
  const double t_stop = spec.t_end;
  std::int64_t samples = 0;

  const auto sample = [&]() {
    if (!traj.rows.empty() && traj.rows.back().t >= state.field.t) return;
    monitors::DiagnosticsRow row = monitors::snapshot(state.field);
    row.angle_residual = angle_residual(state, spec, config.flavor, dt);
    const bool snap = config.output.snapshot_cadence > 0 && samples % config.output.snapshot_cadence == 0;
    ++samples;
    if (snap) traj.snapshots.push_back(state.field);
    traj.rows.push_back(row);

    const double margin = config.flavor == Flavor::two_convex ? std::min(row.min_pair_sum, row.min_one_plus_prod)
                                                              : row.min_one_minus_sqprod;
    if (!traj.margin_warning_t && margin < config.tolerances.warn_margin) traj.margin_warning_t = row.t;
    if (state.status == Status::running && monitors::check_convergence(row, config.tolerances))
      state.status = Status::converged;
    if (observer) observer(state, row, snap);
  };

  while (true) {
    const bool time_up = t_stop - state.field.t < kTimeEps * dt;
    const bool steps_up = state.step_index >= spec.max_steps;
    if (state.step_index % every == 0 || time_up || steps_up) sample();
    if (is_terminal(state.status)) break;
    if (time_up) {
      state.status = Status::t_end;
      break;
    }
    if (steps_up) {
      state.status = Status::max_steps;
      break;
    }
    step(state, spec, config.flavor, std::min(dt, t_stop - state.field.t));
    if (state.status == Status::region_exit) sample();
    if (is_terminal(state.status)) break;
  }

  traj.status = state.status;
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace lagflow::flow
