#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "lagflow/field.hpp"
#include "lagflow/flavor.hpp"
#include "lagflow/monitors.hpp"

namespace lagflow {
struct RunConfig;
}

// Explicit time integration of du/dt = theta(D^2 u) = sum arctan(lambda_i).
namespace lagflow::flow {

enum class Scheme { euler, rk4 };
// Terminal states never transition back to running.
enum class Status { running, converged, region_exit, nan_blowup, max_steps, t_end };

std::string_view to_string(Scheme s);
std::string_view to_string(Status s);
Scheme parse_scheme(std::string_view s);

struct IntegratorSpec {
  Scheme scheme = Scheme::euler;
  double cfl = 0.5;
  std::int64_t max_steps = 100'000'000;
  double t_end = 50.0;
};

void validate(const IntegratorSpec& spec);

struct RhsResult {
  std::vector<double> theta;  // mean removed
  double mean = 0.0;          // spatial mean of theta; feeds the phase
  double min_margin = 0.0;    // worst region margin of the evaluated state
};

// theta at every grid point, with its spatial mean split off. Also reports the
// worst margin of the flavor's region. Throws NanBlowup on a non-finite Hessian.
RhsResult rhs(const PotentialField& field, Flavor flavor);

// cfl h^2 / (2n): the linearized coefficients g^ij have eigenvalues <= 1.
double stable_dt(const Grid& grid, const IntegratorSpec& spec);

struct FlowState {
  PotentialField field;
  std::int64_t step_index = 0;
  double dt_last = 0.0;
  Status status = Status::running;
  double min_margin = 0.0;  // region margin seen by the last right-hand side
};

// Advances by dt. On a state outside the flavor's region, sets region_exit and
// leaves the field untouched; a non-finite result sets nan_blowup.
void step(FlowState& state, const IntegratorSpec& spec, Flavor flavor, double dt);

// max |(theta(t+dt) - theta(t)) / dt - g^ij d_i d_j theta| for one trial step.
double angle_residual(const FlowState& state, const IntegratorSpec& spec, Flavor flavor, double dt);

struct FlowTrajectory {
  std::vector<monitors::DiagnosticsRow> rows;
  std::vector<PotentialField> snapshots;
  Status status = Status::running;
  FlowState final_state;
  double dt = 0.0;
  std::optional<double> margin_warning_t;  // first sample with margin below warn_margin
};

// Called after each diagnostic row; snapshot_due marks rows with a stored field.
using Observer = std::function<void(const FlowState&, const monitors::DiagnosticsRow&, bool snapshot_due)>;

FlowTrajectory run(const RunConfig& config, const Observer& observer = {});

}  // namespace lagflow::flow
