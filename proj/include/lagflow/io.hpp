#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lagflow/config.hpp"
#include "lagflow/flow.hpp"
#include "lagflow/monitors.hpp"

namespace lagflow::io {

// Fixed CSV column order.
inline constexpr std::array<std::string_view, 13> kCsvColumns = {
    "t",           "min_logdet_s2",        "min_log_star_omega",     "min_logdet_p2", "max_a2",
    "sum_sq_max",  "min_pair_sum",         "min_one_plus_prod",      "min_one_minus_sqprod",
    "min_three_plus_twoprod", "theta_osc", "hess_sup",               "angle_residual"};

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const monitors::DiagnosticsRow& row);

// Exit codes of `lagflow run` / `lagflow verify`.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitRegionExit = 2,
  kExitNanBlowup = 3,
  kExitConfigError = 4,
  kExitMaxSteps = 5,
};

struct RunSummary {
  std::string status;
  int exit_code = 0;
  std::string flavor;
  double t_final = 0.0;
  std::int64_t steps = 0;
  double dt = 0.0;
  std::optional<double> convergence_time;
  std::optional<double> margin_warning_t;
  std::vector<monitors::MonotonicityReport> monotonicity;
  monitors::GrowthReport growth;
  monitors::DiagnosticsRow final_row;
};

// Runs the monotonicity and growth-bound checks for the run's flavor and
// assigns the exit code.
RunSummary summarize(const flow::FlowTrajectory& traj, const RunConfig& config);

// JSON; non-finite reals are written as the strings "inf", "-inf", "nan".
std::string summary_to_json(const RunSummary& s);
RunSummary summary_from_json(std::string_view text);

bool operator==(const RunSummary& a, const RunSummary& b);

}  // namespace lagflow::io
