#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lagflow/field.hpp"

namespace lagflow::monitors {

// One time sample of grid-wide extrema. Argmins are row-major point indices,
// lowest index on ties.
struct DiagnosticsRow {
  double t = 0.0;
  double min_logdet_s2 = 0.0;
  std::size_t argmin_logdet_s2 = 0;
  double min_log_star_omega = 0.0;
  std::size_t argmin_log_star_omega = 0;
  double min_logdet_p2 = 0.0;
  std::size_t argmin_logdet_p2 = 0;
  double max_a2 = 0.0;
  double a2_at_argmin_s2 = 0.0;
  double a2_at_argmin_p2 = 0.0;
  double sum_sq_max = 0.0;
  double min_pair_sum = 0.0;
  double min_one_plus_prod = 0.0;
  double min_one_minus_sqprod = 0.0;
  double min_three_plus_twoprod = 0.0;
  double theta_osc = 0.0;
  double hess_sup = 0.0;  // ||D^2 v||_inf, distance from the flat limit A
  double angle_residual = 0.0;

  bool two_convex_everywhere() const { return min_pair_sum > 0.0 && min_one_plus_prod > 0.0; }
  bool area_decreasing_everywhere() const { return min_one_minus_sqprod > 0.0; }
};

enum class Quantity { logdet_s2, log_star_omega, logdet_p2 };

std::string_view name(Quantity q);
double value(const DiagnosticsRow& row, Quantity q);

struct Tolerances {
  double slack_mono = 1e-7;
  double tol_growth = -1.0;  // negative: use default_growth_tol(h)
  double tol_a2 = 1e-8;
  double tol_hess = 1e-4;
  double tol_theta = 1e-6;
  double warn_margin = 1e-3;
};

inline double default_growth_tol(double h) { return 1e-4 + 10.0 * h * h; }

struct Violation {
  double t = 0.0;          // time of the later sample
  double magnitude = 0.0;  // drop, or growth-bound deficit
};

struct MonotonicityReport {
  Quantity quantity = Quantity::logdet_s2;
  std::vector<Violation> violations;
  double worst_drop = 0.0;
  double slack = 0.0;
  bool passed = true;
};

struct GrowthReport {
  Quantity quantity = Quantity::logdet_s2;
  std::vector<Violation> violations;
  double worst_deficit = 0.0;  // max over pairs of 2|A|^2(argmin) - rate, floored at 0
  double tol = 0.0;
  std::size_t pairs_checked = 0;
  bool passed = true;
};

// Extrema over the grid. For n == 1 the pair quantities are +inf and both
// log-determinants are 0 (empty products). angle_residual is left at 0; the
// flow fills it in.
DiagnosticsRow snapshot(const PotentialField& field);

// Flags every sample-to-sample decrease larger than slack.
MonotonicityReport check_monotone(std::span<const DiagnosticsRow> series, Quantity q, double slack);

// Checks (min(t') - min(t)) / (t' - t) >= 2 |A|^2(argmin at t) - tol on consecutive
// samples. Only logdet_s2 and logdet_p2 carry the bound; other quantities throw ConfigError.
GrowthReport check_growth_bound(std::span<const DiagnosticsRow> series, Quantity q, double tol);

bool check_convergence(const DiagnosticsRow& row, const Tolerances& tol);

}  // namespace lagflow::monitors
