#include "lagflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagflow/errors.hpp"
#include "lagflow/geometry.hpp"
#include "lagflow/parallel.hpp"
#include "lagflow/spectrum.hpp"

namespace lagflow::monitors {

namespace {

struct PointValues {
  double logdet_s2, log_star_omega, logdet_p2, a2, theta, hess_abs;
  spectrum::PairMargins margins;
};

template <class Better>
void track(double x, std::size_t p, double& best, std::size_t& where, Better better) {
  // Strict comparison keeps the lowest index on ties since points arrive in order.
  if (better(x, best)) {
    best = x;
    where = p;
  }
}

}  // namespace

std::string_view name(Quantity q) {
  switch (q) {
    case Quantity::logdet_s2:
      return "min_logdet_s2";
    case Quantity::log_star_omega:
      return "min_log_star_omega";
    case Quantity::logdet_p2:
      return "min_logdet_p2";
  }
  return "?";
}

double value(const DiagnosticsRow& row, Quantity q) {
  switch (q) {
    case Quantity::logdet_s2:
      return row.min_logdet_s2;
    case Quantity::log_star_omega:
      return row.min_log_star_omega;
    case Quantity::logdet_p2:
      return row.min_logdet_p2;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

DiagnosticsRow snapshot(const PotentialField& field) {
  const HessianField hess = hessian(field);
  const ThirdDerivField third = third_derivs(hess);
  const std::size_t count = field.grid.size();
  const int n = field.dim();
  std::vector<PointValues> pts(count);

  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const SymMatrix h = hess.at(p);
      const EigenTuple lambdas = eigenvalues_sym(h);
      PointValues& pv = pts[p];
      pv.theta = spectrum::lagrangian_angle(lambdas);
      pv.log_star_omega = spectrum::log_star_omega(lambdas);
      pv.logdet_s2 = n >= 2 ? spectrum::logdet_s2(lambdas) : 0.0;
      pv.logdet_p2 = n >= 2 ? spectrum::logdet_p2(lambdas) : 0.0;
      pv.margins = spectrum::pair_margins(lambdas);
      pv.a2 = geometry::second_fundamental(h, third.at(p)).normA2;
      pv.hess_abs = hess.periodic_at(p).max_abs();
    }
  });

  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto less = [](double a, double b) { return a < b; };
  const auto greater = [](double a, double b) { return a > b; };

  DiagnosticsRow row;
  row.t = field.t;
  row.min_logdet_s2 = row.min_log_star_omega = row.min_logdet_p2 = inf;
  row.min_pair_sum = row.min_one_plus_prod = row.min_one_minus_sqprod = row.min_three_plus_twoprod = inf;
  row.max_a2 = row.sum_sq_max = row.hess_sup = -inf;
  double theta_min = inf, theta_max = -inf;
  std::size_t unused = 0, argmax_a2 = 0;
  bool s2_set = false, p2_set = false;

  for (std::size_t p = 0; p < count; ++p) {
    const PointValues& pv = pts[p];
    // -inf sentinels must still register as the minimum.
    if (!s2_set || pv.logdet_s2 < row.min_logdet_s2) {
      row.min_logdet_s2 = pv.logdet_s2;
      row.argmin_logdet_s2 = p;
      s2_set = true;
    }
    if (!p2_set || pv.logdet_p2 < row.min_logdet_p2) {
      row.min_logdet_p2 = pv.logdet_p2;
      row.argmin_logdet_p2 = p;
      p2_set = true;
    }
    track(pv.log_star_omega, p, row.min_log_star_omega, row.argmin_log_star_omega, less);
    track(pv.a2, p, row.max_a2, argmax_a2, greater);
    track(pv.margins.sum_sq, p, row.sum_sq_max, unused, greater);
    track(pv.margins.min_pair_sum, p, row.min_pair_sum, unused, less);
    track(pv.margins.min_one_plus_prod, p, row.min_one_plus_prod, unused, less);
    track(pv.margins.min_one_minus_sqprod, p, row.min_one_minus_sqprod, unused, less);
    track(pv.margins.min_three_plus_twoprod, p, row.min_three_plus_twoprod, unused, less);
    track(pv.hess_abs, p, row.hess_sup, unused, greater);
    theta_min = std::min(theta_min, pv.theta);
    theta_max = std::max(theta_max, pv.theta);
  }
  row.a2_at_argmin_s2 = pts[row.argmin_logdet_s2].a2;
  row.a2_at_argmin_p2 = pts[row.argmin_logdet_p2].a2;
  row.theta_osc = theta_max - theta_min;
  return row;
}

MonotonicityReport check_monotone(std::span<const DiagnosticsRow> series, Quantity q, double slack) {
  MonotonicityReport r;
  r.quantity = q;
  r.slack = slack;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double before = value(series[k - 1], q), after = value(series[k], q);
    double drop = before - after;
    if (std::isnan(drop)) drop = std::isinf(before) && before < 0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (drop > r.worst_drop) r.worst_drop = drop;
    if (drop > slack) r.violations.push_back({series[k].t, drop});
  }
  r.passed = r.worst_drop <= slack;
  return r;
}

GrowthReport check_growth_bound(std::span<const DiagnosticsRow> series, Quantity q, double tol) {
  if (q == Quantity::log_star_omega) throw ConfigError("growth bound applies to logdet_s2 and logdet_p2 only");
  GrowthReport r;
  r.quantity = q;
  r.tol = tol;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const DiagnosticsRow& a = series[k - 1];
    const DiagnosticsRow& b = series[k];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) continue;
    const double rate = (value(b, q) - value(a, q)) / dt;
    const double bound = 2.0 * (q == Quantity::logdet_s2 ? a.a2_at_argmin_s2 : a.a2_at_argmin_p2);
    ++r.pairs_checked;
    double deficit = bound - rate;
    if (std::isnan(deficit)) deficit = std::numeric_limits<double>::infinity();
    r.worst_deficit = std::max(r.worst_deficit, deficit);
    if (deficit > tol) r.violations.push_back({b.t, deficit});
  }
  r.passed = r.violations.empty();
  return r;
}

bool check_convergence(const DiagnosticsRow& row, const Tolerances& tol) {
  return row.max_a2 < tol.tol_a2 && row.hess_sup < tol.tol_hess && row.theta_osc < tol.tol_theta;
}

}  // namespace lagflow::monitors
