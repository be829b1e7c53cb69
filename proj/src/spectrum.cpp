#include "lagflow/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lagflow/errors.hpp"

namespace lagflow::spectrum {

namespace {

constexpr double kPoleTol = 1e-12;

void require_pairs(std::span<const double> lambdas, const char* what) {
  if (lambdas.size() < 2) throw UndefinedForDimension(std::string(what) + " needs n >= 2");
}

}  // namespace

double lagrangian_angle(std::span<const double> lambdas) {
  double theta = 0.0;
  for (double l : lambdas) theta += std::atan(l);
  return theta;
}

double star_omega(std::span<const double> lambdas) {
  double prod = 1.0;
  for (double l : lambdas) prod *= 1.0 + l * l;
  return 1.0 / std::sqrt(prod);
}

double log_star_omega(std::span<const double> lambdas) {
  double s = 0.0;
  for (double l : lambdas) s += std::log1p(l * l);
  return -0.5 * s;
}

double logdet_s2(std::span<const double> lambdas) {
  require_pairs(lambdas, "logdet_s2");
  const std::size_t n = lambdas.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double li = lambdas[i], lj = lambdas[j];
      const double num = (li + lj) * (1.0 + li * lj);
      if (!(num > 0.0)) return kNegInf;
      // S_ii + S_jj <= 1 exactly; clip the rounding excess at lambda_i = lambda_j = 1.
      const double ratio = std::min(1.0, num / ((1.0 + li * li) * (1.0 + lj * lj)));
      total += std::log(ratio);
    }
  }
  return total;
}

double logdet_p2(std::span<const double> lambdas) {
  require_pairs(lambdas, "logdet_p2");
  const std::size_t n = lambdas.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double li = lambdas[i], lj = lambdas[j];
      const double q = li * lj;
      const double num = 1.0 - q * q;
      if (!(num > 0.0)) return kNegInf;
      total += std::log(num / ((1.0 + li * li) * (1.0 + lj * lj)));
    }
  }
  return total;
}

PairMargins pair_margins(std::span<const double> lambdas) {
  PairMargins m;
  const int n = static_cast<int>(lambdas.size());
  for (double l : lambdas) m.sum_sq += l * l;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double li = lambdas[static_cast<std::size_t>(i)], lj = lambdas[static_cast<std::size_t>(j)];
      const double prod = li * lj;
      const double sum = li + lj;
      const double opp = 1.0 + prod;
      const double omsp = 1.0 - prod * prod;
      const double tptp = 3.0 + 2.0 * prod;
      if (sum < m.min_pair_sum) m.min_pair_sum = sum, m.pair_sum_at = {i, j};
      if (opp < m.min_one_plus_prod) m.min_one_plus_prod = opp, m.one_plus_prod_at = {i, j};
      if (omsp < m.min_one_minus_sqprod) m.min_one_minus_sqprod = omsp, m.one_minus_sqprod_at = {i, j};
      if (tptp < m.min_three_plus_twoprod) m.min_three_plus_twoprod = tptp, m.three_plus_twoprod_at = {i, j};
    }
  }
  return m;
}

Classification classify(std::span<const double> lambdas) {
  Classification c;
  c.margins = pair_margins(lambdas);
  c.flags.convex = std::all_of(lambdas.begin(), lambdas.end(), [](double l) { return l > 0.0; });
  c.flags.vacuous = lambdas.size() < 2;
  c.flags.two_convex = c.margins.min_pair_sum > 0.0 && c.margins.min_one_plus_prod > 0.0;
  c.flags.area_decreasing = c.margins.min_one_minus_sqprod > 0.0;
  return c;
}

PointSpectrum analyze(std::span<const double> lambdas) {
  PointSpectrum ps;
  ps.lambdas = EigenTuple::from(lambdas);
  ps.theta = lagrangian_angle(lambdas);
  ps.star_omega = star_omega(lambdas);
  if (lambdas.size() >= 2) {
    ps.logdet_s2 = logdet_s2(lambdas);
    ps.logdet_p2 = logdet_p2(lambdas);
  }
  const Classification c = classify(lambdas);
  ps.flags = c.flags;
  ps.margins = c.margins;
  return ps;
}

EigenTuple lewy_rotate(std::span<const double> lambdas, double phi) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  EigenTuple out(static_cast<int>(lambdas.size()));
  for (int i = 0; i < out.size(); ++i) {
    const double rotated = std::atan(lambdas[static_cast<std::size_t>(i)]) - phi;
    if (!(std::abs(rotated) < half_pi - kPoleTol))
      throw PoleError("rotated angle reaches +-pi/2; graph is no longer graphical");
    out[i] = std::tan(rotated);
  }
  return out;
}

void validate(const BoundBudget& budget) {
  if (!std::isfinite(budget.delta1) || !std::isfinite(budget.delta2) || budget.delta1 < 0.0 || budget.delta2 < 0.0)
    throw ConfigError("bound budget deltas must be finite and non-negative");
}

BoundReport check_bounds(std::span<const double> lambdas, const BoundBudget& budget) {
  require_pairs(lambdas, "check_bounds");
  validate(budget);
  BoundReport r;
  const double e2d1 = std::exp(2.0 * budget.delta1);
  const double emd2 = std::exp(-budget.delta2);
  const double span_sq = e2d1 - 1.0;
  r.one_plus_prod_threshold = span_sq > 0.0 ? emd2 / std::sqrt(2.0 * span_sq) : kPosInf;
  r.pair_sum_threshold = 2.0 * emd2 / (e2d1 + 1.0);

  double sum_sq = 0.0;
  for (double l : lambdas) sum_sq += l * l;
  r.sum_squares.worst_slack = span_sq - sum_sq;

  const std::size_t n = lambdas.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double li = lambdas[i], lj = lambdas[j];
      const double sum = li + lj, opp = 1.0 + li * lj;
      r.pair_product.worst_slack = std::min(r.pair_product.worst_slack, sum * opp - emd2);
      r.pair_separate.worst_slack =
          std::min({r.pair_separate.worst_slack, opp - r.one_plus_prod_threshold, sum - r.pair_sum_threshold});
    }
  }
  for (BoundCheck* c : {&r.sum_squares, &r.pair_product, &r.pair_separate}) c->passed = c->worst_slack >= 0.0;
  return r;
}

}  // namespace lagflow::spectrum
