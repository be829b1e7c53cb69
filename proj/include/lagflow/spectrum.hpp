#pragma once

#include <limits>
#include <span>

#include "lagflow/sym_matrix.hpp"

// Pointwise algebra on sorted Hessian eigenvalue tuples.
namespace lagflow::spectrum {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

struct IndexPair {
  int i = -1;
  int j = -1;
};

// Pairwise region margins over i < j, scanned in lexicographic order; the first
// minimizing pair wins. For n == 1 every pair minimum is +inf.
struct PairMargins {
  double min_pair_sum = kPosInf;           // min lambda_i + lambda_j
  double min_one_plus_prod = kPosInf;      // min 1 + lambda_i lambda_j
  double min_one_minus_sqprod = kPosInf;   // min 1 - lambda_i^2 lambda_j^2
  double min_three_plus_twoprod = kPosInf; // min 3 + 2 lambda_i lambda_j
  double sum_sq = 0.0;                     // sum lambda_i^2
  IndexPair pair_sum_at;
  IndexPair one_plus_prod_at;
  IndexPair one_minus_sqprod_at;
  IndexPair three_plus_twoprod_at;
};

struct RegionFlags {
  bool convex = false;
  bool two_convex = false;
  bool area_decreasing = false;
  bool vacuous = false;  // n == 1: the pair conditions hold trivially
};

struct Classification {
  RegionFlags flags;
  PairMargins margins;
};

struct PointSpectrum {
  EigenTuple lambdas;
  double theta = 0.0;
  double star_omega = 1.0;
  double logdet_s2 = 0.0;  // kNegInf outside / on the boundary of the two-convex set
  double logdet_p2 = 0.0;  // kNegInf outside / on the boundary of the area-decreasing set
  RegionFlags flags;
  PairMargins margins;
};

// Lower bounds -delta1 for log(*Omega) and -delta2 for log det S^[2].
struct BoundBudget {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

struct BoundCheck {
  bool passed = true;
  double worst_slack = kPosInf;  // >= 0 iff passed
};

struct BoundReport {
  BoundCheck sum_squares;     // sum lambda^2 <= e^{2 delta1} - 1
  BoundCheck pair_product;    // (l_i + l_j)(1 + l_i l_j) >= e^{-delta2}
  BoundCheck pair_separate;   // 1 + l_i l_j and l_i + l_j individually bounded below
  double one_plus_prod_threshold = 0.0;
  double pair_sum_threshold = 0.0;

  bool all_passed() const { return sum_squares.passed && pair_product.passed && pair_separate.passed; }
};

// sum arctan(lambda_i), in (-n pi/2, n pi/2).
double lagrangian_angle(std::span<const double> lambdas);

// 1 / sqrt(prod (1 + lambda_i^2)).
double star_omega(std::span<const double> lambdas);
// log(*Omega), evaluated with log1p for small eigenvalues.
double log_star_omega(std::span<const double> lambdas);

// log prod_{i<j} (l_i + l_j)(1 + l_i l_j) / ((1 + l_i^2)(1 + l_j^2)).
// Returns kNegInf if any pair product is <= 0. Throws UndefinedForDimension for n < 2.
double logdet_s2(std::span<const double> lambdas);

// log prod_{i<j} (1 - l_i^2 l_j^2) / ((1 + l_i^2)(1 + l_j^2)).
// Returns kNegInf if any 1 - l_i^2 l_j^2 <= 0. Throws UndefinedForDimension for n < 2.
double logdet_p2(std::span<const double> lambdas);

PairMargins pair_margins(std::span<const double> lambdas);
Classification classify(std::span<const double> lambdas);

// All scalars at once; logdets are 0 (empty product) when n == 1.
PointSpectrum analyze(std::span<const double> lambdas);

// Rotates every Kahler angle arctan(lambda_i) by -phi: lambda' = tan(arctan(lambda) - phi).
// Throws PoleError if a rotated angle lands within 1e-12 of +-pi/2 or beyond.
EigenTuple lewy_rotate(std::span<const double> lambdas, double phi);

// Throws ConfigError unless both deltas are finite and non-negative.
void validate(const BoundBudget& budget);
BoundReport check_bounds(std::span<const double> lambdas, const BoundBudget& budget);

}  // namespace lagflow::spectrum
