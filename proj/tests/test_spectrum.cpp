#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lagflow/errors.hpp"
#include "lagflow/scenarios.hpp"
#include "lagflow/spectrum.hpp"
#include "lagflow/sym_matrix.hpp"

using namespace lagflow;
using namespace lagflow::spectrum;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double max_reconstruction_error(const SymMatrix& m, const Eigensystem& es) {
  const int n = m.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = 0.0;
      for (int k = 0; k < n; ++k) x += es.vector(i, k) * es.values[k] * es.vector(j, k);
      worst = std::max(worst, std::abs(x - m(i, j)));
    }
  return worst;
}

double max_orthogonality_error(const Eigensystem& es) {
  const int n = es.dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double x = 0.0;
      for (int k = 0; k < n; ++k) x += es.vector(k, a) * es.vector(k, b);
      worst = std::max(worst, std::abs(x - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

EigenTuple random_tuple(SplitMix64& rng, int n, double lo, double hi) {
  EigenTuple t(n);
  for (int i = 0; i < n; ++i) t[i] = rng.uniform(lo, hi);
  std::sort(&t[0], &t[0] + n);
  return t;
}

}  // namespace

TEST_CASE("eigen_sym on hand-diagonalizable matrices") {
  SUBCASE("identity keeps the standard basis") {
    const auto es = eigen_sym(SymMatrix::identity(2));
    CHECK(es.values[0] == 1.0);
    CHECK(es.values[1] == 1.0);
    CHECK(es.vector(0, 0) == Approx(1.0).epsilon(1e-15));
    CHECK(es.vector(1, 1) == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(es.vector(0, 1)) < 1e-15);
  }
  SUBCASE("diagonal input is sorted ascending") {
    const double d[] = {3.0, -1.0};
    const auto es = eigen_sym(SymMatrix::diagonal(d));
    CHECK(es.values[0] == -1.0);
    CHECK(es.values[1] == 3.0);
  }
  SUBCASE("[[2,1],[1,2]]") {
    const double m[] = {2.0, 1.0, 1.0, 2.0};
    const auto es = eigen_sym(SymMatrix::from_row_major(2, m));
    CHECK(es.values[0] == Approx(1.0).epsilon(1e-14));
    CHECK(es.values[1] == Approx(3.0).epsilon(1e-14));
    const double r = 1.0 / std::sqrt(2.0);
    // first component positive: (1,-1)/sqrt2 and (1,1)/sqrt2
    CHECK(es.vector(0, 0) == Approx(r).epsilon(1e-14));
    CHECK(es.vector(1, 0) == Approx(-r).epsilon(1e-14));
    CHECK(es.vector(0, 1) == Approx(r).epsilon(1e-14));
    CHECK(es.vector(1, 1) == Approx(r).epsilon(1e-14));
  }
}

TEST_CASE("eigen_sym rejects bad input") {
  const double asym[] = {1.0, 2.0, 2.5, 1.0};
  CHECK_THROWS_AS(SymMatrix::from_row_major(2, asym), InvalidMatrix);
  SymMatrix m(2);
  m.set(0, 1, std::nan(""));
  CHECK_THROWS_AS(eigen_sym(m), InvalidMatrix);
}

TEST_CASE("eigen_sym property: orthonormal and reconstructing on random matrices") {
  SplitMix64 rng(11);
  for (int n = 2; n <= 4; ++n) {
    double worst_rec = 0.0, worst_orth = 0.0;
    for (int s = 0; s < 10000; ++s) {
      SymMatrix m(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, rng.uniform(-10.0, 10.0));
      const auto es = eigen_sym(m);
      for (int i = 1; i < n; ++i) REQUIRE(es.values[i - 1] <= es.values[i]);
      worst_rec = std::max(worst_rec, max_reconstruction_error(m, es) / (1.0 + m.max_abs()));
      worst_orth = std::max(worst_orth, max_orthogonality_error(es));
    }
    CHECK(worst_rec <= 1e-12);
    CHECK(worst_orth <= 1e-12);
  }
}

TEST_CASE("eigen_sym is deterministic and respects the sign rule") {
  SplitMix64 rng(12);
  for (int s = 0; s < 200; ++s) {
    SymMatrix m(3);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) m.set(i, j, rng.uniform(-1.0, 1.0));
    const auto a = eigen_sym(m), b = eigen_sym(m);
    CHECK(a.vectors == b.vectors);
    for (int c = 0; c < 3; ++c) {
      int r = 0;
      while (std::abs(a.vector(r, c)) <= 1e-12) ++r;
      CHECK(a.vector(r, c) > 0.0);
    }
  }
}

TEST_CASE("eigenvalues_sym matches eigen_sym") {
  SplitMix64 rng(13);
  for (int s = 0; s < 500; ++s) {
    SymMatrix m(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) m.set(i, j, rng.uniform(-3.0, 3.0));
    const auto v = eigenvalues_sym(m);
    const auto es = eigen_sym(m);
    for (int i = 0; i < 4; ++i) CHECK(v[i] == Approx(es.values[i]).epsilon(1e-13));
  }
}

TEST_CASE("lagrangian_angle") {
  CHECK(lagrangian_angle(EigenTuple{0.0, 0.0, 0.0}) == 0.0);
  CHECK(lagrangian_angle(EigenTuple{1.0, 1.0}) == Approx(kPi / 2).epsilon(1e-15));
  CHECK(lagrangian_angle(EigenTuple{std::sqrt(3.0), -1.0 / std::sqrt(3.0)}) == Approx(kPi / 6).epsilon(1e-14));
}

TEST_CASE("star_omega") {
  CHECK(star_omega(EigenTuple{0.0, 0.0}) == 1.0);
  CHECK(star_omega(EigenTuple{1.0, 1.0}) == Approx(0.5).epsilon(1e-15));
  CHECK(star_omega(EigenTuple{2.0, -0.3}) == Approx(0.4283529368781193).epsilon(1e-14));
  CHECK(log_star_omega(EigenTuple{2.0, -0.3}) == Approx(std::log(0.4283529368781193)).epsilon(1e-14));
  CHECK(log_star_omega(EigenTuple{1e-9}) == Approx(-0.5e-18).epsilon(1e-6));
}

TEST_CASE("logdet_s2 values and sentinel") {
  CHECK(logdet_s2(EigenTuple{1.0, 1.0}) == 0.0);
  CHECK(logdet_s2(EigenTuple{0.0, 1.0}) == Approx(-0.6931471805599453).epsilon(1e-15));
  CHECK(logdet_s2(EigenTuple{2.0, -0.3}) == Approx(-2.0812780894871374).epsilon(1e-14));
  CHECK(logdet_s2(EigenTuple{0.5, 1.0, 2.0}) == Approx(-0.43386458262986227).epsilon(1e-14));
  CHECK(logdet_s2(EigenTuple{-0.5, 0.4}) == kNegInf);
  CHECK(logdet_s2(EigenTuple{-1.0, 1.0}) == kNegInf);  // boundary: pair sum exactly zero
  CHECK_THROWS_AS(logdet_s2(EigenTuple{1.0}), UndefinedForDimension);
}

TEST_CASE("logdet_p2 values and sentinel") {
  CHECK(logdet_p2(EigenTuple{0.0, 0.0}) == 0.0);
  CHECK(logdet_p2(EigenTuple{0.5, -0.5}) == Approx(-0.5108256237659907).epsilon(1e-14));
  CHECK(logdet_p2(EigenTuple{2.0, -0.3}) == Approx(-2.1419027113035725).epsilon(1e-14));
  CHECK(logdet_p2(EigenTuple{1.0, 1.0}) == kNegInf);
  CHECK_THROWS_AS(logdet_p2(EigenTuple{0.3}), UndefinedForDimension);
}

TEST_CASE("classify") {
  SUBCASE("(1,1,1)") {
    const auto c = classify(EigenTuple{1.0, 1.0, 1.0});
    CHECK(c.flags.convex);
    CHECK(c.flags.two_convex);
    CHECK_FALSE(c.flags.area_decreasing);
  }
  SUBCASE("(2,-0.3)") {
    const auto c = classify(EigenTuple{-0.3, 2.0});
    CHECK_FALSE(c.flags.convex);
    CHECK(c.flags.two_convex);
    CHECK(c.flags.area_decreasing);
    CHECK(c.margins.min_pair_sum == Approx(1.7));
    CHECK(c.margins.min_one_plus_prod == Approx(0.4));
    CHECK(c.margins.min_one_minus_sqprod == Approx(0.64));
    CHECK(c.margins.min_three_plus_twoprod == Approx(1.8));
    CHECK(c.margins.sum_sq == Approx(4.09));
  }
  SUBCASE("(2,0.6,0.4)") {
    const auto c = classify(EigenTuple{0.4, 0.6, 2.0});
    CHECK(c.flags.convex);
    CHECK_FALSE(c.flags.area_decreasing);
    CHECK(c.margins.one_minus_sqprod_at.i == 1);
    CHECK(c.margins.one_minus_sqprod_at.j == 2);
  }
  SUBCASE("n = 1 is vacuous") {
    const auto c = classify(EigenTuple{-5.0});
    CHECK(c.flags.vacuous);
    CHECK(c.flags.two_convex);
    CHECK(c.flags.area_decreasing);
    CHECK(c.margins.min_pair_sum == kPosInf);
    CHECK(c.margins.min_one_minus_sqprod == kPosInf);
  }
  SUBCASE("ties resolve to the first pair in lexicographic order") {
    const auto m = pair_margins(EigenTuple{1.0, 1.0, 1.0});
    CHECK(m.pair_sum_at.i == 0);
    CHECK(m.pair_sum_at.j == 1);
  }
}

TEST_CASE("analyze on n = 1 reports empty-product logdets") {
  const auto s = analyze(EigenTuple{0.7});
  CHECK(s.logdet_s2 == 0.0);
  CHECK(s.logdet_p2 == 0.0);
  CHECK(s.theta == Approx(std::atan(0.7)));
}

TEST_CASE("pointwise invariants on random tuples") {
  SplitMix64 rng(21);
  for (int n = 1; n <= 4; ++n)
    for (int s = 0; s < 5000; ++s) {
      const EigenTuple t = random_tuple(rng, n, -20.0, 20.0);
      const auto p = analyze(t);
      REQUIRE(p.star_omega > 0.0);
      REQUIRE(p.star_omega <= 1.0);
      REQUIRE(std::abs(p.theta) < n * kPi / 2);
      if (std::isfinite(p.logdet_s2)) REQUIRE(p.logdet_s2 <= 1e-15);
      if (std::isfinite(p.logdet_p2)) REQUIRE(p.logdet_p2 <= 1e-15);
      REQUIRE(p.flags.two_convex == (p.margins.min_pair_sum > 0.0 && p.margins.min_one_plus_prod > 0.0));
    }
}

TEST_CASE("finite logdet_s2 coincides with two-convexity on the positive component") {
  // Sampling both components of {(l_i + l_j)(1 + l_i l_j) > 0}: on the component
  // with l_i + l_j > 0 finiteness is equivalent to two-convexity.
  SplitMix64 rng(22);
  int finite_outside = 0, negative_branch = 0;
  for (int s = 0; s < 20000; ++s) {
    const EigenTuple t = random_tuple(rng, 2, -4.0, 4.0);
    const auto p = analyze(t);
    const bool finite = std::isfinite(p.logdet_s2);
    if (t[0] + t[1] > 0.0) REQUIRE(finite == p.flags.two_convex);
    if (finite && !p.flags.two_convex) {
      ++finite_outside;
      // negative branch: both factors negative
      REQUIRE(t[0] + t[1] < 0.0);
      REQUIRE(1.0 + t[0] * t[1] < 0.0);
      ++negative_branch;
    }
  }
  CHECK(finite_outside == negative_branch);
  CHECK(finite_outside > 0);
}

TEST_CASE("lewy_rotate examples") {
  const auto a = lewy_rotate(EigenTuple{1.0, 1.0}, kPi / 4);
  CHECK(std::abs(a[0]) < 1e-15);
  CHECK(std::abs(a[1]) < 1e-15);
  CHECK(lewy_rotate(EigenTuple{std::sqrt(3.0)}, kPi / 4)[0] == Approx(0.2679491924311228).epsilon(1e-14));
  CHECK(lewy_rotate(EigenTuple{0.0}, kPi / 4)[0] == Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(lewy_rotate(EigenTuple{-1.0}, kPi / 4), PoleError);
  CHECK_THROWS_AS(lewy_rotate(EigenTuple{0.0}, kPi / 2), PoleError);
}

TEST_CASE("lewy_rotate property: two-convex maps to area-decreasing, round trip") {
  SplitMix64 rng(23);
  for (int n = 2; n <= 3; ++n) {
    int done = 0;
    double worst = 0.0;
    while (done < 10000) {
      const EigenTuple t = random_tuple(rng, n, -3.0, 6.0);
      if (!classify(t).flags.two_convex) continue;
      ++done;
      for (double l : t) REQUIRE(std::atan(l) > -kPi / 4);
      const auto r = lewy_rotate(t, kPi / 4);
      REQUIRE(classify(r).flags.area_decreasing);
      const auto back = lewy_rotate(r, -kPi / 4);
      for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - t[i]) / std::max(1.0, std::abs(t[i])));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("lewy_rotate agrees with the rational form") {
  SplitMix64 rng(24);
  for (int s = 0; s < 1000; ++s) {
    const double l = rng.uniform(-0.9, 10.0);
    CHECK(lewy_rotate(EigenTuple{l}, kPi / 4)[0] == Approx((l - 1.0) / (1.0 + l)).epsilon(1e-12));
  }
}

TEST_CASE("check_bounds examples") {
  SUBCASE("(1,1), delta1 = log 2, delta2 = 0.1") {
    const auto r = check_bounds(EigenTuple{1.0, 1.0}, {std::log(2.0), 0.1});
    CHECK(r.all_passed());
    CHECK(r.sum_squares.worst_slack == Approx(1.0).epsilon(1e-14));
    CHECK(r.pair_product.worst_slack == Approx(4.0 - std::exp(-0.1)).epsilon(1e-14));
  }
  SUBCASE("(0,0) passes the sum-of-squares bound with slack e^{2 delta1} - 1") {
    const double d1 = 0.37;
    const auto r = check_bounds(EigenTuple{0.0, 0.0}, {d1, 0.5});
    CHECK(r.sum_squares.passed);
    CHECK(r.sum_squares.worst_slack == Approx(std::exp(2 * d1) - 1.0).epsilon(1e-14));
  }
  SUBCASE("thresholds for e^{2 delta1} = 2, delta2 = 0") {
    const auto r = check_bounds(EigenTuple{0.5, 0.5}, {0.5 * std::log(2.0), 0.0});
    CHECK(r.one_plus_prod_threshold == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(r.pair_sum_threshold == Approx(2.0 / 3.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(check_bounds(EigenTuple{1.0}, {0.1, 0.1}), UndefinedForDimension);
  CHECK_THROWS_AS(check_bounds(EigenTuple{1.0, 1.0}, {-0.1, 0.1}), ConfigError);
  CHECK_THROWS_AS(validate(BoundBudget{0.1, std::nan("")}), ConfigError);
}

TEST_CASE("check_bounds property: budgets read off a two-convex tuple always pass") {
  SplitMix64 rng(25);
  for (int n = 2; n <= 4; ++n) {
    int done = 0;
    while (done < 3000) {
      const EigenTuple t = random_tuple(rng, n, -2.0, 5.0);
      if (!classify(t).flags.two_convex) continue;
      ++done;
      const BoundBudget b{-log_star_omega(t) + 1e-9, -logdet_s2(t) + 1e-9};
      REQUIRE(check_bounds(t, b).all_passed());
    }
  }
}
