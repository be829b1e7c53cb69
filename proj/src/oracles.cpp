#include "lagflow/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "lagflow/errors.hpp"
#include "lagflow/field.hpp"
#include "lagflow/geometry.hpp"
#include "lagflow/scenarios.hpp"
#include "lagflow/spectrum.hpp"

namespace lagflow::oracles {

namespace {

using geometry::Matrix;
constexpr double kPi = std::numbers::pi;

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

EigenTuple random_tuple(SplitMix64& rng, int n, double lo, double hi) {
  EigenTuple t(n);
  for (int i = 0; i < n; ++i) t[i] = rng.uniform(lo, hi);
  std::sort(&t[0], &t[0] + n);
  return t;
}

EigenTuple random_two_convex(SplitMix64& rng, int n) {
  for (;;) {
    const EigenTuple t = random_tuple(rng, n, -3.0, 4.0);
    const auto m = spectrum::pair_margins(t);
    if (m.min_pair_sum > 1e-6 && m.min_one_plus_prod > 1e-6) return t;
  }
}

EigenTuple random_area_decreasing(SplitMix64& rng, int n) {
  for (;;) {
    const EigenTuple t = random_tuple(rng, n, -3.0, 3.0);
    if (spectrum::pair_margins(t).min_one_minus_sqprod > 1e-6) return t;
  }
}

SymMatrix random_sym(SplitMix64& rng, int n, double scale) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, rng.uniform(-scale, scale));
  return m;
}

SymTensor3 random_third(SplitMix64& rng, int n, double scale) {
  SymTensor3 t(n);
  for (int s = 0; s < SymTensor3::unique_count(n); ++s) t.unique(s) = rng.uniform(-scale, scale);
  return t;
}

// Orthogonal matrix from Householder QR of a random square matrix.
Matrix random_orthogonal(SplitMix64& rng, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return Eigen::HouseholderQR<Matrix>(m).householderQ();
}

Result make(std::string name, double worst, double tol, long samples, bool ok = true) {
  Result r;
  r.name = std::move(name);
  r.worst = worst;
  r.tolerance = tol;
  r.samples = samples;
  r.passed = ok && worst <= tol;
  return r;
}

Result eigen_check(const Hooks&) {
  SplitMix64 rng(101);
  double worst_orth = 0.0, worst_rec = 0.0;
  long count = 0;
  for (int n = 2; n <= 4; ++n) {
    for (int s = 0; s < 10000; ++s, ++count) {
      SymMatrix m = random_sym(rng, n, 5.0);
      if (s % 10 == 0) {
        // Repeated eigenvalues through a rotated diagonal with a tie.
        const Matrix q = random_orthogonal(rng, n);
        Eigen::VectorXd d(n);
        for (int i = 0; i < n; ++i) d(i) = (i < 2) ? 1.5 : rng.uniform(-3.0, 3.0);
        const Matrix full = q * d.asDiagonal() * q.transpose();
        m = SymMatrix(n);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) m.set(i, j, 0.5 * (full(i, j) + full(j, i)));
      }
      const Eigensystem es = eigen_sym(m);
      Matrix q(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = es.vector(i, j);
      const Matrix orth = q.transpose() * q - Matrix::Identity(n, n);
      Eigen::VectorXd lam(n);
      for (int i = 0; i < n; ++i) lam(i) = es.values[i];
      Matrix rec = q * lam.asDiagonal() * q.transpose();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rec(i, j) -= m(i, j);
      worst_orth = std::max(worst_orth, orth.cwiseAbs().maxCoeff());
      worst_rec = std::max(worst_rec, rec.cwiseAbs().maxCoeff() / (1.0 + m.max_abs()));
      for (int i = 1; i < n; ++i)
        if (es.values[i] < es.values[i - 1]) return make("eigen_sym", kPi, 1e-12, count, false);
    }
  }
  Result r = make("eigen_sym", std::max(worst_orth, worst_rec), 1e-12, count);
  char buf[96];
  std::snprintf(buf, sizeof buf, "orthogonality %.3g, reconstruction %.3g", worst_orth, worst_rec);
  r.detail = buf;
  return r;
}

// S and P of a random frame against their diagonal closed forms.
Result frame_check(const char* name, bool s_form) {
  SplitMix64 rng(s_form ? 202 : 203);
  double worst = 0.0;
  long count = 0;
  for (int n = 2; n <= 3; ++n)
    for (int s = 0; s < 1000; ++s, ++count) {
      const EigenTuple lam = random_tuple(rng, n, -3.0, 3.0);
      const auto frame = geometry::make_frame(random_orthogonal(rng, n), lam);
      const Matrix m = s_form ? geometry::s_from_first_principles(frame) : geometry::p_from_first_principles(frame);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double l = lam[i];
          const double want = i != j ? 0.0 : s_form ? l / (1.0 + l * l) : (1.0 - l * l) / (1.0 + l * l);
          worst = std::max(worst, std::abs(m(i, j) - want));
        }
    }
  return make(name, worst, 1e-10, count);
}

Result s_check(const Hooks&) { return frame_check("s_first_principles", true); }
Result p_check(const Hooks&) { return frame_check("p_first_principles", false); }

// log det of the assembled pair matrix against the product formula.
Result s2_check(const Hooks& hooks) {
  SplitMix64 rng(303);
  double worst = 0.0;
  long count = 0;
  for (int n = 2; n <= 3; ++n)
    for (int s = 0; s < 1000; ++s, ++count) {
      const EigenTuple lam = random_two_convex(rng, n);
      const auto frame = geometry::make_frame(random_orthogonal(rng, n), lam);
      const double got = geometry::log_det(geometry::s2_matrix(geometry::s_from_first_principles(frame)));
      worst = std::max(worst, rel_err(got, hooks.logdet_s2(lam)));
    }
  return make("logdet_s2_product", worst, 1e-10, count);
}

// det of the pair matrix of P carries an extra factor 2 per pair:
// P_ii + P_jj = 2(1 - l_i^2 l_j^2) / ((1 + l_i^2)(1 + l_j^2)).
Result p2_check(const Hooks& hooks) {
  SplitMix64 rng(304);
  double worst = 0.0;
  long count = 0;
  for (int n = 2; n <= 3; ++n)
    for (int s = 0; s < 1000; ++s, ++count) {
      const EigenTuple lam = random_area_decreasing(rng, n);
      const auto frame = geometry::make_frame(random_orthogonal(rng, n), lam);
      const double pairs = n * (n - 1) / 2;
      const double got =
          geometry::log_det(geometry::s2_matrix(geometry::p_from_first_principles(frame))) - pairs * std::log(2.0);
      worst = std::max(worst, rel_err(got, hooks.logdet_p2(lam)));
    }
  return make("logdet_p2_product", worst, 1e-10, count);
}

Result lewy_check(const Hooks& hooks) {
  SplitMix64 rng(404);
  double worst = 0.0;
  long count = 0;
  bool ok = true;
  for (int n = 2; n <= 3; ++n)
    for (int s = 0; s < 10000; ++s, ++count) {
      const EigenTuple lam = random_two_convex(rng, n);
      EigenTuple rot;
      try {
        rot = spectrum::lewy_rotate(lam, kPi / 4);
      } catch (const PoleError&) {
        ok = false;
        continue;
      }
      if (!std::isfinite(hooks.logdet_p2(rot)) || !spectrum::classify(rot).flags.area_decreasing) ok = false;
      const EigenTuple back = spectrum::lewy_rotate(rot, -kPi / 4);
      for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(back[i] - lam[i]) / std::max(1.0, std::abs(lam[i])));
        // Rational form of the same rotation, defined away from lambda = -1.
        if (std::abs(1.0 + lam[i]) > 1e-3)
          worst = std::max(worst, rel_err(rot[i], (lam[i] - 1.0) / (1.0 + lam[i])));
      }
    }
  return make("lewy_rotation", worst, 1e-12, count, ok);
}

Result n1_check(const Hooks&) {
  SplitMix64 rng(505);
  double worst = 0.0;
  long count = 0;
  for (int s = 0; s < 1000; ++s, ++count) {
    const double l = rng.uniform(-4.0, 4.0), c = rng.uniform(-2.0, 2.0);
    SymMatrix h(1);
    h.set(0, 0, l);
    SymTensor3 t(1);
    t.set(0, 0, 0, c);
    const double want = c * c / std::pow(1.0 + l * l, 3);
    worst = std::max(worst, rel_err(geometry::second_fundamental(h, t).normA2, want));
  }
  return make("a2_curve_closed_form", worst, 1e-12, count);
}

Result jet_check(const Hooks&) {
  SplitMix64 rng(606);
  double worst = 0.0;
  long count = 0;
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 1000; ++s, ++count) {
      const SymMatrix h = random_sym(rng, n, 2.0);
      const SymTensor3 t = random_third(rng, n, 1.0);
      const auto imm = geometry::immersion_from_jet(h, t);
      const double a2 = geometry::second_fundamental(h, t).normA2;
      worst = std::max({worst, std::abs(imm.normA2 - a2) / std::max(a2, 1e-300),
                        imm.symmetry_defect / std::sqrt(std::max(a2, 1e-300))});
    }
  return make("a2_immersion_jet", worst, 1e-10, count);
}

// Conjugating the jet by an orthogonal change of coordinates leaves |A|^2 fixed.
Result invariance_check(const Hooks&) {
  SplitMix64 rng(607);
  double worst = 0.0;
  long count = 0;
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 1000; ++s, ++count) {
      const SymMatrix h = random_sym(rng, n, 2.0);
      const SymTensor3 t = random_third(rng, n, 1.0);
      const Matrix q = random_orthogonal(rng, n);
      SymMatrix h2(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double x = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) x += q(a, i) * q(b, j) * h(a, b);
          h2.set(i, j, x);
        }
      SymTensor3 t2(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k) {
            double x = 0.0;
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) x += q(a, i) * q(b, j) * q(c, k) * t(a, b, c);
            t2.set(i, j, k, x);
          }
      const double a = geometry::second_fundamental(h, t).normA2;
      const double b = geometry::second_fundamental(h2, t2).normA2;
      worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
    }
  return make("a2_coordinate_invariance", worst, 1e-10, count);
}

PotentialField cos_field(int N, double amp, double amp2) {
  PotentialField f = make_field(2, N, SymMatrix(2));
  for (std::size_t p = 0; p < f.grid.size(); ++p) {
    const auto c = f.grid.coords(p);
    const double x = f.grid.coordinate(c[0]), y = f.grid.coordinate(c[1]);
    f.v[p] = amp * std::cos(x) + amp2 * std::cos(x + 2.0 * y);
  }
  remove_mean(f);
  return f;
}

std::size_t point_at(const Grid& g, int i, int j) {
  const int c[2] = {i, j};
  return g.index(c);
}

double a2_gap(int N, double amp, double amp2, int i, int j) {
  const PotentialField f = cos_field(N, amp, amp2);
  const std::size_t p = point_at(f.grid, i, j);
  return std::abs(geometry::immersion_oracle_a2(f, p).normA2 -
                  geometry::second_fundamental(hessian_at(f, p), third_at(f, p)).normA2);
}

// Grid immersion vs the stencil path: 1e-5 at x1 = pi/2 on a fine grid, and the
// gap between them decays at second order.
Result immersion_grid_check(const Hooks&) {
  const double gap = a2_gap(256, 0.1, 0.0, 64, 0);
  const double g64 = a2_gap(64, 0.1, 0.05, 8, 4), g128 = a2_gap(128, 0.1, 0.05, 16, 8);
  const double ratio = g128 / g64;
  Result r = make("a2_immersion_grid", gap, 1e-5, 3, ratio >= 0.2 && ratio <= 0.3);
  char buf[96];
  std::snprintf(buf, sizeof buf, "gap %.3g at N=256, order ratio %.3f", gap, ratio);
  r.detail = buf;
  return r;
}

double theta_residual(int N) {
  const PotentialField f = cos_field(N, 0.1, 0.0);
  double worst = 0.0;
  for (int i = 0; i < N; ++i) worst = std::max(worst, geometry::theta_gradient_vs_meancurv(f, point_at(f.grid, i, 0)));
  return worst;
}

Result theta_check(const Hooks&) {
  const double r64 = theta_residual(64), r128 = theta_residual(128);
  const double ratio = r128 / r64;
  Result r = make("theta_gradient", r64, 1e-4, 2, ratio >= 0.2 && ratio <= 0.3);
  char buf[96];
  std::snprintf(buf, sizeof buf, "residual %.3g at N=64, order ratio %.3f", r64, ratio);
  r.detail = buf;
  return r;
}

// Hessian and third-derivative stencils on v = cos x1 cos x2 against the analytic values.
struct StencilErrors {
  double hess = 0.0;
  double third = 0.0;
};

StencilErrors stencil_errors(int N) {
  PotentialField f = make_field(2, N, SymMatrix(2));
  for (std::size_t p = 0; p < f.grid.size(); ++p) {
    const auto c = f.grid.coords(p);
    f.v[p] = std::cos(f.grid.coordinate(c[0])) * std::cos(f.grid.coordinate(c[1]));
  }
  const HessianField hess = hessian(f);
  const ThirdDerivField third = third_derivs(hess);
  StencilErrors e;
  for (std::size_t p = 0; p < f.grid.size(); ++p) {
    const auto c = f.grid.coords(p);
    const double x = f.grid.coordinate(c[0]), y = f.grid.coordinate(c[1]);
    const double cx = std::cos(x), sx = std::sin(x), cy = std::cos(y), sy = std::sin(y);
    const SymMatrix m = hess.at(p);
    e.hess = std::max({e.hess, std::abs(m(0, 0) + cx * cy), std::abs(m(1, 1) + cx * cy), std::abs(m(0, 1) - sx * sy)});
    const SymTensor3 t = third.at(p);
    e.third = std::max({e.third, std::abs(t(0, 0, 0) - sx * cy), std::abs(t(0, 0, 1) - cx * sy),
                        std::abs(t(0, 1, 1) - sx * cy), std::abs(t(1, 1, 1) - cx * sy)});
  }
  return e;
}

Result stencil_check(const Hooks&) {
  const StencilErrors e64 = stencil_errors(64), e128 = stencil_errors(128);
  const double rh = e128.hess / e64.hess, rt = e128.third / e64.third;
  const bool ok = rh >= 0.2 && rh <= 0.3 && rt >= 0.2 && rt <= 0.3;
  Result r = make("stencil_order", std::max(e64.hess, e64.third), 5e-3, 2, ok);
  char buf[128];
  std::snprintf(buf, sizeof buf, "N=64 errors %.3g / %.3g, ratios %.3f / %.3f", e64.hess, e64.third, rh, rt);
  r.detail = buf;
  return r;
}

// Budgets read off a two-convex tuple itself must satisfy the whole chain.
Result bound_chain_check(const Hooks& hooks) {
  SplitMix64 rng(808);
  double worst = spectrum::kPosInf;
  long count = 0;
  bool ok = true;
  for (int n = 2; n <= 4; ++n)
    for (int s = 0; s < 1000; ++s, ++count) {
      const EigenTuple lam = random_two_convex(rng, n);
      const double ls = hooks.logdet_s2(lam);
      if (!std::isfinite(ls)) {
        ok = false;
        continue;
      }
      const spectrum::BoundBudget budget{-spectrum::log_star_omega(lam) + 1e-9, -ls + 1e-9};
      try {
        const auto rep = spectrum::check_bounds(lam, budget);
        ok = ok && rep.all_passed();
        worst = std::min({worst, rep.sum_squares.worst_slack, rep.pair_product.worst_slack,
                          rep.pair_separate.worst_slack});
      } catch (const Error&) {
        ok = false;
      }
    }
  Result r = make("bound_chain", 0.0, 0.0, count, ok);
  char buf[64];
  std::snprintf(buf, sizeof buf, "min slack %.3g", worst);
  r.detail = buf;
  r.worst = worst;
  return r;
}

}  // namespace

Hooks default_hooks() {
  return {[](std::span<const double> l) { return spectrum::logdet_s2(l); },
          [](std::span<const double> l) { return spectrum::logdet_p2(l); }};
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      {"eigen_sym", "Jacobi eigensystems: orthogonality and reconstruction, n = 2..4", eigen_check},
      {"s_first_principles", "S from J, pi1, pi2 on random frames vs diag(l/(1+l^2))", s_check},
      {"p_first_principles", "P from pi1, pi2 on random frames vs diag((1-l^2)/(1+l^2))", p_check},
      {"logdet_s2_product", "log det of the assembled S pair matrix vs logdet_s2", s2_check},
      {"logdet_p2_product", "log det of the assembled P pair matrix vs logdet_p2", p2_check},
      {"lewy_rotation", "two-convex tuples rotate to area-decreasing ones; round trip", lewy_check},
      {"a2_curve_closed_form", "n = 1 |A|^2 vs squared curvature of the graph", n1_check},
      {"a2_immersion_jet", "|A|^2 by frame projection vs inverse-metric contraction", jet_check},
      {"a2_coordinate_invariance", "|A|^2 under orthogonal changes of coordinates", invariance_check},
      {"a2_immersion_grid", "grid immersion vs stencil |A|^2, second-order gap", immersion_grid_check},
      {"theta_gradient", "d theta vs g^ij u_ijk, second-order residual", theta_check},
      {"stencil_order", "Hessian and third-derivative stencils, second-order decay", stencil_check},
      {"bound_chain", "budget chain from log *Omega and logdet_s2 bounds", bound_chain_check},
  };
  return all;
}

std::vector<Result> run_all(const Hooks& hooks) {
  std::vector<Result> out;
  for (const auto& c : checks()) {
    try {
      out.push_back(c.run(hooks));
    } catch (const std::exception& e) {
      Result r;
      r.name = c.name;
      r.detail = std::string("threw: ") + e.what();
      out.push_back(r);
    }
  }
  return out;
}

int verify(std::ostream& out, bool list_only, const Hooks& hooks) {
  char line[256];
  if (list_only) {
    for (const auto& c : checks()) {
      std::snprintf(line, sizeof line, "%-26s %s\n", c.name.c_str(), c.description.c_str());
      out << line;
    }
    return 0;
  }
  bool all = true;
  for (const auto& r : run_all(hooks)) {
    all = all && r.passed;
    std::snprintf(line, sizeof line, "%-4s %-26s worst=%-11.4g tol=%-9.3g n=%-6ld %s\n", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.worst, r.tolerance, r.samples, r.detail.c_str());
    out << line;
  }
  return all ? 0 : 1;
}

}  // namespace lagflow::oracles
