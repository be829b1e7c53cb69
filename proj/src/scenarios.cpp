#include "lagflow/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lagflow/errors.hpp"
#include "lagflow/parallel.hpp"
#include "lagflow/spectrum.hpp"

namespace lagflow {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int SplitMix64::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(next() % span);
}

std::string_view to_string(Flavor f) { return f == Flavor::two_convex ? "two_convex" : "area_decreasing"; }

Flavor parse_flavor(std::string_view s) {
  if (s == "two_convex") return Flavor::two_convex;
  if (s == "area_decreasing") return Flavor::area_decreasing;
  throw ConfigError("unknown flavor '" + std::string(s) + "'");
}

}  // namespace lagflow

namespace lagflow::scenarios {

namespace {

constexpr double kShrink = 0.8;

SymMatrix quadratic_part(const Recipe& recipe, int n) {
  if (recipe.A.empty()) return SymMatrix(n);
  return SymMatrix::from_row_major(n, recipe.A);
}

double mode_value(const Mode& m, const Grid& grid, const std::array<int, kMaxDim>& cell) {
  double phase = m.phase;
  for (int a = 0; a < grid.dim(); ++a)
    phase += m.k[static_cast<std::size_t>(a)] * grid.coordinate(cell[static_cast<std::size_t>(a)]);
  return m.amplitude * std::cos(phase);
}

void fill_modes(PotentialField& f, const std::vector<Mode>& modes) {
  std::fill(f.v.begin(), f.v.end(), 0.0);
  for (std::size_t p = 0; p < f.v.size(); ++p) {
    const auto cell = f.grid.coords(p);
    for (const Mode& m : modes) f.v[p] += mode_value(m, f.grid, cell);
  }
  remove_mean(f);
  f.phase = 0.0;
}

double tuple_margin(std::span<const double> lambdas, Region region) {
  const spectrum::PairMargins m = spectrum::pair_margins(lambdas);
  switch (region) {
    case Region::two_convex:
      return std::min(m.min_pair_sum, m.min_one_plus_prod);
    case Region::area_decreasing:
      return m.min_one_minus_sqprod;
    case Region::none:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

// Random orthogonal matrix as a product of Givens rotations over all pairs.
std::array<double, kMaxDim * kMaxDim> random_rotation(SplitMix64& rng, int n) {
  std::array<double, kMaxDim * kMaxDim> q{};
  for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i * kMaxDim + i)] = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double c = std::cos(ang), s = std::sin(ang);
      for (int r = 0; r < n; ++r) {
        double& qi = q[static_cast<std::size_t>(r * kMaxDim + i)];
        double& qj = q[static_cast<std::size_t>(r * kMaxDim + j)];
        const double a = qi, b = qj;
        qi = c * a - s * b;
        qj = s * a + c * b;
      }
    }
  }
  return q;
}

SymMatrix random_quadratic(SplitMix64& rng, int n, Region region, double margin) {
  double lo = -0.4, hi = 1.4;
  if (region == Region::area_decreasing) lo = -0.8, hi = 0.8;
  if (region == Region::none) lo = -1.0, hi = 1.0;
  EigenTuple mu(n);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 100000) throw GenerationFailed("could not draw a quadratic part inside the region");
    for (int i = 0; i < n; ++i) mu[i] = rng.uniform(lo, hi);
    if (tuple_margin(mu, region) >= 2.0 * margin) break;
  }
  const auto q = random_rotation(rng, n);
  SymMatrix A(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += q[static_cast<std::size_t>(i * kMaxDim + k)] * mu[k] * q[static_cast<std::size_t>(j * kMaxDim + k)];
      A.set(i, j, s);
    }
  return A;
}

std::vector<Mode> random_modes(SplitMix64& rng, const Recipe& recipe, int n) {
  std::vector<Mode> modes;
  for (int m = 0; m < recipe.random_modes; ++m) {
    Mode mode;
    int k2 = 0;
    while (k2 == 0) {
      k2 = 0;
      for (int a = 0; a < n; ++a) {
        const int k = rng.integer(-recipe.max_wavenumber, recipe.max_wavenumber);
        mode.k[static_cast<std::size_t>(a)] = k;
        k2 += k * k;
      }
    }
    // Hessian of a mode scales like amplitude |k|^2.
    mode.amplitude = recipe.amplitude * rng.uniform(-1.0, 1.0) / k2;
    mode.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    modes.push_back(mode);
  }
  return modes;
}

}  // namespace

void validate(const Recipe& recipe, int n) {
  if (!(recipe.margin > 0.0) || !std::isfinite(recipe.margin)) throw ConfigError("recipe margin must be positive");
  if (recipe.max_rejects < 0) throw ConfigError("max_rejects must be >= 0");
  if (!recipe.A.empty() && recipe.A.size() != static_cast<std::size_t>(n * n))
    throw ConfigError("recipe A must have n*n entries");
  for (const Mode& m : recipe.modes) {
    if (!std::isfinite(m.amplitude) || !std::isfinite(m.phase)) throw ConfigError("mode amplitude/phase must be finite");
  }
  if (recipe.kind == RecipeKind::random_region) {
    if (recipe.random_modes < 0 || recipe.max_wavenumber < 1 || !std::isfinite(recipe.amplitude))
      throw ConfigError("random_region needs random_modes >= 0, max_wavenumber >= 1, finite amplitude");
  }
}

double region_margin(const PotentialField& field, Region region) {
  if (region == Region::none || field.dim() < 2) return std::numeric_limits<double>::infinity();
  const std::size_t count = field.grid.size();
  std::vector<double> margins(count);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) margins[p] = tuple_margin(eigenvalues_sym(hessian_at(field, p)), region);
  });
  return *std::min_element(margins.begin(), margins.end());
}

PotentialField generate(const Recipe& recipe, int n, int points_per_axis) {
  static_cast<void>(Grid(n, points_per_axis));  // validates n and N
  validate(recipe, n);
  SplitMix64 rng(recipe.seed);

  SymMatrix A = quadratic_part(recipe, n);
  std::vector<Mode> modes;
  switch (recipe.kind) {
    case RecipeKind::zero:
      A = SymMatrix(n);
      break;
    case RecipeKind::quadratic:
      break;
    case RecipeKind::modes:
      modes = recipe.modes;
      break;
    case RecipeKind::random_region:
      if (recipe.random_quadratic) A = random_quadratic(rng, n, recipe.region, recipe.margin);
      modes = random_modes(rng, recipe, n);
      break;
  }

  PotentialField f = make_field(n, points_per_axis, A);
  fill_modes(f, modes);
  if (recipe.region == Region::none || recipe.kind == RecipeKind::zero) return f;

  {
    PotentialField flat = make_field(n, points_per_axis, A);
    if (region_margin(flat, recipe.region) < recipe.margin)
      throw GenerationFailed("quadratic part alone violates the region margin; no amplitude rescaling can succeed");
  }
  for (int rejects = 0; region_margin(f, recipe.region) < recipe.margin; ++rejects) {
    if (rejects >= recipe.max_rejects) throw GenerationFailed("max_rejects exceeded before meeting the region margin");
    for (Mode& m : modes) m.amplitude *= kShrink;
    fill_modes(f, modes);
  }
  return f;
}

std::vector<std::string> list_presets() {
  return {"zero", "quad-identity", "tc-small", "tc-aniso", "ad-small", "heat-1d"};
}

Preset preset(std::string_view name) {
  Preset p;
  p.name = std::string(name);
  Recipe& r = p.recipe;
  if (name == "zero") {
    r.kind = RecipeKind::zero;
    p.flavor = Flavor::area_decreasing;
  } else if (name == "quad-identity") {
    r.kind = RecipeKind::quadratic;
    r.A = {1, 0, 0, 1};
  } else if (name == "tc-small") {
    r.kind = RecipeKind::modes;
    r.A = {1, 0, 0, 1};
    r.modes = {Mode{{1, 0}, 0.2, 0.0}};
    r.region = Region::two_convex;
    r.margin = 0.1;
  } else if (name == "tc-aniso") {
    // Not convex anywhere (lambda ~ -0.3) yet two-convex everywhere.
    r.kind = RecipeKind::modes;
    r.A = {2, 0, 0, -0.3};
    r.modes = {Mode{{0, 1}, 0.05, 0.0}, Mode{{1, 1}, 0.02, 0.5}};
    r.region = Region::two_convex;
    r.margin = 0.1;
  } else if (name == "ad-small") {
    p.points_per_axis = 32;
    r.kind = RecipeKind::modes;
    r.modes = {Mode{{1, 0}, 0.3, 0.0}, Mode{{0, 1}, 0.3, 0.0}};
    r.region = Region::area_decreasing;
    r.margin = 0.5;
    p.flavor = Flavor::area_decreasing;
  } else if (name == "heat-1d") {
    p.n = 1;
    r.kind = RecipeKind::modes;
    r.modes = {Mode{{1}, 1e-3, 0.0}};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::string_view to_string(RecipeKind k) {
  switch (k) {
    case RecipeKind::zero:
      return "zero";
    case RecipeKind::quadratic:
      return "quadratic";
    case RecipeKind::modes:
      return "modes";
    case RecipeKind::random_region:
      return "random_region";
  }
  return "?";
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::none:
      return "none";
    case Region::two_convex:
      return "two_convex";
    case Region::area_decreasing:
      return "area_decreasing";
  }
  return "?";
}

RecipeKind parse_recipe_kind(std::string_view s) {
  for (RecipeKind k : {RecipeKind::zero, RecipeKind::quadratic, RecipeKind::modes, RecipeKind::random_region})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown recipe kind '" + std::string(s) + "'");
}

Region parse_region(std::string_view s) {
  for (Region r : {Region::none, Region::two_convex, Region::area_decreasing})
    if (s == to_string(r)) return r;
  throw ConfigError("unknown region '" + std::string(s) + "'");
}

}  // namespace lagflow::scenarios
