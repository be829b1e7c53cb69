#include <doctest.h>

#include <cmath>
#include <limits>

#include "lagflow/errors.hpp"
#include "lagflow/scenarios.hpp"
#include "lagflow/spectrum.hpp"

using namespace lagflow;
using namespace lagflow::scenarios;
using doctest::Approx;

TEST_CASE("SplitMix64 reference sequence") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next() == 0x06C45D188009454Full);
  SplitMix64 other(12345);
  CHECK(other.uniform() == 0.1330796686614273);
}

TEST_CASE("SplitMix64 ranges") {
  SplitMix64 rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.0, 3.0);
    REQUIRE(u >= -2.0);
    REQUIRE(u < 3.0);
    const int k = rng.integer(-2, 2);
    REQUIRE(k >= -2);
    REQUIRE(k <= 2);
  }
}

TEST_CASE("presets") {
  const auto names = list_presets();
  CHECK(names.size() == 6);
  for (const auto& n : names) {
    const Preset p = preset(n);
    CHECK(p.name == n);
    const auto f = generate(p.recipe, p.n, p.points_per_axis);
    CHECK(f.dim() == p.n);
    if (p.recipe.region != Region::none) CHECK(region_margin(f, p.recipe.region) >= p.recipe.margin);
  }
  CHECK_THROWS_AS(preset("nope"), ConfigError);

  const Preset tc = preset("tc-aniso");
  const auto f = generate(tc.recipe, tc.n, tc.points_per_axis);
  bool convex_somewhere = false;
  for (std::size_t p = 0; p < f.grid.size(); ++p)
    convex_somewhere = convex_somewhere || spectrum::classify(eigenvalues_sym(hessian_at(f, p))).flags.convex;
  CHECK_FALSE(convex_somewhere);
}

TEST_CASE("mode recipe samples amplitude cos(k.x + phase)") {
  Recipe r;
  r.kind = RecipeKind::modes;
  r.modes = {Mode{{1, 2}, 0.5, 0.25}};
  const auto f = generate(r, 2, 16);
  for (std::size_t p = 0; p < f.grid.size(); p += 5) {
    const auto c = f.grid.coords(p);
    const double x = f.grid.coordinate(c[0]), y = f.grid.coordinate(c[1]);
    CHECK(f.v[p] == Approx(0.5 * std::cos(x + 2 * y + 0.25)).epsilon(1e-12).scale(1.0));
  }
  CHECK(f.t == 0.0);
  CHECK(f.phase == Approx(0.0).scale(1.0));
}

TEST_CASE("random region recipes meet the margin and are reproducible") {
  for (auto region : {Region::two_convex, Region::area_decreasing}) {
    for (int n = 2; n <= 3; ++n) {
      Recipe r;
      r.kind = RecipeKind::random_region;
      r.region = region;
      r.margin = 0.2;
      r.random_quadratic = true;
      r.seed = 77 + static_cast<std::uint64_t>(n);
      const auto a = generate(r, n, 16);
      const auto b = generate(r, n, 16);
      CHECK(a.v == b.v);
      CHECK(a.A == b.A);
      CHECK(region_margin(a, region) >= 0.2);
      r.seed += 1000;
      CHECK(generate(r, n, 16).v != a.v);
    }
  }
}

TEST_CASE("generation failures") {
  Recipe r;
  r.kind = RecipeKind::modes;
  r.A = {-1, 0, 0, -1};
  r.modes = {Mode{{1, 0}, 0.1, 0.0}};
  r.region = Region::two_convex;
  CHECK_THROWS_AS(generate(r, 2, 16), GenerationFailed);

  // Rescaling could succeed, but the reject budget is empty.
  Recipe big;
  big.kind = RecipeKind::modes;
  big.A = {1, 0, 0, 1};
  big.modes = {Mode{{1, 0}, 5.0, 0.0}};
  big.region = Region::two_convex;
  big.max_rejects = 0;
  CHECK_THROWS_AS(generate(big, 2, 16), GenerationFailed);
  big.max_rejects = 100;
  CHECK(region_margin(generate(big, 2, 16), Region::two_convex) >= big.margin);
}

TEST_CASE("recipe validation") {
  Recipe r;
  r.margin = 0.0;
  CHECK_THROWS_AS(validate(r, 2), ConfigError);
  r = {};
  r.A = {1, 0, 0};
  CHECK_THROWS_AS(validate(r, 2), ConfigError);
  r = {};
  r.modes = {Mode{{1, 0}, std::numeric_limits<double>::infinity(), 0.0}};
  CHECK_THROWS_AS(validate(r, 2), ConfigError);
  CHECK_THROWS_AS(generate(Recipe{}, 2, 8), ConfigError);
  CHECK_THROWS_AS(generate(Recipe{}, 5, 16), ConfigError);
}

TEST_CASE("enum names round trip") {
  for (auto k : {RecipeKind::zero, RecipeKind::quadratic, RecipeKind::modes, RecipeKind::random_region})
    CHECK(parse_recipe_kind(to_string(k)) == k);
  for (auto g : {Region::none, Region::two_convex, Region::area_decreasing}) CHECK(parse_region(to_string(g)) == g);
  CHECK(parse_flavor(to_string(Flavor::area_decreasing)) == Flavor::area_decreasing);
  CHECK_THROWS_AS(parse_region("convex"), ConfigError);
  CHECK_THROWS_AS(parse_flavor("convex"), ConfigError);
}
