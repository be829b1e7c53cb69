#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lagflow/field.hpp"
#include "lagflow/flavor.hpp"
#include "lagflow/sym_matrix.hpp"

namespace lagflow {

// splitmix64: state += 0x9E3779B97F4A7C15; z = state;
// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
// return z ^ (z >> 31). Doubles take the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();                         // [0, 1)
  double uniform(double lo, double hi);     // [lo, hi)
  int integer(int lo, int hi);              // inclusive range

 private:
  std::uint64_t state_;
};

}  // namespace lagflow

namespace lagflow::scenarios {

enum class RecipeKind { zero, quadratic, modes, random_region };
enum class Region { none, two_convex, area_decreasing };

// amplitude * cos(k . x + phase)
struct Mode {
  std::array<int, kMaxDim> k{};
  double amplitude = 0.0;
  double phase = 0.0;
};

struct Recipe {
  RecipeKind kind = RecipeKind::zero;
  std::vector<double> A;  // row-major n*n; empty means zero
  std::vector<Mode> modes;
  Region region = Region::none;
  double margin = 0.1;
  std::uint64_t seed = 0;
  int max_rejects = 10000;

  // random_region only
  int random_modes = 4;
  int max_wavenumber = 2;
  double amplitude = 0.2;        // bound on the Hessian size of each random mode
  bool random_quadratic = false; // draw A inside the region instead of using A above
};

// Throws ConfigError on malformed recipes (non-finite amplitudes, margin <= 0, ...).
void validate(const Recipe& recipe, int n);

// Builds the field; for region != none every grid point meets the region with
// the requested margin. Amplitudes shrink by 0.8 per rejected attempt; throws
// GenerationFailed after max_rejects.
PotentialField generate(const Recipe& recipe, int n, int points_per_axis);

// Worst region margin over the grid (+inf for Region::none or n == 1).
double region_margin(const PotentialField& field, Region region);

struct Preset {
  std::string name;
  int n = 2;
  int points_per_axis = 64;
  Recipe recipe;
  Flavor flavor = Flavor::two_convex;
};

// zero, quad-identity, tc-small, tc-aniso, ad-small, heat-1d.
std::vector<std::string> list_presets();
// Throws ConfigError for unknown names.
Preset preset(std::string_view name);

std::string_view to_string(RecipeKind k);
std::string_view to_string(Region r);
RecipeKind parse_recipe_kind(std::string_view s);
Region parse_region(std::string_view s);

}  // namespace lagflow::scenarios
