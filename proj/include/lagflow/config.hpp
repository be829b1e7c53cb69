#pragma once

#include <iosfwd>
#include <string>

#include "lagflow/flavor.hpp"
#include "lagflow/flow.hpp"
#include "lagflow/monitors.hpp"
#include "lagflow/scenarios.hpp"

namespace lagflow {

struct OutputSpec {
  std::string csv_path;           // empty: no CSV
  double sample_interval = 0.05;  // flow time between diagnostic rows
  int snapshot_cadence = 0;       // field snapshot every k-th row; 0 = none
  std::string snapshot_dir;
  std::string json_summary_path;  // empty: no summary
};

struct RunConfig {
  int n = 2;
  int points_per_axis = 64;
  scenarios::Recipe recipe;
  flow::IntegratorSpec integrator;
  Flavor flavor = Flavor::two_convex;
  OutputSpec output;
  monitors::Tolerances tolerances;
};

// Throws ConfigError on any invalid field.
void validate(const RunConfig& config);

RunConfig config_from_preset(std::string_view name);

// Flat "key = value" text, '#' starts a comment. Keys are dotted, e.g.
// integrator.cfl = 0.5. A "preset = NAME" line seeds every field from that
// preset before the remaining keys are applied, regardless of line order.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

}  // namespace lagflow
