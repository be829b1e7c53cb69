#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

// Independent checks of the closed forms and the finite-difference stencils.
namespace lagflow::oracles {

using ScalarFn = std::function<double(std::span<const double>)>;

// The closed forms under test; swapped out by mutation tests.
struct Hooks {
  ScalarFn logdet_s2;
  ScalarFn logdet_p2;
};

Hooks default_hooks();

struct Result {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest observed error (or ratio, for order checks)
  double tolerance = 0.0;
  long samples = 0;
  std::string detail;
};

struct Check {
  std::string name;
  std::string description;
  std::function<Result(const Hooks&)> run;
};

const std::vector<Check>& checks();

std::vector<Result> run_all(const Hooks& hooks);

// `verify`: prints the check list, or runs everything and prints one line per
// check. Returns 0 on all-pass, 1 otherwise.
int verify(std::ostream& out, bool list_only, const Hooks& hooks);

}  // namespace lagflow::oracles
