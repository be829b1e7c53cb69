// lagflow: run the potential flow or the oracle suite.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lagflow/config.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/flow.hpp"
#include "lagflow/io.hpp"
#include "lagflow/oracles.hpp"
#include "lagflow/real_format.hpp"

namespace fs = std::filesystem;
using namespace lagflow;

namespace {

struct RunArgs {
  std::string config_path;
  std::string preset;
  std::optional<double> t_end;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

RunConfig resolve(const RunArgs& args) {
  RunConfig config;
  if (!args.config_path.empty())
    config = load_config(args.config_path);
  else
    config = config_from_preset(args.preset.empty() ? "tc-small" : args.preset);
  if (args.t_end) config.integrator.t_end = *args.t_end;
  if (args.seed) config.recipe.seed = *args.seed;
  if (!args.out_dir.empty()) {
    const fs::path out(args.out_dir);
    config.output.csv_path = (out / "diagnostics.csv").string();
    config.output.json_summary_path = (out / "summary.json").string();
    if (config.output.snapshot_cadence > 0) config.output.snapshot_dir = (out / "snapshots").string();
  }
  validate(config);
  return config;
}

int run_command(const RunArgs& args) {
  const RunConfig config = resolve(args);

  std::ofstream csv;
  if (!config.output.csv_path.empty()) {
    csv = open_output(config.output.csv_path);
    io::write_csv_header(csv);
  }
  if (!config.output.snapshot_dir.empty()) fs::create_directories(config.output.snapshot_dir);

  int snapshot_index = 0;
  const auto observer = [&](const flow::FlowState& state, const monitors::DiagnosticsRow& row, bool snap) {
    if (csv.is_open()) {
      io::write_csv_row(csv, row);
      csv.flush();
    }
    if (snap && !config.output.snapshot_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%06d.txt", snapshot_index++);
      std::ofstream out = open_output((fs::path(config.output.snapshot_dir) / name).string());
      write_snapshot(out, state.field);
    }
  };

  flow::FlowTrajectory traj = flow::run(config, observer);
  const io::RunSummary summary = io::summarize(traj, config);
  if (!config.output.json_summary_path.empty()) open_output(config.output.json_summary_path) << io::summary_to_json(summary);

  std::cout << "status " << summary.status << " t " << format_real(summary.t_final) << " steps " << summary.steps
            << " exit " << summary.exit_code << '\n';
  for (const auto& m : summary.monotonicity)
    std::cout << "monotone " << monitors::name(m.quantity) << ' ' << (m.passed ? "pass" : "FAIL") << " worst_drop "
              << format_real(m.worst_drop) << '\n';
  std::cout << "growth " << monitors::name(summary.growth.quantity) << ' ' << (summary.growth.passed ? "pass" : "FAIL")
            << " worst_deficit " << format_real(summary.growth.worst_deficit) << '\n';
  return summary.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lagrangian mean curvature flow of potentials on a flat torus"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "integrate the flow and write diagnostics");
  auto* config_opt = run->add_option("--config", run_args.config_path, "key = value config file");
  run->add_option("--preset", run_args.preset, "named preset")->excludes(config_opt);
  run->add_option("--t-end", run_args.t_end, "final flow time");
  run->add_option("--out", run_args.out_dir, "write diagnostics.csv, summary.json and snapshots/ here");
  run->add_option("--seed", run_args.seed, "recipe seed");

  bool oracles = false, list = false;
  auto* verify = app.add_subcommand("verify", "run the oracle suite");
  verify->add_flag("--oracles", oracles, "run the geometry and spectrum oracles (default)");
  verify->add_flag("--list", list, "list checks without running them");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lagflow: " << e.what() << '\n';
    return io::kExitConfigError;
  }

  try {
    if (*run) return run_command(run_args);
    return oracles::verify(std::cout, list, oracles::default_hooks());
  } catch (const ConfigError& e) {
    std::cerr << "lagflow: " << e.what() << '\n';
    return io::kExitConfigError;
  } catch (const GenerationFailed& e) {
    std::cerr << "lagflow: " << e.what() << '\n';
    return io::kExitConfigError;
  } catch (const NanBlowup& e) {
    std::cerr << "lagflow: " << e.what() << '\n';
    return io::kExitNanBlowup;
  } catch (const std::exception& e) {
    std::cerr << "lagflow: " << e.what() << '\n';
    return io::kExitVerificationFailed;
  }
}
