#include "lagflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lagflow/errors.hpp"
#include "lagflow/real_format.hpp"

namespace lagflow {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  return value;
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    return parse_real(text);
  } catch (const ConfigError&) {
    throw ConfigError("key '" + key + "': expected a real number, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + text + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& text) {
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_number(key, tok));
  return out;
}

// "k1 k2 ... : amplitude : phase" entries separated by ';'.
std::vector<scenarios::Mode> parse_modes(const std::string& key, const std::string& text) {
  std::vector<scenarios::Mode> modes;
  std::istringstream entries(text);
  std::string entry;
  while (std::getline(entries, entry, ';')) {
    entry = trim(entry);
    if (entry.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream fields(entry);
    std::string part;
    while (std::getline(fields, part, ':')) parts.push_back(trim(part));
    if (parts.size() < 2 || parts.size() > 3)
      throw ConfigError("key '" + key + "': mode must be 'k1,k2,...:amplitude[:phase]', got '" + entry + "'");
    scenarios::Mode m;
    const std::vector<double> k = parse_reals(key, parts[0]);
    if (k.empty() || k.size() > kMaxDim) throw ConfigError("key '" + key + "': bad wavevector '" + parts[0] + "'");
    for (std::size_t a = 0; a < k.size(); ++a) {
      if (k[a] != std::round(k[a])) throw ConfigError("key '" + key + "': wavevector entries must be integers");
      m.k[a] = static_cast<int>(k[a]);
    }
    m.amplitude = parse_number(key, parts[1]);
    if (parts.size() == 3) m.phase = parse_number(key, parts[2]);
    modes.push_back(m);
  }
  return modes;
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  auto& r = c.recipe;
  auto& in = c.integrator;
  auto& out = c.output;
  auto& tol = c.tolerances;
  if (key == "n") c.n = parse_int<int>(key, value);
  else if (key == "N") c.points_per_axis = parse_int<int>(key, value);
  else if (key == "flavor") c.flavor = parse_flavor(value);
  else if (key == "recipe.kind") r.kind = scenarios::parse_recipe_kind(value);
  else if (key == "recipe.A") r.A = parse_reals(key, value);
  else if (key == "recipe.modes") r.modes = parse_modes(key, value);
  else if (key == "recipe.region") r.region = scenarios::parse_region(value);
  else if (key == "recipe.margin") r.margin = parse_number(key, value);
  else if (key == "recipe.seed") r.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "recipe.max_rejects") r.max_rejects = parse_int<int>(key, value);
  else if (key == "recipe.random_modes") r.random_modes = parse_int<int>(key, value);
  else if (key == "recipe.max_wavenumber") r.max_wavenumber = parse_int<int>(key, value);
  else if (key == "recipe.amplitude") r.amplitude = parse_number(key, value);
  else if (key == "recipe.random_quadratic") r.random_quadratic = parse_bool(key, value);
  else if (key == "integrator.scheme") in.scheme = flow::parse_scheme(value);
  else if (key == "integrator.cfl") in.cfl = parse_number(key, value);
  else if (key == "integrator.max_steps") in.max_steps = parse_int<std::int64_t>(key, value);
  else if (key == "integrator.t_end") in.t_end = parse_number(key, value);
  else if (key == "output.csv_path") out.csv_path = value;
  else if (key == "output.sample_interval") out.sample_interval = parse_number(key, value);
  else if (key == "output.snapshot_cadence") out.snapshot_cadence = parse_int<int>(key, value);
  else if (key == "output.snapshot_dir") out.snapshot_dir = value;
  else if (key == "output.json_summary_path") out.json_summary_path = value;
  else if (key == "tolerances.slack_mono") tol.slack_mono = parse_number(key, value);
  else if (key == "tolerances.tol_growth") tol.tol_growth = parse_number(key, value);
  else if (key == "tolerances.tol_a2") tol.tol_a2 = parse_number(key, value);
  else if (key == "tolerances.tol_hess") tol.tol_hess = parse_number(key, value);
  else if (key == "tolerances.tol_theta") tol.tol_theta = parse_number(key, value);
  else if (key == "tolerances.warn_margin") tol.warn_margin = parse_number(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

void validate(const RunConfig& c) {
  static_cast<void>(Grid(c.n, c.points_per_axis));
  scenarios::validate(c.recipe, c.n);
  flow::validate(c.integrator);
  if (!(c.output.sample_interval > 0.0) || !std::isfinite(c.output.sample_interval))
    throw ConfigError("output.sample_interval must be positive");
  if (c.output.snapshot_cadence < 0) throw ConfigError("output.snapshot_cadence must be >= 0");
  if (c.output.snapshot_cadence > 0 && c.output.snapshot_dir.empty())
    throw ConfigError("output.snapshot_dir is required when snapshot_cadence > 0");
  for (const auto& m : c.recipe.modes)
    for (int a = c.n; a < kMaxDim; ++a)
      if (m.k[static_cast<std::size_t>(a)] != 0) throw ConfigError("mode wavevector has more components than n");
  const auto& t = c.tolerances;
  for (double x : {t.slack_mono, t.tol_a2, t.tol_hess, t.tol_theta, t.warn_margin})
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("tolerances must be finite and >= 0");
  if (std::isnan(t.tol_growth)) throw ConfigError("tolerances.tol_growth must be a number");
}

RunConfig config_from_preset(std::string_view name) {
  const scenarios::Preset p = scenarios::preset(name);
  RunConfig c;
  c.n = p.n;
  c.points_per_axis = p.points_per_axis;
  c.recipe = p.recipe;
  c.flavor = p.flavor;
  return c;
}

RunConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string preset_name;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (key == "preset") {
      preset_name = value;
    } else {
      entries.emplace_back(std::move(key), std::move(value));
    }
  }
  RunConfig c = preset_name.empty() ? RunConfig{} : config_from_preset(preset_name);
  for (const auto& [key, value] : entries) apply(c, key, value);
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace lagflow
