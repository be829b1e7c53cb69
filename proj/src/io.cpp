#include "lagflow/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <limits>
#include <ostream>

#include "lagflow/errors.hpp"
#include "lagflow/real_format.hpp"

namespace lagflow {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_real(std::string_view text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x))
    throw ConfigError("malformed real '" + s + "'");
  return x;
}

}  // namespace lagflow

namespace lagflow::io {

namespace {

using nlohmann::json;

std::array<double, 13> csv_values(const monitors::DiagnosticsRow& r) {
  return {r.t,
          r.min_logdet_s2,
          r.min_log_star_omega,
          r.min_logdet_p2,
          r.max_a2,
          r.sum_sq_max,
          r.min_pair_sum,
          r.min_one_plus_prod,
          r.min_one_minus_sqprod,
          r.min_three_plus_twoprod,
          r.theta_osc,
          r.hess_sup,
          r.angle_residual};
}

json real(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

double real(const json& j) {
  if (j.is_string()) return parse_real(j.get<std::string>());
  return j.get<double>();
}

json optional_real(const std::optional<double>& x) { return x ? real(*x) : json(nullptr); }

std::optional<double> optional_real(const json& j) {
  if (j.is_null()) return std::nullopt;
  return real(j);
}

monitors::Quantity quantity_from(std::string_view s) {
  for (auto q : {monitors::Quantity::logdet_s2, monitors::Quantity::log_star_omega, monitors::Quantity::logdet_p2})
    if (monitors::name(q) == s) return q;
  throw ConfigError("unknown quantity '" + std::string(s) + "'");
}

json violations_json(const std::vector<monitors::Violation>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back({real(v.t), real(v.magnitude)});
  return arr;
}

std::vector<monitors::Violation> violations_from(const json& arr) {
  std::vector<monitors::Violation> out;
  for (const auto& v : arr) out.push_back({real(v.at(0)), real(v.at(1))});
  return out;
}

json row_json(const monitors::DiagnosticsRow& r) {
  json j = json::object();
  const auto values = csv_values(r);
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) j[std::string(kCsvColumns[i])] = real(values[i]);
  j["argmin_logdet_s2"] = r.argmin_logdet_s2;
  j["argmin_log_star_omega"] = r.argmin_log_star_omega;
  j["argmin_logdet_p2"] = r.argmin_logdet_p2;
  j["a2_at_argmin_s2"] = real(r.a2_at_argmin_s2);
  j["a2_at_argmin_p2"] = real(r.a2_at_argmin_p2);
  return j;
}

monitors::DiagnosticsRow row_from(const json& j) {
  monitors::DiagnosticsRow r;
  double* fields[] = {&r.t,
                      &r.min_logdet_s2,
                      &r.min_log_star_omega,
                      &r.min_logdet_p2,
                      &r.max_a2,
                      &r.sum_sq_max,
                      &r.min_pair_sum,
                      &r.min_one_plus_prod,
                      &r.min_one_minus_sqprod,
                      &r.min_three_plus_twoprod,
                      &r.theta_osc,
                      &r.hess_sup,
                      &r.angle_residual};
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) *fields[i] = real(j.at(std::string(kCsvColumns[i])));
  r.argmin_logdet_s2 = j.at("argmin_logdet_s2").get<std::size_t>();
  r.argmin_log_star_omega = j.at("argmin_log_star_omega").get<std::size_t>();
  r.argmin_logdet_p2 = j.at("argmin_logdet_p2").get<std::size_t>();
  r.a2_at_argmin_s2 = real(j.at("a2_at_argmin_s2"));
  r.a2_at_argmin_p2 = real(j.at("a2_at_argmin_p2"));
  return r;
}

// Bitwise equality, so nan == nan and -0.0 != 0.0 do not hide round-trip loss.
bool same(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0 || (std::isnan(a) && std::isnan(b)); }

bool same_rows(const monitors::DiagnosticsRow& a, const monitors::DiagnosticsRow& b) {
  const auto va = csv_values(a), vb = csv_values(b);
  for (std::size_t i = 0; i < va.size(); ++i)
    if (!same(va[i], vb[i])) return false;
  return a.argmin_logdet_s2 == b.argmin_logdet_s2 && a.argmin_log_star_omega == b.argmin_log_star_omega &&
         a.argmin_logdet_p2 == b.argmin_logdet_p2 && same(a.a2_at_argmin_s2, b.a2_at_argmin_s2) &&
         same(a.a2_at_argmin_p2, b.a2_at_argmin_p2);
}

bool same_violations(const std::vector<monitors::Violation>& a, const std::vector<monitors::Violation>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i].t, b[i].t) || !same(a[i].magnitude, b[i].magnitude)) return false;
  return true;
}

bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
  return a.has_value() == b.has_value() && (!a || same(*a, *b));
}

}  // namespace

void write_csv_header(std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const monitors::DiagnosticsRow& row) {
  const auto values = csv_values(row);
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_real(values[i]);
  out << '\n';
}

RunSummary summarize(const flow::FlowTrajectory& traj, const RunConfig& config) {
  using monitors::Quantity;
  RunSummary s;
  s.status = std::string(flow::to_string(traj.status));
  s.flavor = std::string(to_string(config.flavor));
  s.t_final = traj.final_state.field.t;
  s.steps = traj.final_state.step_index;
  s.dt = traj.dt;
  s.margin_warning_t = traj.margin_warning_t;
  if (traj.status == flow::Status::converged && !traj.rows.empty()) s.convergence_time = traj.rows.back().t;
  if (!traj.rows.empty()) s.final_row = traj.rows.back();

  const Quantity tracked = config.flavor == Flavor::two_convex ? Quantity::logdet_s2 : Quantity::logdet_p2;
  const double slack = config.tolerances.slack_mono;
  s.monotonicity.push_back(monitors::check_monotone(traj.rows, tracked, slack));
  s.monotonicity.push_back(monitors::check_monotone(traj.rows, Quantity::log_star_omega, slack));
  const double tol = config.tolerances.tol_growth >= 0.0
                         ? config.tolerances.tol_growth
                         : monitors::default_growth_tol(traj.final_state.field.grid.spacing());
  s.growth = monitors::check_growth_bound(traj.rows, tracked, tol);

  bool checks_pass = s.growth.passed;
  for (const auto& m : s.monotonicity) checks_pass = checks_pass && m.passed;
  switch (traj.status) {
    case flow::Status::converged:
    case flow::Status::t_end:
      s.exit_code = checks_pass ? kExitOk : kExitVerificationFailed;
      break;
    case flow::Status::region_exit:
      s.exit_code = kExitRegionExit;
      break;
    case flow::Status::nan_blowup:
      s.exit_code = kExitNanBlowup;
      break;
    case flow::Status::max_steps:
    case flow::Status::running:
      s.exit_code = kExitMaxSteps;
      break;
  }
  return s;
}

std::string summary_to_json(const RunSummary& s) {
  json j;
  j["status"] = s.status;
  j["exit_code"] = s.exit_code;
  j["flavor"] = s.flavor;
  j["t_final"] = real(s.t_final);
  j["steps"] = s.steps;
  j["dt"] = real(s.dt);
  j["convergence_time"] = optional_real(s.convergence_time);
  j["margin_warning_t"] = optional_real(s.margin_warning_t);
  json mono = json::array();
  for (const auto& m : s.monotonicity) {
    mono.push_back({{"quantity", std::string(monitors::name(m.quantity))},
                    {"passed", m.passed},
                    {"worst_drop", real(m.worst_drop)},
                    {"slack", real(m.slack)},
                    {"violations", violations_json(m.violations)}});
  }
  j["monotonicity"] = mono;
  j["growth_bound"] = {{"quantity", std::string(monitors::name(s.growth.quantity))},
                       {"passed", s.growth.passed},
                       {"worst_deficit", real(s.growth.worst_deficit)},
                       {"tol", real(s.growth.tol)},
                       {"pairs_checked", s.growth.pairs_checked},
                       {"violations", violations_json(s.growth.violations)}};
  j["final_row"] = row_json(s.final_row);
  return j.dump(2) + "\n";
}

RunSummary summary_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunSummary s;
    s.status = j.at("status").get<std::string>();
    s.exit_code = j.at("exit_code").get<int>();
    s.flavor = j.at("flavor").get<std::string>();
    s.t_final = real(j.at("t_final"));
    s.steps = j.at("steps").get<std::int64_t>();
    s.dt = real(j.at("dt"));
    s.convergence_time = optional_real(j.at("convergence_time"));
    s.margin_warning_t = optional_real(j.at("margin_warning_t"));
    for (const auto& m : j.at("monotonicity")) {
      monitors::MonotonicityReport r;
      r.quantity = quantity_from(m.at("quantity").get<std::string>());
      r.passed = m.at("passed").get<bool>();
      r.worst_drop = real(m.at("worst_drop"));
      r.slack = real(m.at("slack"));
      r.violations = violations_from(m.at("violations"));
      s.monotonicity.push_back(std::move(r));
    }
    const json& g = j.at("growth_bound");
    s.growth.quantity = quantity_from(g.at("quantity").get<std::string>());
    s.growth.passed = g.at("passed").get<bool>();
    s.growth.worst_deficit = real(g.at("worst_deficit"));
    s.growth.tol = real(g.at("tol"));
    s.growth.pairs_checked = g.at("pairs_checked").get<std::size_t>();
    s.growth.violations = violations_from(g.at("violations"));
    s.final_row = row_from(j.at("final_row"));
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed summary JSON: ") + e.what());
  }
}

bool operator==(const RunSummary& a, const RunSummary& b) {
  if (a.status != b.status || a.exit_code != b.exit_code || a.flavor != b.flavor || !same(a.t_final, b.t_final) ||
      a.steps != b.steps || !same(a.dt, b.dt) || !same_opt(a.convergence_time, b.convergence_time) ||
      !same_opt(a.margin_warning_t, b.margin_warning_t) || a.monotonicity.size() != b.monotonicity.size())
    return false;
  for (std::size_t i = 0; i < a.monotonicity.size(); ++i) {
    const auto &x = a.monotonicity[i], &y = b.monotonicity[i];
    if (x.quantity != y.quantity || x.passed != y.passed || !same(x.worst_drop, y.worst_drop) ||
        !same(x.slack, y.slack) || !same_violations(x.violations, y.violations))
      return false;
  }
  const auto &g = a.growth, &h = b.growth;
  return g.quantity == h.quantity && g.passed == h.passed && same(g.worst_deficit, h.worst_deficit) &&
         same(g.tol, h.tol) && g.pairs_checked == h.pairs_checked && same_violations(g.violations, h.violations) &&
         same_rows(a.final_row, b.final_row);
}

}  // namespace lagflow::io
