#pragma once

// Dataset emission shared by the command-line tool and the tests: scenario
// sweeps to CSV, the two bundled figure datasets, the audit report, config
// handling, and a quick self test.
//
// Output contract: CSV with '.' decimal point, '\n' line ends, values at 17
// significant digits, a '#'-prefixed header block carrying the artifact
// version, the resolved configuration, and per-column units. Undefined
// phases serialize as the literal token "undefined", never NaN. Identical
// config produces byte-identical files (nothing time- or path-dependent is
// written).

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pancharatnam/measures.hpp"
#include "pancharatnam/oracle.hpp"
#include "pancharatnam/phase.hpp"
#include "pancharatnam/random.hpp"
#include "pancharatnam/scenarios.hpp"

namespace pancharatnam {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// A requested single-point quantity came out undefined; sweeps instead
/// tokenize the affected cells.
struct UndefinedValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_cell(const std::optional<double>& v) {
  if (!v.has_value() || !std::isfinite(*v)) return "undefined";
  return format_value(*v);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct SweepRange {
  std::string key;
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
};

struct RunConfig {
  std::string scenario;
  std::map<std::string, double> params;
  std::optional<SweepRange> sweep;
  std::uint64_t seed = 0;
  double tail = 1e-12;
};

/// Flat key=value file: one pair per line, '#' starts a comment, blank lines
/// ignored.
inline std::map<std::string, std::string> parse_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config value for '" + key + "' is not a number: '" + value + "'");
  }
}

inline SweepRange parse_sweep_spec(const std::string& spec) {
  // key:start:stop:count, with key=start:stop:count accepted from the flag
  // syntax.
  std::string s = spec;
  const auto eq = s.find('=');
  if (eq != std::string::npos) s[eq] = ':';
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 4) throw ConfigError("malformed sweep spec '" + spec + "'");
  SweepRange r;
  r.key = parts[0];
  r.start = parse_number("sweep start", parts[1]);
  r.stop = parse_number("sweep stop", parts[2]);
  const double count = parse_number("sweep count", parts[3]);
  r.count = static_cast<int>(count);
  if (r.key.empty() || r.count < 1 || count != static_cast<double>(r.count))
    throw ConfigError("malformed sweep spec '" + spec + "'");
  return r;
}

}  // namespace detail

/// Builds a RunConfig from merged key=value pairs. Recognized keys: scenario,
/// seed, tail, sweep; anything else must be a numeric scenario parameter.
inline RunConfig resolve_config(const std::map<std::string, std::string>& kv) {
  RunConfig config;
  for (const auto& [key, value] : kv) {
    if (key == "scenario") {
      config.scenario = value;
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(detail::parse_number(key, value));
    } else if (key == "tail") {
      config.tail = detail::parse_number(key, value);
      if (!(config.tail > 0.0 && config.tail < 1.0))
        throw ConfigError("tail must lie in (0, 1)");
    } else if (key == "sweep") {
      config.sweep = detail::parse_sweep_spec(value);
    } else {
      config.params[key] = detail::parse_number(key, value);
    }
  }
  if (config.scenario.empty()) throw ConfigError("no scenario given");
  return config;
}

// ---------------------------------------------------------------------------
// Scenario sweep engine
// ---------------------------------------------------------------------------

struct ColumnSpec {
  std::string name;
  std::string unit;
};

struct ScenarioInfo {
  std::string name;
  std::vector<std::pair<std::string, double>> default_params;
  std::vector<ColumnSpec> columns;
};

inline const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> registry = {
      {"micromacro",
       {{"lambda0", 0.75}, {"g1", 0.5 * kPi}, {"g2", 0.5 * kPi}},
       {{"phi_ab_published", "radians"},
        {"phi_a_published", "radians"},
        {"phi_b_published", "radians"},
        {"delta_published", "radians"},
        {"delta_oracle", "radians"},
        {"entropy_oracle", "nats"}}},
      {"cat",
       {{"n_minus", 2.0}, {"n_plus", 1.0}, {"xi", 0.25 * kPi}, {"psi", 0.0}, {"theta", kPi}},
       {{"delta_published", "radians"},
        {"delta_oracle", "radians"},
        {"entropy_published", "bits"},
        {"entropy_oracle", "bits"}}},
      {"kondo",
       {{"theta", 0.0}, {"g1", 0.5 * kPi}, {"g4", 0.5 * kPi}},
       {{"delta_published", "radians"},
        {"concurrence_published", "dimensionless"},
        {"delta_oracle", "radians"},
        {"concurrence_oracle", "dimensionless"},
        {"e_from_delta_published", "dimensionless"}}},
  };
  return registry;
}

inline const ScenarioInfo& find_scenario(const std::string& name) {
  for (const auto& info : scenario_registry())
    if (info.name == name) return info;
  throw ConfigError("unknown scenario '" + name + "'");
}

namespace detail {

inline std::optional<double> defined_or_token(double value, bool defined) {
  if (!defined) return std::nullopt;
  return value;
}

inline std::vector<std::optional<double>> evaluate_micromacro(
    const std::map<std::string, double>& params) {
  MicroMacroParams p{params.at("lambda0"), params.at("g1"), params.at("g2")};
  const MicroMacroClosed pub = micro_macro_closed(p);
  const ScenarioSystem sys = micro_macro_build(p);
  const DeficitReport orc = oracle_deficit(sys.initial, sys.locals);
  const double entropy = entanglement_entropy(reduced_density(sys.initial, {0}));
  return {defined_or_token(pub.phi_ab.phase, pub.phi_ab.defined),
          defined_or_token(pub.phi_a.phase, pub.phi_a.defined),
          defined_or_token(pub.phi_b.phase, pub.phi_b.defined),
          defined_or_token(pub.delta, pub.delta_defined),
          defined_or_token(orc.deficit, orc.all_defined()),
          entropy};
}

inline std::vector<std::optional<double>> evaluate_cat(const std::map<std::string, double>& params,
                                                       double tail) {
  CatParams p;
  p.n_minus = params.at("n_minus");
  p.n_plus = params.at("n_plus");
  p.xi = params.at("xi");
  p.psi = params.at("psi");
  p.theta = params.at("theta");
  p.fock = truncation_for_tolerance(std::max(p.n_minus, p.n_plus), tail);
  const CatClosed pub = cat_closed(p);
  const ScenarioSystem sys = cat_build(p);
  const DeficitReport orc = oracle_deficit(sys.initial, sys.locals);
  const double entropy_bits =
      entanglement_entropy(reduced_density(sys.initial, {1})) / std::log(2.0);
  return {defined_or_token(pub.delta, pub.delta_defined),
          defined_or_token(orc.deficit, orc.all_defined()),
          defined_or_token(pub.entropy_bits, pub.entropy_defined),
          entropy_bits};
}

inline std::vector<std::optional<double>> evaluate_kondo(
    const std::map<std::string, double>& params) {
  KondoParams p{params.at("theta"), params.at("g1"), params.at("g4")};
  const KondoClosed pub = kondo_closed(p);
  const ScenarioSystem sys = kondo_build(p);
  const DeficitReport orc = oracle_deficit(sys.initial, sys.locals);
  const double orc_conc = wootters_concurrence(reduced_density(sys.initial, {0, 3}));
  return {defined_or_token(pub.delta, pub.delta_defined),
          kondo_concurrence(p.theta),
          defined_or_token(orc.deficit, orc.all_defined()),
          orc_conc,
          defined_or_token(pub.e_from_delta, pub.e_defined)};
}

inline std::vector<std::optional<double>> evaluate_scenario_point(
    const std::string& scenario, const std::map<std::string, double>& params, double tail) {
  if (scenario == "micromacro") return evaluate_micromacro(params);
  if (scenario == "cat") return evaluate_cat(params, tail);
  if (scenario == "kondo") return evaluate_kondo(params);
  throw ConfigError("unknown scenario '" + scenario + "'");
}

inline std::string param_unit(const std::string& name) {
  if (name == "lambda0" || name == "n_minus" || name == "n_plus") return "dimensionless";
  return "radians";
}

inline std::string config_header_line(const std::string& scenario,
                                      const std::map<std::string, double>& params,
                                      const std::optional<SweepRange>& sweep, std::uint64_t seed,
                                      double tail) {
  std::string line = "# config: scenario=" + scenario;
  for (const auto& [key, value] : params) line += " " + key + "=" + format_value(value);
  if (sweep)
    line += " sweep=" + sweep->key + ":" + format_value(sweep->start) + ":" +
            format_value(sweep->stop) + ":" + std::to_string(sweep->count);
  line += " seed=" + std::to_string(seed);
  line += " tail=" + format_value(tail);
  return line;
}

}  // namespace detail

struct SweepOutcome {
  int rows = 0;
  int undefined_cells = 0;
};

/// Evaluates the configured scenario (single point or one-axis sweep) and
/// writes the CSV. Single-point runs with any undefined quantity throw
/// UndefinedValueError before touching the output file; in a sweep the
/// affected cells carry the "undefined" token instead.
inline SweepOutcome run_sweep(const RunConfig& config, const std::string& out_path,
                              const std::string& command_label = "sweep") {
  const ScenarioInfo& info = find_scenario(config.scenario);

  std::map<std::string, double> params;
  for (const auto& [key, value] : info.default_params) params[key] = value;
  for (const auto& [key, value] : config.params) {
    if (params.find(key) == params.end())
      throw ConfigError("unknown parameter '" + key + "' for scenario " + config.scenario);
    params[key] = value;
  }
  if (config.sweep && params.find(config.sweep->key) == params.end())
    throw ConfigError("sweep key '" + config.sweep->key + "' is not a parameter of scenario " +
                      config.scenario);

  std::vector<double> sweep_values;
  if (config.sweep) {
    const auto& s = *config.sweep;
    if (s.count == 1) {
      sweep_values.push_back(s.start);
    } else {
      for (int j = 0; j < s.count; ++j)
        sweep_values.push_back(s.start + (s.stop - s.start) * static_cast<double>(j) /
                                             static_cast<double>(s.count - 1));
    }
  }

  std::string body;
  SweepOutcome outcome;
  std::vector<std::string> leading_names;
  if (config.sweep)
    leading_names.push_back(config.sweep->key);
  else
    for (const auto& [key, value] : params) leading_names.push_back(key);

  const auto emit_row = [&](const std::map<std::string, double>& point_params) {
    const auto values =
        detail::evaluate_scenario_point(config.scenario, point_params, config.tail);
    std::string row;
    for (const auto& name : leading_names) row += format_value(point_params.at(name)) + ",";
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (!values[c].has_value() || !std::isfinite(*values[c])) ++outcome.undefined_cells;
      row += format_cell(values[c]);
      if (c + 1 < values.size()) row += ",";
    }
    body += row + "\n";
    ++outcome.rows;
  };

  if (config.sweep) {
    for (const double v : sweep_values) {
      auto point_params = params;
      point_params[config.sweep->key] = v;
      emit_row(point_params);
    }
  } else {
    emit_row(params);
    if (outcome.undefined_cells > 0)
      throw UndefinedValueError("requested quantity is undefined at this parameter point");
  }

  std::string header;
  header += std::string("# artifact_version: ") + kArtifactVersion + "\n";
  header += "# command: " + command_label + "\n";
  header +=
      detail::config_header_line(config.scenario, params, config.sweep, config.seed, config.tail) +
      "\n";
  std::string columns_note = "# columns:";
  std::string header_row;
  for (const auto& name : leading_names) {
    columns_note += " " + name + " [" + detail::param_unit(name) + "],";
    header_row += name + ",";
  }
  for (std::size_t c = 0; c < info.columns.size(); ++c) {
    columns_note += " " + info.columns[c].name + " [" + info.columns[c].unit + "]";
    header_row += info.columns[c].name;
    if (c + 1 < info.columns.size()) {
      columns_note += ",";
      header_row += ",";
    }
  }
  header += columns_note + "\n";
  header += header_row + "\n";

  write_text_file(out_path, header + body);
  return outcome;
}

// ---------------------------------------------------------------------------
// Figure datasets and audit report
// ---------------------------------------------------------------------------

/// Renders the audit records as one block per formula.
inline std::string render_audit_report(const std::vector<DiscrepancyRecord>& records,
                                       double tail, std::uint64_t seed) {
  std::string text;
  text += std::string("# artifact_version: ") + kArtifactVersion + "\n";
  text += "# command: audit\n";
  text += "# config: tail=" + format_value(tail) + " seed=" + std::to_string(seed) + "\n";
  text += "# records: " + std::to_string(records.size()) + "\n";
  for (const auto& rec : records) {
    text += "\n[" + rec.formula_id + "]\n";
    text += "grid: " + rec.grid + "\n";
    text += "points: " + std::to_string(rec.points) + "\n";
    text += "undefined_published: " + std::to_string(rec.undefined_published) + "\n";
    text += "undefined_oracle: " + std::to_string(rec.undefined_oracle) + "\n";
    text += "unit: " + rec.unit + "\n";
    text += "max_abs_error: " + format_value(rec.max_abs_error) + "\n";
    std::string worst = "worst_point:";
    for (const auto& [name, value] : rec.worst_point) worst += " " + name + "=" + format_value(value);
    text += worst + "\n";
    text += "classification: " + rec.classification + "\n";
    text += "notes: " + rec.notes + "\n";
  }
  return text;
}

inline void emit_audit_report(const std::string& out_path, double tail, std::uint64_t seed) {
  write_text_file(out_path, render_audit_report(run_full_audit(tail), tail, seed));
}

/// Coherent-cat dataset: psi sweep at n_- = 2, n_+ = 1, xi = pi/4, theta = pi.
inline SweepOutcome emit_fig1(const std::string& out_path, double tail, std::uint64_t seed,
                              int points = 200) {
  RunConfig config;
  config.scenario = "cat";
  config.seed = seed;
  config.tail = tail;
  config.sweep = SweepRange{"psi", 0.0, kPi, points};
  return run_sweep(config, out_path, "figures fig1");
}

/// Boundary-spin dataset: theta sweep at g1 = g4 = pi/2, published columns
/// only (deficit and concurrence as printed, plus the oracle deficit).
inline SweepOutcome emit_fig2(const std::string& out_path, double tail, std::uint64_t seed,
                              int points = 200) {
  SweepOutcome outcome;
  std::map<std::string, double> params{{"theta", 0.0}, {"g1", 0.5 * kPi}, {"g4", 0.5 * kPi}};
  const SweepRange sweep{"theta", 0.0, kPi, points};

  std::string body;
  for (int j = 0; j < points; ++j) {
    const double theta =
        points == 1 ? 0.0 : kPi * static_cast<double>(j) / static_cast<double>(points - 1);
    KondoParams p{theta, params.at("g1"), params.at("g4")};
    const KondoClosed pub = kondo_closed(p);
    const ScenarioSystem sys = kondo_build(p);
    const DeficitReport orc = oracle_deficit(sys.initial, sys.locals);
    const std::vector<std::optional<double>> cells = {
        detail::defined_or_token(pub.delta, pub.delta_defined),
        kondo_concurrence(theta),
        detail::defined_or_token(orc.deficit, orc.all_defined())};
    std::string row = format_value(theta);
    for (const auto& cell : cells) {
      row += "," + format_cell(cell);
      if (!cell.has_value() || !std::isfinite(*cell)) ++outcome.undefined_cells;
    }
    body += row + "\n";
    ++outcome.rows;
  }

  std::string header;
  header += std::string("# artifact_version: ") + kArtifactVersion + "\n";
  header += "# command: figures fig2\n";
  header += detail::config_header_line("kondo", params, sweep, seed, tail) + "\n";
  header += "# columns: theta [radians], delta_published [radians], "
            "concurrence_published [dimensionless], delta_oracle [radians]\n";
  header += "theta,delta_published,concurrence_published,delta_oracle\n";
  write_text_file(out_path, header + body);
  return outcome;
}

// ---------------------------------------------------------------------------
// Self test
// ---------------------------------------------------------------------------

/// Quick built-in battery: cross-path agreement, product-state nullity,
/// Schmidt closed form, dynamical additivity, and the pinned scenario
/// anchors. Returns true when everything passes; one line per check.
inline bool run_selftest(std::uint64_t seed, std::string& log) {
  bool ok = true;
  const auto check = [&](const std::string& name, bool pass, double worst) {
    log += std::string(pass ? "ok   " : "FAIL ") + name + " (worst " + format_value(worst) + ")\n";
    ok = ok && pass;
  };

  SeededRng rng(seed);
  const std::vector<HilbertShape> shapes = {HilbertShape({2, 2}), HilbertShape({2, 3}),
                                            HilbertShape({2, 2, 2})};

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto& shape = shapes[static_cast<std::size_t>(i) % shapes.size()];
    const StateVector psi = random_product_state(shape, rng);
    const LocalUnitarySet locals = random_local_unitaries(shape, rng);
    const DeficitReport r = phase_deficit(psi, locals);
    const DeficitReport o = oracle_deficit(psi, locals);
    worst = std::max({worst, std::abs(r.deficit), std::abs(o.deficit)});
  }
  check("product states carry zero deficit", worst < 1e-10, worst);

  worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto& shape = shapes[static_cast<std::size_t>(i) % shapes.size()];
    const StateVector psi = random_state(shape, rng);
    const LocalUnitarySet locals = random_local_unitaries(shape, rng);
    const DeficitReport r = phase_deficit(psi, locals);
    const DeficitReport o = oracle_deficit(psi, locals);
    if (r.all_defined() != o.all_defined()) worst = 1.0;
    if (r.all_defined()) worst = std::max(worst, std::abs(wrap_angle(r.deficit - o.deficit)));
  }
  check("direct and brute-force paths agree", worst < 1e-10, worst);

  worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const HilbertShape shape({2 + static_cast<int>(rng.next_u64() % 5),
                              2 + static_cast<int>(rng.next_u64() % 5)});
    const StateVector psi = random_state(shape, rng);
    const LocalUnitarySet locals = random_local_unitaries(shape, rng);
    const auto closed =
        deficit_closed_form_schmidt(schmidt_decompose(psi, {0}), locals.unitaries[0],
                                    locals.unitaries[1]);
    const DeficitReport r = phase_deficit(psi, locals);
    if (closed.has_value() != r.all_defined()) worst = 1.0;
    if (closed && r.all_defined())
      worst = std::max(worst, std::abs(wrap_angle(*closed - r.deficit)));
  }
  check("Schmidt-form deficit matches", worst < 1e-9, worst);

  worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int da = 2 + static_cast<int>(rng.next_u64() % 3);
    const int db = 2 + static_cast<int>(rng.next_u64() % 3);
    const HilbertShape shape({da, db});
    const StateVector psi = random_state(shape, rng);
    const Operator ha = random_hermitian(da, rng);
    const Operator hb = random_hermitian(db, rng);
    const double t = rng.uniform(-2.0, 2.0);
    const Operator ida = Operator::identity(HilbertShape({da}), OperatorKind::hermitian);
    const Operator idb = Operator::identity(HilbertShape({db}), OperatorKind::hermitian);
    const Operator h = tensor_product(ha, idb) + tensor_product(ida, hb);
    const double global = dynamical_phase(h, psi, t);
    const double local_a = dynamical_phase(ha, reduced_density(psi, {0}), t);
    const double local_b = dynamical_phase(hb, reduced_density(psi, {1}), t);
    worst = std::max(worst, std::abs(global - local_a - local_b));
  }
  check("dynamical phase adds over factors", worst < 1e-10, worst);

  {
    const ScenarioSystem sys = micro_macro_build({0.75, 0.5 * kPi, 0.5 * kPi});
    const DeficitReport r = phase_deficit(sys.initial, sys.locals);
    const double expected = 2.0 * std::atan(1.0 / 3.0);
    const double err = std::abs(r.deficit - expected);
    check("micro-macro anchor deficit 2*atan(1/3)", r.all_defined() && err < 1e-12, err);
  }
  {
    const ScenarioSystem sys = kondo_build({0.0, 0.5 * kPi, 0.5 * kPi});
    const DeficitReport o = oracle_deficit(sys.initial, sys.locals);
    const double err = std::abs(o.deficit);
    check("boundary-spin oracle deficit vanishes at theta 0", o.all_defined() && err < 1e-10, err);
  }
  {
    const PhaseResult p = principal_arg(Complex(-1.0, -2.0));
    const double err = std::abs(p.phase - std::atan2(-2.0, -1.0));
    check("principal branch quadrant handling", p.defined && err == 0.0, err);
  }
  return ok;
}

}  // namespace pancharatnam
