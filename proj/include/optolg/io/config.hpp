#pragma once

// Flat `key = value` run configuration.
//
// One assignment per line, `#` starts a comment. Numeric keys accept plain
// numeric literals only (no expressions). Enumerated keys take one of the
// listed words, flags take 0/1/true/false, paths are taken verbatim.
// Frequencies are in units of omega_m unless `units = physical`, in which
// case every frequency and time key is read in the same physical unit as
// `omega_m` and rescaled before use.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "optolg/optomech.hpp"
#include "optolg/qnd_feasibility.hpp"
#include "optolg/qops.hpp"

namespace optolg::io {

/// Configuration problem. line is 1-based for file entries, 0 for keys that
/// are missing or came from the command line.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &what, int line = 0, std::string key = {})
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string &key() const noexcept { return key_; }

private:
  int line_;
  std::string key_;
};

enum class Experiment {
  lg_sweep,
  lg_general,
  unbound,
  classical_demo,
  steadystate,
  displacement,
  feasibility,
  convergence
};

inline const char *to_string(Experiment e) {
  switch (e) {
  case Experiment::lg_sweep:
    return "lg-sweep";
  case Experiment::lg_general:
    return "lg-general";
  case Experiment::unbound:
    return "unbound";
  case Experiment::classical_demo:
    return "classical-demo";
  case Experiment::steadystate:
    return "steadystate";
  case Experiment::displacement:
    return "displacement";
  case Experiment::feasibility:
    return "feasibility";
  case Experiment::convergence:
    return "convergence";
  }
  return "?";
}

/// Experiments that produce a curve (and therefore CSV/SVG output).
inline bool produces_curve(Experiment e) {
  return e == Experiment::lg_sweep || e == Experiment::lg_general || e == Experiment::unbound ||
         e == Experiment::classical_demo || e == Experiment::convergence;
}

enum class GridUnits { time, scaled };

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  GridUnits units = GridUnits::time;
};

struct RunConfig {
  Experiment experiment = Experiment::lg_sweep;
  Mode observable = Mode::cavity;
  ModelParams model;                  ///< normalized, omega_m = 1
  bool thermal_initial_state = false;
  std::optional<GridSpec> grid;       ///< time units already in 1/omega_m
  double t2 = 0.0;                    ///< lg-general second delay, same units as the grid

  double classical_omega = 1.0;
  double classical_gamma = 0.0;
  double classical_c0 = 1.0;

  qnd::ReadoutParams readout;         ///< alpha, g, omega_m filled from the model when unset
  bool readout_alpha_given = false;
  qnd::FeasibilityThresholds thresholds;

  double convergence_tolerance = 1e-4;
  int convergence_ladder_max = 0;
  bool convergence_gate = false;

  std::optional<std::string> csv_path;
  std::optional<std::string> svg_path;
  std::optional<std::string> report_path;
};

/// One raw assignment: value text and where it came from.
struct ConfigEntry {
  std::string value;
  int line = 0; ///< 0 for command-line overrides
};

using ConfigEntries = std::map<std::string, ConfigEntry>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

enum class KeyKind { number, integer, flag, word, path };

struct KeyInfo {
  KeyKind kind;
  bool frequency = false; ///< rescaled by omega_m under physical units
  bool time = false;      ///< rescaled by omega_m under physical units (time grid)
};

inline const std::map<std::string, KeyInfo, std::less<>> &known_keys() {
  static const std::map<std::string, KeyInfo, std::less<>> keys = {
      {"experiment", {KeyKind::word}},
      {"observable", {KeyKind::word}},
      {"preset", {KeyKind::word}},
      {"units", {KeyKind::word}},
      {"initial_state", {KeyKind::word}},
      {"grid_units", {KeyKind::word}},

      {"omega_m", {KeyKind::number}},
      {"delta", {KeyKind::number, true}},
      {"g", {KeyKind::number}},
      {"omega_drive_amp", {KeyKind::number, true}},
      {"target_coupling", {KeyKind::number, true}},
      {"kappa", {KeyKind::number, true}},
      {"gamma", {KeyKind::number, true}},
      {"n_bar", {KeyKind::number}},
      {"n_c", {KeyKind::integer}},
      {"n_m", {KeyKind::integer}},
      {"rwa_only", {KeyKind::flag}},
      {"include_nonlinear_term", {KeyKind::flag}},
      {"include_mech_linear_dissipation", {KeyKind::flag}},

      {"grid_start", {KeyKind::number, false, true}},
      {"grid_stop", {KeyKind::number, false, true}},
      {"grid_count", {KeyKind::integer}},
      {"t2", {KeyKind::number, false, true}},

      {"classical_omega", {KeyKind::number}},
      {"classical_gamma", {KeyKind::number}},
      {"classical_c0", {KeyKind::number}},

      {"qubit_epsilon", {KeyKind::number, true}},
      {"cavity_omega_c", {KeyKind::number, true}},
      {"drive_omega_d", {KeyKind::number, true}},
      {"qubit_lambda", {KeyKind::number, true}},
      {"readout_alpha_re", {KeyKind::number}},
      {"readout_alpha_im", {KeyKind::number}},
      {"max_detuning_ratio", {KeyKind::number}},
      {"backaction_fraction", {KeyKind::number}},
      {"compensation_cap", {KeyKind::number, true}},

      {"convergence_tolerance", {KeyKind::number}},
      {"convergence_ladder_max", {KeyKind::integer}},
      {"convergence_gate", {KeyKind::flag}},

      {"csv", {KeyKind::path}},
      {"svg", {KeyKind::path}},
      {"report", {KeyKind::path}},
  };
  return keys;
}

inline double parse_number(const std::string &key, const ConfigEntry &e) {
  const std::string_view v = e.value;
  double out = 0.0;
  const char *first = v.data();
  if (!v.empty() && v.front() == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("key '" + key + "' expects a numeric literal, got '" + e.value + "'", e.line,
                      key);
  return out;
}

inline int parse_integer(const std::string &key, const ConfigEntry &e) {
  const std::string_view v = e.value;
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "' expects an integer, got '" + e.value + "'", e.line, key);
  return out;
}

inline bool parse_flag(const std::string &key, const ConfigEntry &e) {
  if (e.value == "1" || e.value == "true")
    return true;
  if (e.value == "0" || e.value == "false")
    return false;
  throw ConfigError("key '" + key + "' expects 0, 1, true or false, got '" + e.value + "'", e.line,
                    key);
}

template <class T>
T parse_word(const std::string &key, const ConfigEntry &e,
             std::initializer_list<std::pair<const char *, T>> choices) {
  std::string names;
  for (const auto &[name, value] : choices) {
    if (e.value == name)
      return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw ConfigError("key '" + key + "' expects one of {" + names + "}, got '" + e.value + "'",
                    e.line, key);
}

} // namespace detail

/// Split config text into raw entries. Unknown keys, duplicates, empty
/// values and malformed lines are errors.
inline ConfigEntries parse_entries(std::string_view text) {
  ConfigEntries out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", line_no);
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("missing key before '='", line_no);
    if (!detail::known_keys().count(key))
      throw ConfigError("unknown key '" + key + "'", line_no, key);
    if (value.empty())
      throw ConfigError("empty value for key '" + key + "'", line_no, key);
    if (out.count(key))
      throw ConfigError("duplicate key '" + key + "' (first on line " +
                            std::to_string(out[key].line) + ")",
                        line_no, key);
    out[key] = {value, line_no};
  }
  return out;
}

/// Overlay command-line values on file entries; the override always wins.
inline void apply_override(ConfigEntries &entries, const std::string &key,
                           const std::string &value) {
  if (!detail::known_keys().count(key))
    throw ConfigError("unknown key '" + key + "'", 0, key);
  if (value.empty())
    throw ConfigError("empty value for key '" + key + "'", 0, key);
  entries[key] = {value, 0};
}

/// Turn raw entries into a validated RunConfig.
inline RunConfig resolve(const ConfigEntries &entries) {
  using detail::parse_flag;
  using detail::parse_integer;
  using detail::parse_number;
  using detail::parse_word;

  auto find = [&](const char *key) -> const ConfigEntry * {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto line_of = [&](const char *key) {
    const auto *e = find(key);
    return e ? e->line : 0;
  };

  RunConfig cfg;
  const auto *exp = find("experiment");
  if (!exp)
    throw ConfigError("missing required key 'experiment'", 0, "experiment");
  cfg.experiment = parse_word<Experiment>(
      "experiment", *exp,
      {{"lg-sweep", Experiment::lg_sweep},
       {"lg-sweep-cavity", Experiment::lg_sweep},
       {"lg-sweep-mechanical", Experiment::lg_sweep},
       {"lg-general", Experiment::lg_general},
       {"unbound", Experiment::unbound},
       {"unbound-study", Experiment::unbound},
       {"classical-demo", Experiment::classical_demo},
       {"steadystate", Experiment::steadystate},
       {"displacement", Experiment::displacement},
       {"feasibility", Experiment::feasibility},
       {"convergence", Experiment::convergence}});
  if (exp->value == "lg-sweep-mechanical")
    cfg.observable = Mode::mechanical;
  if (const auto *e = find("observable"))
    cfg.observable =
        parse_word<Mode>("observable", *e, {{"cavity", Mode::cavity}, {"mechanical", Mode::mechanical}});

  bool physical = false;
  if (const auto *e = find("units"))
    physical = parse_word<bool>("units", *e, {{"normalized", false}, {"physical", true}});
  double omega_m = 1.0;
  if (const auto *e = find("omega_m"))
    omega_m = parse_number("omega_m", *e);
  if (!(omega_m > 0.0))
    throw ConfigError("omega_m must be > 0", line_of("omega_m"), "omega_m");
  if (!physical && omega_m != 1.0)
    throw ConfigError("omega_m other than 1 requires 'units = physical'", line_of("omega_m"),
                      "omega_m");

  auto number = [&](const char *key, double fallback) {
    const auto *e = find(key);
    if (!e)
      return fallback;
    double v = parse_number(key, *e);
    const auto &info = detail::known_keys().find(key)->second;
    if (physical && info.frequency)
      v /= omega_m;
    if (physical && info.time)
      v *= omega_m;
    return v;
  };
  auto integer = [&](const char *key, int fallback) {
    const auto *e = find(key);
    return e ? parse_integer(key, *e) : fallback;
  };
  auto flag = [&](const char *key, bool fallback) {
    const auto *e = find(key);
    return e ? parse_flag(key, *e) : fallback;
  };

  // Model: preset first, explicit keys on top.
  enum class Preset { weak, strong, none };
  Preset preset = Preset::weak;
  if (const auto *e = find("preset"))
    preset = parse_word<Preset>("preset", *e,
                                {{"weak", Preset::weak}, {"strong", Preset::strong}, {"none", Preset::none}});
  ModelParams p;
  std::optional<double> target;
  if (preset != Preset::none) {
    p = default_figure2_params(preset == Preset::weak ? Regime::weak : Regime::strong);
    target = preset == Preset::weak ? 0.05 : 0.3;
  }
  if (find("target_coupling"))
    target = number("target_coupling", 0.0);
  if (find("omega_drive_amp") && find("target_coupling"))
    throw ConfigError("give either 'omega_drive_amp' or 'target_coupling', not both",
                      line_of("target_coupling"), "target_coupling");
  const bool delta_given = find("delta") != nullptr;
  p.g = number("g", p.g);
  p.kappa = number("kappa", p.kappa);
  p.gamma = number("gamma", p.gamma);
  p.n_bar = number("n_bar", p.n_bar);
  p.n_c = integer("n_c", p.n_c);
  p.n_m = integer("n_m", p.n_m);
  p.rwa_only = flag("rwa_only", p.rwa_only);
  p.include_nonlinear_term = flag("include_nonlinear_term", p.include_nonlinear_term);
  p.include_mech_linear_dissipation =
      flag("include_mech_linear_dissipation", p.include_mech_linear_dissipation);
  p.omega_m = 1.0;
  if (target && !delta_given)
    p.delta = 1.0 + 2.0 * *target * *target;
  p.delta = number("delta", p.delta);
  if (find("omega_drive_amp")) {
    p.omega_drive_amp = number("omega_drive_amp", 0.0);
  } else if (target) {
    if (!(*target >= 0.0))
      throw ConfigError("target_coupling must be >= 0", line_of("target_coupling"),
                        "target_coupling");
    p.omega_drive_amp = *target == 0.0 ? 0.0 : drive_for_coupling(p, *target);
    if (std::isnan(p.omega_drive_amp))
      throw ConfigError("target_coupling " + std::to_string(*target) +
                            " is beyond the displacement fold for these parameters",
                        line_of("target_coupling"), "target_coupling");
  }
  try {
    p.validate();
  } catch (const std::invalid_argument &ex) {
    throw ConfigError(ex.what());
  }
  cfg.model = p;

  if (const auto *e = find("initial_state"))
    cfg.thermal_initial_state =
        parse_word<bool>("initial_state", *e, {{"ground", false}, {"thermal", true}});

  // Grid
  const bool any_grid = find("grid_start") || find("grid_stop") || find("grid_count");
  if (any_grid || produces_curve(cfg.experiment)) {
    for (const char *k : {"grid_start", "grid_stop", "grid_count"})
      if (!find(k))
        throw ConfigError(std::string("missing required key '") + k + "'", 0, k);
    GridSpec g;
    if (const auto *e = find("grid_units"))
      g.units = parse_word<GridUnits>("grid_units", *e,
                                      {{"time", GridUnits::time}, {"scaled", GridUnits::scaled}});
    // scaled grids are dimensionless; only raw times get rescaled
    g.start = g.units == GridUnits::time ? number("grid_start", 0.0)
                                         : parse_number("grid_start", *find("grid_start"));
    g.stop = g.units == GridUnits::time ? number("grid_stop", 0.0)
                                        : parse_number("grid_stop", *find("grid_stop"));
    g.count = integer("grid_count", 0);
    if (g.count < 2)
      throw ConfigError("grid_count must be >= 2", line_of("grid_count"), "grid_count");
    if (!(g.start >= 0.0))
      throw ConfigError("grid_start must be >= 0", line_of("grid_start"), "grid_start");
    if (!(g.stop > g.start))
      throw ConfigError("grid_stop must be > grid_start", line_of("grid_stop"), "grid_stop");
    cfg.grid = g;
  }
  if (cfg.experiment == Experiment::lg_general) {
    if (!find("t2"))
      throw ConfigError("missing required key 't2'", 0, "t2");
    const bool scaled = cfg.grid && cfg.grid->units == GridUnits::scaled;
    cfg.t2 = scaled ? parse_number("t2", *find("t2")) : number("t2", 0.0);
    if (!(cfg.t2 >= 0.0))
      throw ConfigError("t2 must be >= 0", line_of("t2"), "t2");
  }

  cfg.classical_omega = number("classical_omega", cfg.classical_omega);
  cfg.classical_gamma = number("classical_gamma", cfg.classical_gamma);
  cfg.classical_c0 = number("classical_c0", cfg.classical_c0);
  if (!(cfg.classical_omega > 0.0))
    throw ConfigError("classical_omega must be > 0", line_of("classical_omega"), "classical_omega");
  if (!(cfg.classical_gamma >= 0.0))
    throw ConfigError("classical_gamma must be >= 0", line_of("classical_gamma"), "classical_gamma");

  if (cfg.experiment == Experiment::feasibility) {
    for (const char *k : {"qubit_epsilon", "cavity_omega_c", "drive_omega_d", "qubit_lambda"})
      if (!find(k))
        throw ConfigError(std::string("missing required key '") + k + "'", 0, k);
  }
  cfg.readout.epsilon = number("qubit_epsilon", 0.0);
  cfg.readout.omega_c = number("cavity_omega_c", 0.0);
  cfg.readout.omega_drive = number("drive_omega_d", 0.0);
  cfg.readout.lambda = number("qubit_lambda", 0.0);
  cfg.readout.g = p.g;
  cfg.readout.omega_m = 1.0;
  if (find("readout_alpha_re") || find("readout_alpha_im")) {
    cfg.readout_alpha_given = true;
    cfg.readout.alpha = {number("readout_alpha_re", 0.0), number("readout_alpha_im", 0.0)};
  }
  if (cfg.experiment == Experiment::feasibility) {
    try {
      cfg.readout.validate();
    } catch (const std::invalid_argument &ex) {
      throw ConfigError(ex.what());
    }
  }
  cfg.thresholds.max_detuning_ratio = number("max_detuning_ratio", cfg.thresholds.max_detuning_ratio);
  cfg.thresholds.backaction_fraction =
      number("backaction_fraction", cfg.thresholds.backaction_fraction);
  cfg.thresholds.compensation_cap = number("compensation_cap", cfg.thresholds.compensation_cap);

  cfg.convergence_tolerance = number("convergence_tolerance", cfg.convergence_tolerance);
  cfg.convergence_ladder_max = integer("convergence_ladder_max", cfg.convergence_ladder_max);
  cfg.convergence_gate =
      flag("convergence_gate", cfg.experiment == Experiment::convergence);
  if (!(cfg.convergence_tolerance > 0.0))
    throw ConfigError("convergence_tolerance must be > 0", line_of("convergence_tolerance"),
                      "convergence_tolerance");

  if (const auto *e = find("csv"))
    cfg.csv_path = e->value;
  if (const auto *e = find("svg"))
    cfg.svg_path = e->value;
  if (const auto *e = find("report"))
    cfg.report_path = e->value;
  if (!produces_curve(cfg.experiment) && (cfg.csv_path || cfg.svg_path))
    throw ConfigError(std::string(to_string(cfg.experiment)) + " produces no curve; drop csv/svg",
                      cfg.csv_path ? line_of("csv") : line_of("svg"),
                      cfg.csv_path ? "csv" : "svg");
  return cfg;
}

inline RunConfig parse_config(std::string_view text) { return resolve(parse_entries(text)); }

/// Exact decimal text of a double (round-trips through from_chars).
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Resolved configuration as normalized `key = value` lines. Parsing the
/// echo yields the same RunConfig.
inline std::string echo_config(const RunConfig &c) {
  std::ostringstream o;
  auto kv = [&](const char *k, const std::string &v) { o << k << " = " << v << '\n'; };
  auto num = [&](const char *k, double v) { kv(k, format_double(v)); };
  const auto &p = c.model;
  kv("experiment", to_string(c.experiment));
  kv("observable", c.observable == Mode::cavity ? "cavity" : "mechanical");
  kv("units", "normalized");
  kv("preset", "none");
  num("delta", p.delta);
  num("g", p.g);
  num("omega_drive_amp", p.omega_drive_amp);
  num("kappa", p.kappa);
  num("gamma", p.gamma);
  num("n_bar", p.n_bar);
  kv("n_c", std::to_string(p.n_c));
  kv("n_m", std::to_string(p.n_m));
  kv("rwa_only", p.rwa_only ? "1" : "0");
  kv("include_nonlinear_term", p.include_nonlinear_term ? "1" : "0");
  kv("include_mech_linear_dissipation", p.include_mech_linear_dissipation ? "1" : "0");
  kv("initial_state", c.thermal_initial_state ? "thermal" : "ground");
  if (c.grid) {
    kv("grid_units", c.grid->units == GridUnits::time ? "time" : "scaled");
    num("grid_start", c.grid->start);
    num("grid_stop", c.grid->stop);
    kv("grid_count", std::to_string(c.grid->count));
  }
  if (c.experiment == Experiment::lg_general)
    num("t2", c.t2);
  num("classical_omega", c.classical_omega);
  num("classical_gamma", c.classical_gamma);
  num("classical_c0", c.classical_c0);
  if (c.experiment == Experiment::feasibility) {
    num("qubit_epsilon", c.readout.epsilon);
    num("cavity_omega_c", c.readout.omega_c);
    num("drive_omega_d", c.readout.omega_drive);
    num("qubit_lambda", c.readout.lambda);
  }
  if (c.readout_alpha_given) {
    num("readout_alpha_re", c.readout.alpha.real());
    num("readout_alpha_im", c.readout.alpha.imag());
  }
  num("max_detuning_ratio", c.thresholds.max_detuning_ratio);
  num("backaction_fraction", c.thresholds.backaction_fraction);
  num("compensation_cap", c.thresholds.compensation_cap);
  num("convergence_tolerance", c.convergence_tolerance);
  kv("convergence_ladder_max", std::to_string(c.convergence_ladder_max));
  kv("convergence_gate", c.convergence_gate ? "1" : "0");
  if (c.csv_path)
    kv("csv", *c.csv_path);
  if (c.svg_path)
    kv("svg", *c.svg_path);
  if (c.report_path)
    kv("report", *c.report_path);
  return o.str();
}

/// Apply --grid start:stop:count as grid_start/grid_stop/grid_count overrides.
inline void apply_grid_flag(ConfigEntries &entries, const std::string &text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos ||
      text.find(':', b + 1) != std::string::npos)
    throw ConfigError("--grid expects start:stop:count, got '" + text + "'", 0, "grid");
  apply_override(entries, "grid_start", text.substr(0, a));
  apply_override(entries, "grid_stop", text.substr(a + 1, b - a - 1));
  apply_override(entries, "grid_count", text.substr(b + 1));
}

} // namespace optolg::io
