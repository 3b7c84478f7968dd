#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

#include "cppi/error.hpp"
#include "cppi/format.hpp"
#include "cppi/model.hpp"
#include "cppi/strategy.hpp"

namespace cppi {

struct RunSettings {
  std::size_t n_paths = 200'000;
  std::uint64_t seed = 42;
  double steps_per_year = 252.0;
  std::string format = "json";  // json | csv
  std::string out;              // empty: stdout
};

// Everything a CLI run depends on. Model defaults are the reference parameter
// set; strategy defaults are M = 4, L_max = 100%, alpha_min = 30%, PL = 100%.
struct RunConfig {
  ModelParams model;
  StrategyConfig strategy{100.0, 4.0, 1.0, 0.3, 1.0, FloorAccrual::FixedRate, std::nullopt};
  bool multiplier_given = false;
  RunSettings run;

  void validate() const {
    model.validate();
    strategy.validate();
    if (run.n_paths < 2) throw ValidationError("run.n_paths", "must be at least 2");
    if (!(run.steps_per_year > 0.0)) throw ValidationError("run.steps_per_year", "must be positive");
    if (run.format != "json" && run.format != "csv")
      throw ValidationError("run.format", "must be 'json' or 'csv'");
  }
};

namespace detail {

inline double to_number(std::string_view key, std::string_view text) {
  const auto value = parse_double(text);
  if (!value) throw ValidationError(std::string(key), "not a number: '" + std::string(text) + "'");
  return *value;
}

inline std::uint64_t to_count(std::string_view key, std::string_view text) {
  const double value = to_number(key, text);
  if (value < 0.0 || value != static_cast<double>(static_cast<std::uint64_t>(value)))
    throw ValidationError(std::string(key), "must be a non-negative integer");
  return static_cast<std::uint64_t>(value);
}

}  // namespace detail

// Assigns one "section.key" entry. Unknown keys are rejected.
inline void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  using detail::to_count;
  using detail::to_number;
  auto& m = config.model;
  auto& s = config.strategy;
  auto& r = config.run;
  struct NumberField {
    std::string_view key;
    double* target;
  };
  const NumberField numbers[] = {
      {"model.s0", &m.s0},           {"model.v0", &m.v0},
      {"model.k", &m.k},             {"model.theta", &m.theta},
      {"model.sigma_v", &m.sigma_v}, {"model.r0", &m.r0},
      {"model.nu", &m.nu},           {"model.beta", &m.beta},
      {"model.sigma_r", &m.sigma_r}, {"model.gamma", &m.gamma},
      {"model.rho_sv", &m.rho_sv},   {"model.rho_sr", &m.rho_sr},
      {"strategy.initial_value", &s.initial_value},
      {"strategy.l_max", &s.l_max},
      {"strategy.alpha_min", &s.alpha_min},
      {"strategy.protection_level", &s.protection_level},
      {"run.steps_per_year", &r.steps_per_year},
  };
  for (const auto& field : numbers) {
    if (field.key == key) {
      *field.target = to_number(key, value);
      return;
    }
  }
  if (key == "strategy.multiplier") {
    s.multiplier = to_number(key, value);
    config.multiplier_given = true;
  } else if (key == "strategy.overnight_risk") {
    s.multiplier = multiplier_from_overnight_risk(to_number(key, value));
    config.multiplier_given = true;
  } else if (key == "strategy.floor_accrual") {
    if (value == "fixed") s.floor_accrual = FloorAccrual::FixedRate;
    else if (value == "realized") s.floor_accrual = FloorAccrual::RealizedShortRate;
    else throw ValidationError(std::string(key), "must be 'fixed' or 'realized'");
  } else if (key == "strategy.floor_rate") {
    s.floor_rate = to_number(key, value);
  } else if (key == "run.n_paths") {
    r.n_paths = static_cast<std::size_t>(to_count(key, value));
  } else if (key == "run.seed") {
    r.seed = to_count(key, value);
  } else if (key == "run.format") {
    r.format = std::string(value);
  } else if (key == "run.out") {
    r.out = std::string(value);
  } else {
    throw ValidationError(std::string(key), "unknown configuration key");
  }
}

// "section.key=value" as given on the command line.
inline void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ValidationError(std::string(assignment), "override must look like section.key=value");
  set_config_value(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

// INI text with [model], [strategy] and [run] sections; missing keys keep
// their defaults.
inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  RunConfig config;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty())
      throw ValidationError(section, "key outside of a section");
    for (const auto& [key, node] : entries) set_config_value(config, section + "." + key, node.data());
  }
  config.validate();
  return config;
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  const auto& m = c.model;
  const auto& s = c.strategy;
  return {
      {"model",
       {{"s0", m.s0}, {"v0", m.v0}, {"k", m.k}, {"theta", m.theta}, {"sigma_v", m.sigma_v},
        {"r0", m.r0}, {"nu", m.nu}, {"beta", m.beta}, {"sigma_r", m.sigma_r}, {"gamma", m.gamma},
        {"rho_sv", m.rho_sv}, {"rho_sr", m.rho_sr}}},
      {"strategy",
       {{"initial_value", s.initial_value},
        {"multiplier", s.multiplier},
        {"l_max", s.l_max},
        {"alpha_min", s.alpha_min},
        {"protection_level", s.protection_level},
        {"floor_accrual", s.floor_accrual == FloorAccrual::FixedRate ? "fixed" : "realized"},
        {"floor_rate", s.floor_rate.value_or(m.r0)}}},
      {"run",
       {{"n_paths", c.run.n_paths},
        {"seed", c.run.seed},
        {"steps_per_year", c.run.steps_per_year},
        {"format", c.run.format}}},
  };
}

// INI rendering of the resolved configuration; parse_config reads it back.
inline std::string to_ini(const RunConfig& c) {
  std::string out;
  const auto doc = to_json(c);
  for (const auto& [section, entries] : doc.items()) {
    out += '[' + section + "]\n";
    for (const auto& [key, value] : entries.items()) {
      out += key + " = ";
      if (value.is_string()) out += value.get<std::string>();
      else if (value.is_number_float()) out += format_double(value.get<double>());
      else out += value.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace cppi
