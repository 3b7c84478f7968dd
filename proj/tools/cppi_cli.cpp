// Command-line frontend: option pricing, parameter sweeps and historical
// backtests. Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cppi/cppi.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::size_t> n_paths;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::string> out;
};

struct OptionFlags {
  std::string underlying = "asset";
  std::string kind = "call";
  double maturity = 1.0;
  std::optional<double> strike;
};

void add_common(CLI::App& cmd, CommonOptions& opts) {
  cmd.add_option("--config", opts.config_path, "INI file with [model], [strategy], [run] sections");
  cmd.add_option("--set", opts.overrides, "Override one key, e.g. --set model.r0=0.03");
  cmd.add_option("--paths", opts.n_paths, "Monte Carlo path count");
  cmd.add_option("--seed", opts.seed, "Random seed");
  cmd.add_option("--format", opts.format, "Output format (json|csv)");
  cmd.add_option("--out", opts.out, "Output file (default: stdout)");
}

void add_option_flags(CLI::App& cmd, OptionFlags& flags) {
  cmd.add_option("--underlying", flags.underlying, "asset | cppi | gmee");
  cmd.add_option("--kind", flags.kind, "call | put");
  cmd.add_option("--maturity", flags.maturity, "Option maturity in years");
  cmd.add_option("--strike", flags.strike, "Absolute strike (default: at the money)");
}

cppi::RunConfig resolve_config(const CommonOptions& opts) {
  cppi::RunConfig config;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw cppi::IoError("cannot open config '" + opts.config_path + "'");
    config = cppi::parse_config(in);
  }
  for (const auto& assignment : opts.overrides) cppi::apply_override(config, assignment);
  if (opts.n_paths) config.run.n_paths = *opts.n_paths;
  if (opts.seed) config.run.seed = *opts.seed;
  if (opts.format) config.run.format = *opts.format;
  if (opts.out) config.run.out = *opts.out;
  config.validate();
  return config;
}

cppi::OptionSpec resolve_spec(const OptionFlags& flags) {
  cppi::OptionSpec spec;
  if (flags.kind == "call") spec.kind = cppi::OptionKind::Call;
  else if (flags.kind == "put") spec.kind = cppi::OptionKind::Put;
  else throw cppi::ValidationError("kind", "must be 'call' or 'put'");
  if (flags.underlying == "asset") spec.underlying = cppi::Underlying::PureAsset;
  else if (flags.underlying == "cppi") spec.underlying = cppi::Underlying::Cppi;
  else if (flags.underlying == "gmee") spec.underlying = cppi::Underlying::CppiGmee;
  else throw cppi::ValidationError("underlying", "must be 'asset', 'cppi' or 'gmee'");
  if (!(flags.maturity > 0.0)) throw cppi::ValidationError("maturity", "must be positive");
  if (flags.strike) spec.strike = cppi::StrikeRule::fixed(*flags.strike);
  spec.maturity = flags.maturity;
  return spec;
}

cppi::SimulationSettings settings_of(const cppi::RunConfig& config) {
  cppi::SimulationSettings settings;
  settings.n_paths = config.run.n_paths;
  settings.seed = config.run.seed;
  settings.steps_per_year = config.run.steps_per_year;
  return settings;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw cppi::IoError("cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cppi::IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw cppi::IoError("cannot write '" + path + "'");
}

std::string config_comment(const cppi::RunConfig& config) {
  std::istringstream ini(cppi::to_ini(config));
  std::string out;
  for (std::string line; std::getline(ini, line);) out += "# " + line + '\n';
  return out;
}

nlohmann::ordered_json spec_json(const OptionFlags& flags, const cppi::OptionSpec& spec) {
  return {{"kind", flags.kind},
          {"underlying", flags.underlying},
          {"strike", spec.strike.absolute ? nlohmann::ordered_json(*spec.strike.absolute)
                                          : nlohmann::ordered_json("atm")},
          {"maturity", spec.maturity}};
}

std::optional<cppi::StrategyConfig> strategy_for(const cppi::OptionSpec& spec,
                                                 const cppi::RunConfig& config) {
  if (spec.underlying == cppi::Underlying::PureAsset) return std::nullopt;
  return config.strategy;
}

int cmd_price(const CommonOptions& opts, const OptionFlags& flags) {
  const auto config = resolve_config(opts);
  const auto spec = resolve_spec(flags);
  const auto estimate =
      cppi::price_option(config.model, spec, strategy_for(spec, config), settings_of(config));
  if (config.run.format == "csv") {
    emit(config_comment(config) + cppi::price_csv_header() + cppi::to_csv_row(estimate), config.run.out);
  } else {
    nlohmann::ordered_json doc{{"command", "price"},
                               {"config", cppi::to_json(config)},
                               {"option", spec_json(flags, spec)},
                               {"result", cppi::to_json(estimate)}};
    emit(doc.dump(2) + '\n', config.run.out);
  }
  return 0;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  for (std::string item; std::getline(stream, item, ',');) {
    const auto value = cppi::parse_double(item);
    if (!value) throw cppi::ValidationError("values", "not a number: '" + item + "'");
    values.push_back(*value);
  }
  if (values.empty()) throw cppi::ValidationError("values", "sweep needs at least one value");
  return values;
}

int cmd_sweep(const CommonOptions& opts, OptionFlags flags, const std::string& axis,
              const std::string& values_text) {
  const auto config = resolve_config(opts);
  const auto values = parse_values(values_text);
  if (axis != "maturity" && flags.underlying == "asset") flags.underlying = "gmee";
  const auto spec = resolve_spec(flags);
  const auto settings = settings_of(config);

  cppi::SweepTable table;
  if (axis == "maturity") {
    table = cppi::sweep_maturity(config.model, spec, strategy_for(spec, config), values, settings);
  } else if (axis == "alpha_min") {
    table = cppi::sweep_alpha_min(config.model, spec, config.strategy, values, settings);
  } else if (axis == "protection") {
    table = cppi::sweep_protection_level(config.model, spec, config.strategy, values, settings);
  } else {
    throw cppi::ValidationError("axis", "must be 'maturity', 'alpha_min' or 'protection'");
  }

  if (config.run.format == "csv") {
    emit(config_comment(config) + cppi::to_csv(table), config.run.out);
  } else {
    nlohmann::ordered_json doc{{"command", "sweep"},
                               {"config", cppi::to_json(config)},
                               {"option", spec_json(flags, spec)},
                               {"sweep", cppi::to_json(table)}};
    emit(doc.dump(2) + '\n', config.run.out);
  }
  return 0;
}

int cmd_backtest(const CommonOptions& opts, const std::string& data, double rate) {
  const auto config = resolve_config(opts);
  if (!config.multiplier_given)
    throw cppi::ValidationError("strategy.multiplier", "must be set explicitly for backtests");
  if (config.run.out.empty()) throw cppi::ValidationError("out", "backtest needs --out");
  const auto series = cppi::load_series_file(data);

  cppi::StrategyConfig standard = config.strategy;
  standard.alpha_min = 0.0;
  const std::vector<cppi::BacktestStrategy> strategies{{"cppi", standard}, {"gmee", config.strategy}};
  const auto report = cppi::run_backtest(series, strategies, rate);

  std::filesystem::path summary_path(config.run.out);
  summary_path.replace_extension(".json");
  auto summary = cppi::summary_json(report);
  summary["config"] = cppi::to_json(config);
  emit(cppi::to_csv(report), config.run.out);
  emit(summary.dump(2) + '\n', summary_path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo pricing and backtesting of options on CPPI strategies"};
  app.require_subcommand(1);

  CommonOptions price_opts;
  OptionFlags price_flags;
  auto* price = app.add_subcommand("price", "Price one option");
  add_common(*price, price_opts);
  add_option_flags(*price, price_flags);

  CommonOptions sweep_opts;
  OptionFlags sweep_flags;
  std::string axis;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Price an option over a list of parameter values");
  add_common(*sweep, sweep_opts);
  add_option_flags(*sweep, sweep_flags);
  sweep->add_option("--axis", axis, "maturity | alpha_min | protection")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  CommonOptions backtest_opts;
  std::string data;
  double rate = 0.0;
  auto* backtest = app.add_subcommand("backtest", "Run CPPI and CPPI-GMEE over a price series");
  add_common(*backtest, backtest_opts);
  backtest->add_option("--data", data, "CSV with header date,price")->required();
  backtest->add_option("--rate", rate, "Constant risk-free rate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*price) return cmd_price(price_opts, price_flags);
    if (*sweep) return cmd_sweep(sweep_opts, sweep_flags, axis, values);
    if (*backtest) return cmd_backtest(backtest_opts, data, rate);
  } catch (const cppi::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
