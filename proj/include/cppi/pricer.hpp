#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cppi/error.hpp"
#include "cppi/model.hpp"
#include "cppi/parallel.hpp"
#include "cppi/strategy.hpp"

namespace cppi {

enum class OptionKind { Call, Put };

enum class Underlying {
  PureAsset,
  Cppi,      // standard CPPI: the minimum exposure is forced to zero
  CppiGmee,  // CPPI with the configured guaranteed minimum equity exposure
};

// Strike as an absolute level, or at-the-money (initial level of the underlying).
struct StrikeRule {
  std::optional<double> absolute;

  static StrikeRule atm() { return {}; }
  static StrikeRule fixed(double strike) { return {strike}; }
};

struct OptionSpec {
  OptionKind kind = OptionKind::Call;
  Underlying underlying = Underlying::PureAsset;
  StrikeRule strike = StrikeRule::atm();
  double maturity = 1.0;
};

struct PriceEstimate {
  double price = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

struct SimulationSettings {
  std::size_t n_paths = 200'000;
  std::uint64_t seed = 42;
  double steps_per_year = 252.0;
  std::size_t workers = default_worker_count();
};

[[nodiscard]] inline double terminal_payoff(OptionKind kind, double terminal_level, double strike) {
  if (terminal_level < 0.0) throw ValidationError("terminal_level", "must be non-negative");
  return kind == OptionKind::Call ? std::max(terminal_level - strike, 0.0)
                                  : std::max(strike - terminal_level, 0.0);
}

// Mean, standard error and 95% interval of per-path samples, summed in index
// order so the result does not depend on how the samples were produced.
[[nodiscard]] inline PriceEstimate summarize(std::span<const double> samples, std::uint64_t seed) {
  const std::size_t n = samples.size();
  if (n < 2) throw InsufficientPaths("at least two paths are needed for a standard error");
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(n);
  double squares = 0.0;
  for (double x : samples) squares += (x - mean) * (x - mean);
  const double se = std::sqrt(squares / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  return {mean, se, mean - 1.96 * se, mean + 1.96 * se, n, seed};
}

// One priced claim in a common-random-numbers batch.
struct PricingLeg {
  OptionKind kind = OptionKind::Call;
  Underlying underlying = Underlying::PureAsset;
  StrikeRule strike = StrikeRule::atm();
  std::optional<StrategyConfig> strategy;
};

namespace detail {

struct ResolvedLeg {
  OptionKind kind;
  bool on_strategy;
  double strike;
  StrategyConfig config;
  std::vector<double> fixed_floors;
};

inline ResolvedLeg resolve_leg(const PricingLeg& leg, const ModelParams& model, const TimeGrid& grid) {
  const bool on_strategy = leg.underlying != Underlying::PureAsset;
  if (on_strategy != leg.strategy.has_value())
    throw ValidationError("strategy",
                          on_strategy ? "a strategy configuration is required for this underlying"
                                      : "a pure-asset option takes no strategy configuration");
  ResolvedLeg out{leg.kind, on_strategy, 0.0, {}, {}};
  if (on_strategy) {
    out.config = *leg.strategy;
    if (leg.underlying == Underlying::Cppi) out.config.alpha_min = 0.0;
    out.config.validate();
    const double r_ref = out.config.floor_rate.value_or(model.r0);
    (void)initial_floor(out.config, r_ref, grid.maturity());
    if (out.config.floor_accrual == FloorAccrual::FixedRate)
      out.fixed_floors = fixed_floor_schedule(out.config, r_ref, grid.steps(), grid.dt());
  }
  const double atm_level = on_strategy ? out.config.initial_value : model.s0;
  out.strike = leg.strike.absolute.value_or(atm_level);
  if (!(std::isfinite(out.strike) && out.strike >= 0.0))
    throw ValidationError("strike", "must be non-negative");
  return out;
}

}  // namespace detail

// Evaluates sampler(path, out) on every path, where `out` receives one sample
// per column; returns a column-major sample matrix (column * n_paths + path).
template <class Sampler>
std::vector<double> sample_paths(const MarketSimulator& sim, std::size_t n_paths,
                                 std::size_t columns, std::size_t workers, Sampler&& sampler) {
  std::vector<double> samples(columns * n_paths);
  std::vector<std::vector<double>> scratch(std::max<std::size_t>(workers, 1),
                                           std::vector<double>(columns));
  for_each_path(sim, n_paths, workers,
                [&](std::size_t i, const MarketPath& path, std::size_t worker) {
                  auto& row = scratch[worker];
                  sampler(path, std::span<double>(row));
                  for (std::size_t c = 0; c < columns; ++c) samples[c * n_paths + i] = row[c];
                });
  return samples;
}

// Prices every leg on the same simulated market paths.
[[nodiscard]] inline std::vector<PriceEstimate> price_legs(const ModelParams& model, double maturity,
                                                           std::span<const PricingLeg> legs,
                                                           const SimulationSettings& settings) {
  model.validate();
  if (settings.n_paths < 2) throw InsufficientPaths("n_paths must be at least 2");
  const TimeGrid grid = TimeGrid::with_steps_per_year(maturity, settings.steps_per_year);
  std::vector<detail::ResolvedLeg> resolved;
  resolved.reserve(legs.size());
  for (const auto& leg : legs) resolved.push_back(detail::resolve_leg(leg, model, grid));
  if (resolved.empty()) return {};

  const MarketSimulator sim(model, grid, settings.seed);
  const auto samples = sample_paths(
      sim, settings.n_paths, resolved.size(), settings.workers,
      [&](const MarketPath& path, std::span<double> out) {
        const double df = path.discount.back();
        for (std::size_t j = 0; j < resolved.size(); ++j) {
          const auto& leg = resolved[j];
          const double level = leg.on_strategy
                                   ? terminal_strategy_value(path, leg.config, leg.fixed_floors)
                                   : path.asset.back();
          out[j] = df * terminal_payoff(leg.kind, std::max(level, 0.0), leg.strike);
        }
      });

  std::vector<PriceEstimate> estimates;
  estimates.reserve(resolved.size());
  for (std::size_t j = 0; j < resolved.size(); ++j)
    estimates.push_back(summarize(
        std::span<const double>(samples).subspan(j * settings.n_paths, settings.n_paths),
        settings.seed));
  return estimates;
}

[[nodiscard]] inline PriceEstimate price_option(const ModelParams& model, const OptionSpec& spec,
                                                const std::optional<StrategyConfig>& strategy,
                                                const SimulationSettings& settings) {
  const PricingLeg leg{spec.kind, spec.underlying, spec.strike, strategy};
  return price_legs(model, spec.maturity, std::span(&leg, 1), settings).front();
}

[[nodiscard]] inline PriceEstimate price_option(const ModelParams& model, const OptionSpec& spec,
                                                const std::optional<StrategyConfig>& strategy,
                                                std::size_t n_paths, std::uint64_t seed) {
  SimulationSettings settings;
  settings.n_paths = n_paths;
  settings.seed = seed;
  return price_option(model, spec, strategy, settings);
}

struct SweepRow {
  double value = 0.0;
  PriceEstimate estimate;
};

struct SweepTable {
  std::string axis;
  std::vector<SweepRow> rows;
};

// One independent pricing per maturity, each from the same seed.
[[nodiscard]] inline SweepTable sweep_maturity(const ModelParams& model, const OptionSpec& spec,
                                               const std::optional<StrategyConfig>& strategy,
                                               std::span<const double> maturities,
                                               const SimulationSettings& settings) {
  SweepTable table{"maturity", {}};
  for (double maturity : maturities) {
    OptionSpec at = spec;
    at.maturity = maturity;
    table.rows.push_back({maturity, price_option(model, at, strategy, settings)});
  }
  return table;
}

namespace detail {

template <class Mutate>
SweepTable sweep_strategy_parameter(const char* axis, const ModelParams& model,
                                    const OptionSpec& spec, const StrategyConfig& base,
                                    std::span<const double> values,
                                    const SimulationSettings& settings, Mutate&& mutate) {
  SweepTable table{axis, {}};
  if (values.empty()) return table;
  std::vector<PricingLeg> legs;
  legs.reserve(values.size());
  for (double x : values) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError(axis, "sweep values must lie in [0, 1]");
    StrategyConfig config = base;
    Underlying underlying = spec.underlying;
    mutate(config, underlying, x);
    legs.push_back({spec.kind, underlying, spec.strike, config});
  }
  const auto estimates = price_legs(model, spec.maturity, legs, settings);
  for (std::size_t i = 0; i < values.size(); ++i) table.rows.push_back({values[i], estimates[i]});
  return table;
}

}  // namespace detail

// GMEE pricing for each minimum exposure on common random numbers.
[[nodiscard]] inline SweepTable sweep_alpha_min(const ModelParams& model, const OptionSpec& spec,
                                                const StrategyConfig& base,
                                                std::span<const double> alphas,
                                                const SimulationSettings& settings) {
  return detail::sweep_strategy_parameter(
      "alpha_min", model, spec, base, alphas, settings,
      [](StrategyConfig& config, Underlying& underlying, double alpha) {
        config.alpha_min = alpha;
        underlying = Underlying::CppiGmee;
      });
}

// Pricing for each protection level on common random numbers. A pure-asset
// spec is priced on the GMEE strategy.
[[nodiscard]] inline SweepTable sweep_protection_level(const ModelParams& model,
                                                       const OptionSpec& spec,
                                                       const StrategyConfig& base,
                                                       std::span<const double> levels,
                                                       const SimulationSettings& settings) {
  return detail::sweep_strategy_parameter(
      "protection_level", model, spec, base, levels, settings,
      [](StrategyConfig& config, Underlying& underlying, double level) {
        config.protection_level = level;
        if (underlying == Underlying::PureAsset) underlying = Underlying::CppiGmee;
      });
}

}  // namespace cppi
