#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cppi/error.hpp"
#include "cppi/format.hpp"
#include "cppi/model.hpp"

namespace cppi {

enum class FloorAccrual {
  FixedRate,          // floor grows at a constant reference rate, F_T = PL * V_0
  RealizedShortRate,  // floor grows at the simulated short rate
};

struct StrategyConfig {
  double initial_value = 100.0;
  double multiplier = 4.0;
  double l_max = 1.0;
  double alpha_min = 0.0;
  double protection_level = 1.0;
  FloorAccrual floor_accrual = FloorAccrual::FixedRate;
  // Reference rate for the floor; the model's initial short rate when unset.
  std::optional<double> floor_rate;

  void validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
      if (!ok) throw ValidationError(field, what);
    };
    require(std::isfinite(initial_value) && initial_value > 0.0, "initial_value",
            "must be positive");
    require(std::isfinite(multiplier) && multiplier > 0.0, "multiplier", "must be positive");
    require(std::isfinite(l_max) && l_max > 0.0, "l_max", "must be positive");
    require(alpha_min >= 0.0 && alpha_min <= 1.0, "alpha_min", "must lie in [0, 1]");
    require(alpha_min <= l_max, "alpha_min", "must not exceed l_max");
    require(protection_level >= 0.0 && protection_level <= 1.0, "protection_level",
            "must lie in [0, 1]");
    require(!floor_rate || std::isfinite(*floor_rate), "floor_rate", "must be finite");
  }
};

// M = 1 / ONR, with ONR the assumed worst overnight loss of the risky asset.
[[nodiscard]] inline double multiplier_from_overnight_risk(double overnight_risk) {
  if (!(overnight_risk > 0.0 && overnight_risk <= 1.0))
    throw ValidationError("overnight_risk", "must lie in (0, 1]");
  return 1.0 / overnight_risk;
}

// Present value at t=0 of the guaranteed amount PL * V_0 due at T.
[[nodiscard]] inline double initial_floor(const StrategyConfig& config, double r_ref, double maturity) {
  if (!(maturity > 0.0)) throw ValidationError("maturity", "must be positive");
  const double floor = config.protection_level * config.initial_value * std::exp(-r_ref * maturity);
  if (floor >= config.initial_value)
    throw InfeasibleGuarantee("initial floor " + format_double(floor) +
                              " is not below the initial portfolio value " +
                              format_double(config.initial_value));
  return floor;
}

// Equity weight max(min(l_max, M * C / V), alpha_min).
[[nodiscard]] inline double target_alpha(double cushion, double value, const StrategyConfig& config) {
  if (!(value > 0.0)) throw ZeroPortfolio("portfolio value must be positive");
  return std::max(std::min(config.l_max, config.multiplier * cushion / value), config.alpha_min);
}

// Self-financing update: the equity sleeve moves with the asset, the rest
// accrues at cash_growth over the step.
[[nodiscard]] inline double grow_portfolio(double value, double alpha, double asset_growth,
                                           double cash_growth) noexcept {
  return value * (alpha * asset_growth + (1.0 - alpha) * cash_growth);
}

[[nodiscard]] inline double step_portfolio(double value, double alpha, double asset_growth,
                                           double rate, double dt) noexcept {
  return grow_portfolio(value, alpha, asset_growth, std::exp(rate * dt));
}

// Floor on each of the n+1 points of a uniform grid under FixedRate accrual.
// The last entry is PL * V_0 exactly.
[[nodiscard]] inline std::vector<double> fixed_floor_schedule(const StrategyConfig& config,
                                                              double r_ref, std::size_t n_steps,
                                                              double dt) {
  const double guarantee = config.protection_level * config.initial_value;
  std::vector<double> floors(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i)
    floors[i] = guarantee * std::exp(-r_ref * static_cast<double>(n_steps - i) * dt);
  return floors;
}

// Rebalancing state machine shared by the pricer, the path recorder and the
// backtester so all three apply identical arithmetic.
class StrategyRunner {
public:
  StrategyRunner(const StrategyConfig& config, double floor0)
      : config_(&config), value_(config.initial_value), floor_(floor0) {}

  [[nodiscard]] double value() const noexcept { return value_; }
  [[nodiscard]] double floor() const noexcept { return floor_; }
  [[nodiscard]] double cushion() const noexcept { return std::max(0.0, value_ - floor_); }
  [[nodiscard]] bool cashed_in() const noexcept { return cashed_in_; }

  // Allocation for the coming step, from the current state only. Without a
  // minimum exposure an exhausted cushion locks the portfolio in cash.
  double rebalance() {
    const double c = cushion();
    if (config_->alpha_min == 0.0 && (cashed_in_ || c <= 0.0)) {
      cashed_in_ = true;
      alpha_ = 0.0;
    } else if (value_ <= 0.0) {
      cashed_in_ = true;
      alpha_ = 0.0;
    } else {
      alpha_ = target_alpha(c, value_, *config_);
    }
    return alpha_;
  }

  void advance(double asset_growth, double cash_growth, double next_floor) noexcept {
    value_ = grow_portfolio(value_, alpha_, asset_growth, cash_growth);
    floor_ = next_floor;
  }

private:
  const StrategyConfig* config_;
  double value_;
  double floor_;
  double alpha_ = 0.0;
  bool cashed_in_ = false;
};

struct StrategyPath {
  std::vector<double> value;
  std::vector<double> floor;
  std::vector<double> cushion;
  std::vector<double> alpha;  // weight held over (t_i, t_{i+1}]; last entry is the target at T
  bool cash_in = false;
  std::optional<std::size_t> cash_in_index;
};

namespace detail {

inline double reference_rate(const MarketPath& market, const StrategyConfig& config) {
  return config.floor_rate.value_or(market.rate.front());
}

// Walks the strategy along `market`, calling record(i, runner, alpha) at every
// grid point including T.
template <class Recorder>
double walk_strategy(const MarketPath& market, const StrategyConfig& config,
                     std::span<const double> fixed_floors, Recorder&& record) {
  const std::size_t n = market.steps();
  const double maturity = static_cast<double>(n) * market.dt;
  const double r_ref = reference_rate(market, config);
  StrategyRunner runner(config, config.floor_accrual == FloorAccrual::FixedRate
                                    ? fixed_floors.front()
                                    : initial_floor(config, r_ref, maturity));
  for (std::size_t i = 0; i < n; ++i) {
    const double alpha = runner.rebalance();
    record(i, runner, alpha);
    const double next_floor = config.floor_accrual == FloorAccrual::FixedRate
                                  ? fixed_floors[i + 1]
                                  : runner.floor() * market.cash_growth[i];
    runner.advance(market.asset_growth[i], market.cash_growth[i], next_floor);
  }
  const double alpha_at_end = runner.rebalance();
  record(n, runner, alpha_at_end);
  return runner.value();
}

inline std::vector<double> floors_for(const MarketPath& market, const StrategyConfig& config) {
  const double r_ref = reference_rate(market, config);
  const double maturity = static_cast<double>(market.steps()) * market.dt;
  (void)initial_floor(config, r_ref, maturity);  // feasibility
  if (config.floor_accrual != FloorAccrual::FixedRate) return {};
  return fixed_floor_schedule(config, r_ref, market.steps(), market.dt);
}

}  // namespace detail

// Records the full strategy trajectory on one market path.
[[nodiscard]] inline StrategyPath run_strategy(const MarketPath& market, const StrategyConfig& config) {
  config.validate();
  if (market.steps() == 0 || market.asset.size() != market.steps() + 1)
    throw ValidationError("market", "path is empty or inconsistent");
  const auto floors = detail::floors_for(market, config);
  StrategyPath out;
  const std::size_t points = market.steps() + 1;
  out.value.reserve(points);
  out.floor.reserve(points);
  out.cushion.reserve(points);
  out.alpha.reserve(points);
  detail::walk_strategy(market, config, floors,
                        [&](std::size_t i, const StrategyRunner& runner, double alpha) {
                          out.value.push_back(runner.value());
                          out.floor.push_back(runner.floor());
                          out.cushion.push_back(runner.cushion());
                          out.alpha.push_back(alpha);
                          if (runner.cashed_in() && !out.cash_in) {
                            out.cash_in = true;
                            out.cash_in_index = i;
                          }
                        });
  return out;
}

// Terminal value only. `fixed_floors` must come from fixed_floor_schedule for
// FixedRate accrual and may be empty otherwise.
[[nodiscard]] inline double terminal_strategy_value(const MarketPath& market,
                                                    const StrategyConfig& config,
                                                    std::span<const double> fixed_floors) {
  return detail::walk_strategy(market, config, fixed_floors,
                               [](std::size_t, const StrategyRunner&, double) {});
}

// Static bond-plus-call payoff q K + p max(S_T - K, 0).
[[nodiscard]] inline double obpi_terminal(double q, double p, double strike, double terminal_asset) {
  if (q < 0.0 || p < 0.0) throw ValidationError("q/p", "holdings must be non-negative");
  return q * strike + p * std::max(terminal_asset - strike, 0.0);
}

}  // namespace cppi
