#pragma once

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cppi/error.hpp"
#include "cppi/format.hpp"
#include "cppi/strategy.hpp"

namespace cppi {

using Date = std::chrono::sys_days;

// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
[[nodiscard]] inline std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc{} || ptr != text.data() + pos + len) return std::nullopt;
    return value;
  };
  const auto y = field(0, 4);
  const auto m = field(5, 2);
  const auto d = field(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                        std::chrono::month{static_cast<unsigned>(*m)},
                                        std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

[[nodiscard]] inline std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

struct PriceSeries {
  std::string name;
  std::vector<Date> dates;
  std::vector<double> prices;

  [[nodiscard]] std::size_t size() const noexcept { return dates.size(); }
};

// Reads "date,price" CSV. Blank lines are ignored; line numbers in errors
// count the header as line 1.
[[nodiscard]] inline PriceSeries load_series(std::istream& in, std::string name = {}) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  PriceSeries series;
  series.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      if (text != "date,price") throw ParseError(line_no, "expected header 'date,price'");
      header_seen = true;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(line_no, "expected exactly two fields");
    const auto date = parse_date(trim(text.substr(0, comma)));
    if (!date) throw ParseError(line_no, "invalid date '" + std::string(text.substr(0, comma)) + "'");
    const auto price = parse_double(text.substr(comma + 1));
    if (!price) throw ParseError(line_no, "invalid price '" + std::string(text.substr(comma + 1)) + "'");
    if (!(*price > 0.0)) throw NonPositivePrice(line_no, "price must be positive");
    if (!series.dates.empty() && *date <= series.dates.back())
      throw NonMonotoneDates(line_no, "dates must be strictly increasing");
    series.dates.push_back(*date);
    series.prices.push_back(*price);
  }
  if (!header_seen) throw ParseError(line_no, "missing header 'date,price'");
  if (series.dates.empty()) throw ParseError(line_no, "no observations");
  return series;
}

[[nodiscard]] inline PriceSeries load_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_series(in, path);
}

struct BacktestStrategy {
  std::string name;
  StrategyConfig config;
};

struct StrategyTrace {
  std::string name;
  std::vector<double> value;
  std::vector<double> floor_pv;
  std::vector<double> exposure;  // weight chosen on each date
  double final_return = 0.0;
  double min_exposure = 0.0;
  double max_drawdown = 0.0;
  std::optional<Date> cash_in_date;
};

struct BacktestReport {
  std::vector<Date> dates;
  double rate = 0.0;
  double horizon_years = 0.0;
  std::vector<StrategyTrace> strategies;
};

// Year fraction between two dates, ACT/365.
[[nodiscard]] inline double year_fraction(Date from, Date to) noexcept {
  return static_cast<double>((to - from).count()) / 365.0;
}

// Evolves every strategy over the series with a constant risk-free rate. The
// floor is the present value at r_const of PL * V_0 due on the last date.
[[nodiscard]] inline BacktestReport run_backtest(const PriceSeries& series,
                                                 std::span<const BacktestStrategy> strategies,
                                                 double r_const) {
  if (series.size() < 2) throw ValidationError("series", "needs at least two observations");
  if (series.prices.size() != series.size()) throw ValidationError("series", "dates/prices mismatch");
  if (!std::isfinite(r_const)) throw ValidationError("rate", "must be finite");
  const std::size_t n = series.size();
  BacktestReport report{series.dates, r_const, year_fraction(series.dates.front(), series.dates.back()), {}};
  const double horizon = report.horizon_years;

  for (const auto& strategy : strategies) {
    const auto& config = strategy.config;
    config.validate();
    (void)initial_floor(config, r_const, horizon);
    const double guarantee = config.protection_level * config.initial_value;
    auto floor_at = [&](std::size_t i) {
      return i + 1 == n ? guarantee
                        : guarantee * std::exp(-r_const * (horizon - year_fraction(series.dates.front(),
                                                                                   series.dates[i])));
    };

    StrategyTrace trace;
    trace.name = strategy.name;
    trace.value.reserve(n);
    trace.floor_pv.reserve(n);
    trace.exposure.reserve(n);
    StrategyRunner runner(config, floor_at(0));
    double peak = runner.value();
    for (std::size_t i = 0; i < n; ++i) {
      const double alpha = runner.rebalance();
      if (runner.cashed_in() && !trace.cash_in_date) trace.cash_in_date = series.dates[i];
      trace.value.push_back(runner.value());
      trace.floor_pv.push_back(runner.floor());
      trace.exposure.push_back(alpha);
      peak = std::max(peak, runner.value());
      trace.max_drawdown = std::max(trace.max_drawdown, 1.0 - runner.value() / peak);
      if (i + 1 == n) break;
      const double dt = year_fraction(series.dates[i], series.dates[i + 1]);
      runner.advance(series.prices[i + 1] / series.prices[i], std::exp(r_const * dt), floor_at(i + 1));
    }
    trace.final_return = trace.value.back() / config.initial_value - 1.0;
    trace.min_exposure = *std::min_element(trace.exposure.begin(), trace.exposure.end());
    report.strategies.push_back(std::move(trace));
  }
  return report;
}

}  // namespace cppi
