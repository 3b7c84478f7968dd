#pragma once

#include <cstddef>
#include <string>

#include "json.hpp"

#include "cppi/backtest.hpp"
#include "cppi/format.hpp"
#include "cppi/pricer.hpp"
#include "cppi/strategy.hpp"

// CSV and JSON renderings. Numbers are printed as shortest round-trip
// decimals with '.' as separator regardless of locale.
namespace cppi {

inline nlohmann::ordered_json to_json(const PriceEstimate& e) {
  return {{"price", e.price},       {"std_error", e.std_error}, {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},   {"n_paths", e.n_paths},     {"seed", e.seed}};
}

inline std::string price_csv_header() { return "price,std_error,ci_low,ci_high,n_paths,seed\n"; }

inline std::string to_csv_row(const PriceEstimate& e) {
  return format_double(e.price) + ',' + format_double(e.std_error) + ',' + format_double(e.ci_low) +
         ',' + format_double(e.ci_high) + ',' + std::to_string(e.n_paths) + ',' +
         std::to_string(e.seed) + '\n';
}

inline std::string to_csv(const SweepTable& table) {
  std::string out = table.axis + ",price,std_error,ci_low,ci_high\n";
  for (const auto& row : table.rows) {
    const auto& e = row.estimate;
    out += format_double(row.value) + ',' + format_double(e.price) + ',' +
           format_double(e.std_error) + ',' + format_double(e.ci_low) + ',' +
           format_double(e.ci_high) + '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const SweepTable& table) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto entry = nlohmann::ordered_json{{table.axis, row.value}};
    entry.update(to_json(row.estimate));
    rows.push_back(std::move(entry));
  }
  return {{"axis", table.axis}, {"rows", std::move(rows)}};
}

// Columns t, V, F, C, alpha on the uniform grid of the path.
inline std::string to_csv(const StrategyPath& path, double dt) {
  std::string out = "t,V,F,C,alpha\n";
  for (std::size_t i = 0; i < path.value.size(); ++i) {
    out += format_double(static_cast<double>(i) * dt) + ',' + format_double(path.value[i]) + ',' +
           format_double(path.floor[i]) + ',' + format_double(path.cushion[i]) + ',' +
           format_double(path.alpha[i]) + '\n';
  }
  return out;
}

// date, value_<name>..., floor_pv, exposure_<name>... The floor column is the
// first strategy's.
inline std::string to_csv(const BacktestReport& report) {
  std::string out = "date";
  for (const auto& s : report.strategies) out += ",value_" + s.name;
  out += ",floor_pv";
  for (const auto& s : report.strategies) out += ",exposure_" + s.name;
  out += '\n';
  for (std::size_t i = 0; i < report.dates.size(); ++i) {
    out += format_date(report.dates[i]);
    for (const auto& s : report.strategies) out += ',' + format_double(s.value[i]);
    out += ',' + (report.strategies.empty() ? std::string("0")
                                            : format_double(report.strategies.front().floor_pv[i]));
    for (const auto& s : report.strategies) out += ',' + format_double(s.exposure[i]);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json summary_json(const BacktestReport& report) {
  auto strategies = nlohmann::ordered_json::array();
  for (const auto& s : report.strategies) {
    strategies.push_back({{"name", s.name},
                          {"final_value", s.value.back()},
                          {"final_return", s.final_return},
                          {"min_exposure", s.min_exposure},
                          {"max_drawdown", s.max_drawdown},
                          {"cash_in_date", s.cash_in_date ? nlohmann::ordered_json(format_date(*s.cash_in_date))
                                                          : nlohmann::ordered_json(nullptr)}});
  }
  return {{"start", format_date(report.dates.front())},
          {"end", format_date(report.dates.back())},
          {"observations", report.dates.size()},
          {"rate", report.rate},
          {"horizon_years", report.horizon_years},
          {"strategies", std::move(strategies)}};
}

}  // namespace cppi
