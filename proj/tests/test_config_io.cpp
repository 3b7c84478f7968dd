#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cppi/cppi.hpp"

namespace {

cppi::RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return cppi::parse_config(in);
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(cppi::format_double(0.1), "0.1");
  EXPECT_EQ(cppi::format_double(100.0), "100");
  EXPECT_EQ(cppi::format_double(-2.5e-7), "-2.5e-07");
  for (double x : {1.0 / 3.0, std::nextafter(1.0, 2.0), 5.29e123, 4.9e-324}) {
    const auto back = cppi::parse_double(cppi::format_double(x));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, x);
  }
}

TEST(Format, StrictParse) {
  EXPECT_EQ(cppi::parse_double(" +0.25\r"), 0.25);
  EXPECT_FALSE(cppi::parse_double(""));
  EXPECT_FALSE(cppi::parse_double("abc"));
  EXPECT_FALSE(cppi::parse_double("1.5x"));
  EXPECT_FALSE(cppi::parse_double("nan"));
  EXPECT_FALSE(cppi::parse_double("inf"));
  EXPECT_FALSE(cppi::parse_double("1e999"));
}

TEST(Config, Defaults) {
  const cppi::RunConfig c;
  EXPECT_EQ(c.strategy.multiplier, 4.0);
  EXPECT_EQ(c.strategy.l_max, 1.0);
  EXPECT_EQ(c.strategy.alpha_min, 0.3);
  EXPECT_EQ(c.strategy.protection_level, 1.0);
  EXPECT_FALSE(c.multiplier_given);
  EXPECT_EQ(c.run.n_paths, 200000u);
  EXPECT_EQ(c.run.seed, 42u);
  EXPECT_EQ(c.run.steps_per_year, 252.0);
  EXPECT_EQ(c.model.r0, 0.05);
}

TEST(Config, ParsesSections) {
  const auto c = parse(
      "; comment\n[model]\nr0 = 0.01\nsigma_v=0.3\n\n[strategy]\nmultiplier = 3\nl_max = 1.5\n"
      "floor_accrual = realized\n[run]\nn_paths = 1000\nseed = 7\nformat = csv\n");
  EXPECT_EQ(c.model.r0, 0.01);
  EXPECT_EQ(c.model.sigma_v, 0.3);
  EXPECT_EQ(c.model.k, cppi::ModelParams{}.k);
  EXPECT_EQ(c.strategy.multiplier, 3.0);
  EXPECT_TRUE(c.multiplier_given);
  EXPECT_EQ(c.strategy.l_max, 1.5);
  EXPECT_EQ(c.strategy.floor_accrual, cppi::FloorAccrual::RealizedShortRate);
  EXPECT_EQ(c.run.n_paths, 1000u);
  EXPECT_EQ(c.run.seed, 7u);
  EXPECT_EQ(c.run.format, "csv");
}

TEST(Config, OvernightRiskSetsMultiplier) {
  cppi::RunConfig c;
  cppi::apply_override(c, "strategy.overnight_risk=0.25");
  EXPECT_EQ(c.strategy.multiplier, 4.0);
  EXPECT_TRUE(c.multiplier_given);
  EXPECT_THROW(cppi::apply_override(c, "strategy.overnight_risk=0"), cppi::ValidationError);
}

TEST(Config, Overrides) {
  cppi::RunConfig c;
  cppi::apply_override(c, "model.r0=0.03");
  cppi::apply_override(c, "strategy.floor_rate=0.02");
  cppi::apply_override(c, "run.out=result.json");
  EXPECT_EQ(c.model.r0, 0.03);
  EXPECT_EQ(c.strategy.floor_rate, 0.02);
  EXPECT_EQ(c.run.out, "result.json");
  EXPECT_THROW(cppi::apply_override(c, "model.r0"), cppi::ValidationError);
  EXPECT_THROW(cppi::apply_override(c, "=3"), cppi::ValidationError);
  EXPECT_THROW(cppi::apply_override(c, "model.r0=abc"), cppi::ValidationError);
  EXPECT_THROW(cppi::apply_override(c, "run.n_paths=1.5"), cppi::ValidationError);
  EXPECT_THROW(cppi::apply_override(c, "run.seed=-1"), cppi::ValidationError);
  EXPECT_THROW(cppi::apply_override(c, "strategy.floor_accrual=daily"), cppi::ValidationError);
}

TEST(Config, UnknownKeyNamesTheKey) {
  try {
    (void)parse("[model]\nkappa = 2\n");
    FAIL() << "no error raised";
  } catch (const cppi::ValidationError& e) {
    EXPECT_EQ(e.field(), "model.kappa");
  }
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW((void)parse("[model]\nv0 = -0.01\n"), cppi::ValidationError);
  EXPECT_THROW((void)parse("[strategy]\nalpha_min = 1.5\n"), cppi::ValidationError);
  EXPECT_THROW((void)parse("[run]\nformat = xml\n"), cppi::ValidationError);
  EXPECT_THROW((void)parse("[run]\nn_paths = 1\n"), cppi::ValidationError);
}

TEST(Config, MalformedIniIsParseError) {
  try {
    (void)parse("[model]\nr0 = 0.01\n[strategy\n");
    FAIL() << "no error raised";
  } catch (const cppi::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Config, IniRoundTrip) {
  auto c = parse("[model]\nr0 = 0.07\nrho_sv = -0.3\n[strategy]\nprotection_level = 0.9\n[run]\nseed = 11\n");
  c.model.theta = 1.0 / 3.0;
  const auto back = parse(cppi::to_ini(c));
  EXPECT_EQ(cppi::to_json(back), cppi::to_json(c));
  EXPECT_EQ(back.model.theta, 1.0 / 3.0);
}

TEST(Config, JsonEchoesEffectiveFloorRate) {
  cppi::RunConfig c;
  c.model.r0 = 0.02;
  EXPECT_EQ(cppi::to_json(c)["strategy"]["floor_rate"].get<double>(), 0.02);
}

TEST(Io, PriceEstimateFormats) {
  const cppi::PriceEstimate e{5.5, 0.25, 5.01, 5.99, 1000, 42};
  EXPECT_EQ(cppi::price_csv_header(), "price,std_error,ci_low,ci_high,n_paths,seed\n");
  EXPECT_EQ(cppi::to_csv_row(e), "5.5,0.25,5.01,5.99,1000,42\n");
  const auto j = cppi::to_json(e);
  EXPECT_EQ(j["price"].get<double>(), 5.5);
  EXPECT_EQ(j["n_paths"].get<std::size_t>(), 1000u);
}

TEST(Io, SweepTableFormats) {
  cppi::SweepTable table;
  table.axis = "alpha_min";
  table.rows.push_back({0.0, {1.5, 0.1, 1.304, 1.696, 10, 1}});
  table.rows.push_back({0.5, {2.0, 0.1, 1.804, 2.196, 10, 1}});
  const auto csv = cppi::to_csv(table);
  EXPECT_EQ(first_line(csv), "alpha_min,price,std_error,ci_low,ci_high");
  EXPECT_NE(csv.find("\n0.5,2,0.1,1.804,2.196\n"), std::string::npos);
  const auto j = cppi::to_json(table);
  EXPECT_EQ(j["axis"], "alpha_min");
  EXPECT_EQ(j["rows"].size(), 2u);
}

TEST(Io, StrategyPathCsv) {
  cppi::MarketPath market;
  market.resize(4);
  market.dt = 0.25;
  for (std::size_t i = 0; i < 4; ++i) {
    market.asset_growth[i] = 1.0;
    market.cash_growth[i] = 1.0;
  }
  cppi::StrategyConfig config;
  config.protection_level = 0.5;
  config.floor_rate = 0.0;
  const auto path = cppi::run_strategy(market, config);
  const auto csv = cppi::to_csv(path, market.dt);
  EXPECT_EQ(first_line(csv), "t,V,F,C,alpha");
  EXPECT_NE(csv.find("\n0.25,100,50,50,1\n"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

}  // namespace
