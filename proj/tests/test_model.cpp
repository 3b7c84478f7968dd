#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cppi/model.hpp"
#include "cppi/pricer.hpp"

namespace {

using cppi::Matrix3;
using cppi::ModelParams;

Matrix3 reconstruct(const Matrix3& l) {
  Matrix3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 3; ++p) out[i][j] += l[i][p] * l[j][p];
  return out;
}

void expect_reconstructs(double rho_sv, double rho_sr) {
  const Matrix3 target = cppi::correlation_matrix(rho_sv, rho_sr);
  const Matrix3 got = reconstruct(cppi::correlation_factor(rho_sv, rho_sr));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(got[i][j], target[i][j], 1e-12) << "rho=(" << rho_sv << "," << rho_sr << ") entry " << i << j;
}

TEST(CorrelationFactor, UncorrelatedIsIdentity) {
  const Matrix3 l = cppi::correlation_factor(0.0, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(l[i][j], i == j ? 1.0 : 0.0);
}

TEST(CorrelationFactor, ReferenceCorrelations) {
  const Matrix3 target = cppi::correlation_matrix(-0.5, -0.2);
  EXPECT_DOUBLE_EQ(target[1][2], 0.1);
  expect_reconstructs(-0.5, -0.2);
  const Matrix3 l = cppi::correlation_factor(-0.5, -0.2);
  EXPECT_EQ(l[0][1], 0.0);
  EXPECT_EQ(l[0][2], 0.0);
  EXPECT_EQ(l[1][2], 0.0);
}

TEST(CorrelationFactor, PerfectCorrelationBoundary) {
  const Matrix3 l = cppi::correlation_factor(1.0, 0.0);
  EXPECT_EQ(l[1][0], 1.0);
  EXPECT_EQ(l[1][1], 0.0);
  expect_reconstructs(1.0, 0.0);
  expect_reconstructs(-1.0, 1.0);
}

TEST(CorrelationFactor, RandomPairsReconstruct) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rho(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) expect_reconstructs(rho(rng), rho(rng));
}

TEST(CorrelationFactor, OutOfRangeIsNotPsd) {
  EXPECT_THROW((void)cppi::correlation_factor(1.5, 0.0), cppi::NonPsdError);
}

TEST(ModelParams, ValidationNamesField) {
  ModelParams p;
  p.k = 0.0;
  try {
    p.validate();
    FAIL() << "expected ValidationError";
  } catch (const cppi::ValidationError& e) {
    EXPECT_EQ(e.field(), "k");
  }
  p = ModelParams{};
  p.gamma = 1.5;
  EXPECT_THROW(p.validate(), cppi::ValidationError);
  p = ModelParams{};
  p.rho_sr = -1.01;
  EXPECT_THROW(p.validate(), cppi::ValidationError);
  EXPECT_NO_THROW(ModelParams{}.validate());
}

TEST(TimeGrid, UniformAndExactEndpoint) {
  const auto grid = cppi::TimeGrid::with_steps_per_year(10.0, 252.0);
  EXPECT_EQ(grid.steps(), 2520u);
  EXPECT_EQ(grid.time(0), 0.0);
  EXPECT_EQ(grid.time(grid.steps()), 10.0);
  EXPECT_EQ(cppi::TimeGrid::with_steps_per_year(0.001, 252.0).steps(), 1u);
  EXPECT_THROW(cppi::TimeGrid(-1.0, 10), cppi::ValidationError);
  EXPECT_THROW(cppi::TimeGrid(1.0, 0), cppi::ValidationError);
}

cppi::MarketPath constant_rate_path(double rate, double maturity, std::size_t steps) {
  cppi::MarketPath path;
  path.resize(steps);
  path.dt = maturity / static_cast<double>(steps);
  std::fill(path.rate.begin(), path.rate.end(), rate);
  return path;
}

TEST(PathwiseDiscount, ClosedFormExponentials) {
  EXPECT_NEAR(cppi::pathwise_discount(constant_rate_path(0.05, 1.0, 252)), std::exp(-0.05), 1e-12);
  EXPECT_NEAR(cppi::pathwise_discount(constant_rate_path(0.05, 1.0, 252)), 0.951229, 5e-7);
  EXPECT_EQ(cppi::pathwise_discount(constant_rate_path(0.0, 1.0, 252)), 1.0);
  EXPECT_NEAR(cppi::pathwise_discount(constant_rate_path(0.05, 10.0, 2520)), std::exp(-0.5), 1e-12);
  EXPECT_NEAR(cppi::pathwise_discount(constant_rate_path(0.05, 10.0, 2520)), 0.606531, 5e-7);
}

TEST(Simulation, DegenerateDiffusionsHoldStatesConstant) {
  ModelParams p;
  p.sigma_v = 0.0;
  p.sigma_r = 0.0;
  p.v0 = p.theta = 0.04;
  p.r0 = p.beta = 0.05;
  const auto batch = cppi::simulate_paths(p, cppi::TimeGrid(1.0, 252), 20, 3, 1);
  for (const auto& path : batch) {
    for (std::size_t i = 0; i < path.asset.size(); ++i) {
      EXPECT_EQ(path.variance[i], 0.04);
      EXPECT_EQ(path.rate[i], 0.05);
    }
  }
}

TEST(Simulation, DegenerateLogAssetMoments) {
  ModelParams p;
  p.sigma_v = 0.0;
  p.sigma_r = 0.0;
  p.v0 = p.theta = 0.04;
  p.r0 = p.beta = 0.05;
  const cppi::MarketSimulator sim(p, cppi::TimeGrid(1.0, 252), 99);
  constexpr std::size_t n = 100'000;
  std::vector<double> log_terminal(n);
  cppi::for_each_path(sim, n, cppi::default_worker_count(),
                      [&](std::size_t i, const cppi::MarketPath& path, std::size_t) {
                        log_terminal[i] = std::log(path.asset.back());
                      });
  const auto stats = cppi::summarize(log_terminal, 99);
  const double expected_mean = std::log(100.0) + (0.05 - 0.02) * 1.0;
  EXPECT_LE(std::abs(stats.price - expected_mean), 3.0 * stats.std_error);
  const double variance = stats.std_error * stats.std_error * static_cast<double>(n);
  EXPECT_NEAR(variance / 0.04, 1.0, 0.05);
}

TEST(Simulation, DeterministicAcrossWorkerCounts) {
  const cppi::TimeGrid grid(0.5, 40);
  const auto one = cppi::simulate_paths(ModelParams{}, grid, 64, 17, 1);
  const auto many = cppi::simulate_paths(ModelParams{}, grid, 64, 17, 8);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].asset, many[i].asset);
    EXPECT_EQ(one[i].variance, many[i].variance);
    EXPECT_EQ(one[i].rate, many[i].rate);
    EXPECT_EQ(one[i].discount, many[i].discount);
  }
  const auto other_seed = cppi::simulate_paths(ModelParams{}, grid, 1, 18, 1);
  EXPECT_NE(one[0].asset, other_seed[0].asset);
}

TEST(Simulation, LongerGridExtendsShorterOne) {
  const auto short_paths = cppi::simulate_paths(ModelParams{}, cppi::TimeGrid(1.0, 252), 4, 5, 1);
  const auto long_paths = cppi::simulate_paths(ModelParams{}, cppi::TimeGrid(2.0, 504), 4, 5, 1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j <= 252; ++j) EXPECT_EQ(short_paths[i].asset[j], long_paths[i].asset[j]);
}

TEST(Simulation, PathInvariants) {
  ModelParams p;
  p.sigma_v = 1.0;  // violates the Feller condition, so truncation is exercised
  p.v0 = 0.01;
  const auto batch = cppi::simulate_paths(p, cppi::TimeGrid(2.0, 504), 200, 8, 2);
  for (const auto& path : batch) {
    EXPECT_EQ(path.discount.front(), 1.0);
    EXPECT_EQ(path.discount.back(), cppi::pathwise_discount(path));
    for (std::size_t i = 0; i < path.asset.size(); ++i) {
      EXPECT_GT(path.asset[i], 0.0);
      EXPECT_GE(path.variance[i], 0.0);
      EXPECT_GT(path.discount[i], 0.0);
    }
    for (std::size_t i = 0; i < path.steps(); ++i) {
      EXPECT_EQ(path.asset[i + 1], path.asset[i] * path.asset_growth[i]);
      if (path.rate[i] > 0.0) {
        EXPECT_LT(path.discount[i + 1], path.discount[i]);
      }
    }
  }
}

class Martingale : public ::testing::TestWithParam<double> {};

TEST_P(Martingale, DiscountedAssetHasSpotMean) {
  const cppi::MarketSimulator sim(ModelParams{}, cppi::TimeGrid::with_steps_per_year(GetParam(), 252), 1234);
  constexpr std::size_t n = 100'000;
  std::vector<double> discounted(n);
  cppi::for_each_path(sim, n, cppi::default_worker_count(),
                      [&](std::size_t i, const cppi::MarketPath& path, std::size_t) {
                        discounted[i] = path.discount.back() * path.asset.back();
                      });
  const auto stats = cppi::summarize(discounted, 1234);
  EXPECT_LE(std::abs(stats.price - 100.0), 3.0 * stats.std_error)
      << "mean " << stats.price << " se " << stats.std_error;
}

INSTANTIATE_TEST_SUITE_P(Maturities, Martingale, ::testing::Values(1.0, 5.0));

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Simulation, IncrementCorrelations) {
  // Increments over the first ten steps of each of 1e5 paths, pooled.
  const cppi::MarketSimulator sim(ModelParams{}, cppi::TimeGrid(1.0, 252), 77);
  constexpr std::size_t n = 100'000;
  constexpr std::size_t steps = 10;
  std::vector<double> dlog_s(n * steps), dv(n * steps), dr(n * steps);
  cppi::for_each_path(sim, n, cppi::default_worker_count(),
                      [&](std::size_t i, const cppi::MarketPath& path, std::size_t) {
                        for (std::size_t j = 0; j < steps; ++j) {
                          dlog_s[i * steps + j] = std::log(path.asset_growth[j]);
                          dv[i * steps + j] = path.variance[j + 1] - path.variance[j];
                          dr[i * steps + j] = path.rate[j + 1] - path.rate[j];
                        }
                      });
  EXPECT_NEAR(correlation(dlog_s, dv), -0.5, 0.05);
  EXPECT_NEAR(correlation(dlog_s, dr), -0.2, 0.05);
  EXPECT_NEAR(correlation(dv, dr), 0.1, 0.05);
}

}  // namespace
