#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cppi/error.hpp"
#include "cppi/parallel.hpp"
#include "cppi/random.hpp"

namespace cppi {

// Coefficients of the risk-neutral Heston (variance) / Vasicek-type (rate)
// market. `v0` and `theta` are variances, not volatilities.
struct ModelParams {
  double s0 = 100.0;
  double v0 = 0.04;
  double k = 1.25;  // variance mean-reversion speed
  double theta = 0.04;
  double sigma_v = 0.2;
  double r0 = 0.05;
  double nu = 1.25;  // rate mean-reversion speed
  double beta = 0.05;
  double sigma_r = 0.025;
  double gamma = 0.5;  // exponent of the variance in the rate diffusion
  double rho_sv = -0.5;
  double rho_sr = -0.2;

  // Variance/rate correlation is implied by the other two, never stored.
  [[nodiscard]] double rho_vr() const noexcept { return rho_sv * rho_sr; }

  void validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
      if (!ok) throw ValidationError(field, what);
    };
    require(std::isfinite(s0) && s0 > 0.0, "s0", "must be positive");
    require(std::isfinite(v0) && v0 >= 0.0, "v0", "must be non-negative");
    require(std::isfinite(k) && k > 0.0, "k", "must be positive");
    require(std::isfinite(theta) && theta > 0.0, "theta", "must be positive");
    require(std::isfinite(sigma_v) && sigma_v >= 0.0, "sigma_v", "must be non-negative");
    require(std::isfinite(r0), "r0", "must be finite");
    require(std::isfinite(nu) && nu > 0.0, "nu", "must be positive");
    require(std::isfinite(beta), "beta", "must be finite");
    require(std::isfinite(sigma_r) && sigma_r >= 0.0, "sigma_r", "must be non-negative");
    require(gamma >= 0.0 && gamma <= 1.0, "gamma", "must lie in [0, 1]");
    require(rho_sv >= -1.0 && rho_sv <= 1.0, "rho_sv", "must lie in [-1, 1]");
    require(rho_sr >= -1.0 && rho_sr <= 1.0, "rho_sr", "must lie in [-1, 1]");
  }
};

// Uniform grid 0 = t_0 < ... < t_n = maturity.
class TimeGrid {
public:
  TimeGrid(double maturity, std::size_t n_steps) : maturity_(maturity), n_steps_(n_steps) {
    if (!(std::isfinite(maturity) && maturity > 0.0))
      throw ValidationError("maturity", "must be positive");
    if (n_steps == 0) throw ValidationError("n_steps", "must be at least 1");
  }

  // One step per trading day (rounded), at least one step.
  static TimeGrid with_steps_per_year(double maturity, double steps_per_year) {
    if (!(std::isfinite(steps_per_year) && steps_per_year > 0.0))
      throw ValidationError("steps_per_year", "must be positive");
    if (!(std::isfinite(maturity) && maturity > 0.0))
      throw ValidationError("maturity", "must be positive");
    const auto n = static_cast<std::size_t>(std::llround(maturity * steps_per_year));
    return {maturity, n == 0 ? 1 : n};
  }

  [[nodiscard]] double maturity() const noexcept { return maturity_; }
  [[nodiscard]] std::size_t steps() const noexcept { return n_steps_; }
  [[nodiscard]] double dt() const noexcept { return maturity_ / static_cast<double>(n_steps_); }
  [[nodiscard]] double time(std::size_t i) const noexcept {
    return i == n_steps_ ? maturity_ : dt() * static_cast<double>(i);
  }

private:
  double maturity_;
  std::size_t n_steps_;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

[[nodiscard]] inline Matrix3 correlation_matrix(double rho_sv, double rho_sr) noexcept {
  const double rho_vr = rho_sv * rho_sr;
  return {{{1.0, rho_sv, rho_sr}, {rho_sv, 1.0, rho_vr}, {rho_sr, rho_vr, 1.0}}};
}

// Lower-triangular L with L * L^T equal to the (asset, variance, rate)
// correlation matrix. Zero pivots are allowed when the remaining column is
// zero as well, so perfectly correlated boundaries still factor.
[[nodiscard]] inline Matrix3 correlation_factor(double rho_sv, double rho_sr) {
  constexpr double tol = 1e-12;
  const Matrix3 a = correlation_matrix(rho_sv, rho_sr);
  Matrix3 l{};
  for (std::size_t j = 0; j < 3; ++j) {
    double pivot = a[j][j];
    for (std::size_t p = 0; p < j; ++p) pivot -= l[j][p] * l[j][p];
    if (pivot < -tol) throw NonPsdError("correlation matrix is not positive semi-definite");
    l[j][j] = pivot > tol ? std::sqrt(pivot) : 0.0;
    for (std::size_t i = j + 1; i < 3; ++i) {
      double off = a[i][j];
      for (std::size_t p = 0; p < j; ++p) off -= l[i][p] * l[j][p];
      if (l[j][j] == 0.0) {
        if (std::abs(off) > tol) throw NonPsdError("correlation matrix is not positive semi-definite");
        l[i][j] = 0.0;
      } else {
        l[i][j] = off / l[j][j];
      }
    }
  }
  return l;
}

// One discretized trajectory. Vectors indexed by grid point hold n+1 values;
// per-step vectors hold n.
struct MarketPath {
  double dt = 0.0;
  std::vector<double> asset;
  std::vector<double> variance;
  std::vector<double> rate;
  std::vector<double> discount;      // exp(-sum_{j<i} r_j dt)
  std::vector<double> asset_growth;  // S_{i+1} / S_i, exactly as applied
  std::vector<double> cash_growth;   // exp(r_i dt)

  [[nodiscard]] std::size_t steps() const noexcept { return asset_growth.size(); }

  void resize(std::size_t n_steps) {
    asset.resize(n_steps + 1);
    variance.resize(n_steps + 1);
    rate.resize(n_steps + 1);
    discount.resize(n_steps + 1);
    asset_growth.resize(n_steps);
    cash_growth.resize(n_steps);
  }
};

// exp(-sum r_{t_i} dt) over all steps, left-endpoint rule.
[[nodiscard]] inline double pathwise_discount(const MarketPath& path) noexcept {
  double integral = 0.0;
  for (std::size_t i = 0; i < path.steps(); ++i) integral += path.rate[i] * path.dt;
  return std::exp(-integral);
}

// Full-truncation Euler for the variance, log-Euler for the asset and Euler
// for the rate, driven by Philox substreams keyed on (seed, path index).
class MarketSimulator {
public:
  MarketSimulator(const ModelParams& params, const TimeGrid& grid, std::uint64_t seed)
      : params_(params), grid_(grid), generator_(seed), seed_(seed) {
    params_.validate();
    factor_ = correlation_factor(params_.rho_sv, params_.rho_sr);
  }

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  [[nodiscard]] const TimeGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const Matrix3& factor() const noexcept { return factor_; }

  void simulate(std::uint64_t path_index, MarketPath& out) const {
    const std::size_t n = grid_.steps();
    const double dt = grid_.dt();
    const double sqrt_dt = std::sqrt(dt);
    const auto& p = params_;
    const auto& l = factor_;
    out.resize(n);
    out.dt = dt;

    double s = p.s0;
    double v = p.v0;
    double r = p.r0;
    double integral = 0.0;
    out.asset[0] = s;
    out.variance[0] = v;
    out.rate[0] = r;
    out.discount[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto z = normal_block(generator_, path_index, i);
      const double eps_s = z[0];
      const double eps_v = l[1][0] * z[0] + l[1][1] * z[1];
      const double eps_r = l[2][0] * z[0] + l[2][1] * z[1] + l[2][2] * z[2];

      const double v_pos = v > 0.0 ? v : 0.0;
      const double vol_sqrt_dt = std::sqrt(v_pos) * sqrt_dt;
      const double growth = std::exp((r - 0.5 * v_pos) * dt + vol_sqrt_dt * eps_s);
      out.asset_growth[i] = growth;
      out.cash_growth[i] = std::exp(r * dt);
      integral += r * dt;

      const double next_v = v + p.k * (p.theta - v_pos) * dt + p.sigma_v * vol_sqrt_dt * eps_v;
      const double next_r =
          r + p.nu * (p.beta - r) * dt + p.sigma_r * rate_vol_scale(v_pos) * sqrt_dt * eps_r;

      s *= growth;
      v = next_v;
      r = next_r;
      out.asset[i + 1] = s;
      out.variance[i + 1] = v > 0.0 ? v : 0.0;
      out.rate[i + 1] = r;
      out.discount[i + 1] = std::exp(-integral);
    }
  }

private:
  [[nodiscard]] double rate_vol_scale(double v_pos) const noexcept {
    if (params_.gamma == 0.5) return std::sqrt(v_pos);
    if (params_.gamma == 0.0) return 1.0;
    if (params_.gamma == 1.0) return v_pos;
    return std::pow(v_pos, params_.gamma);
  }

  ModelParams params_;
  TimeGrid grid_;
  Philox4x32 generator_;
  std::uint64_t seed_;
  Matrix3 factor_{};
};

// Streams paths 0..n_paths-1 through visitor(path_index, path, worker) without
// keeping them. Each worker reuses one path buffer.
template <class Visitor>
void for_each_path(const MarketSimulator& sim, std::size_t n_paths, std::size_t workers,
                   Visitor&& visitor) {
  parallel_for(n_paths, workers, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    MarketPath buffer;
    for (std::size_t i = begin; i < end; ++i) {
      sim.simulate(i, buffer);
      visitor(i, static_cast<const MarketPath&>(buffer), worker);
    }
  });
}

[[nodiscard]] inline std::vector<MarketPath> simulate_paths(const ModelParams& params,
                                                            const TimeGrid& grid,
                                                            std::size_t n_paths, std::uint64_t seed,
                                                            std::size_t workers = default_worker_count()) {
  if (n_paths == 0) throw ValidationError("n_paths", "must be at least 1");
  const MarketSimulator sim(params, grid, seed);
  std::vector<MarketPath> batch(n_paths);
  parallel_for(n_paths, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) sim.simulate(i, batch[i]);
  });
  return batch;
}

}  // namespace cppi
