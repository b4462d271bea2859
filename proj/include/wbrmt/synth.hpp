/**
 * @file synth.hpp
 * @brief Seeded synthetic generators used as analytic oracles.
 *
 * Randomness comes from std::mt19937_64, whose output sequence is fixed by
 * the C++ standard. Uniforms take the top 53 bits of each draw and Gaussians
 * use the Box-Muller transform on consecutive uniform pairs, so every
 * generator is a pure function of its parameters and seed on any platform.
 */

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "wbrmt/ingest.hpp"

namespace wbrmt {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1).
    double uniform();
    double gaussian();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::vector<double> white_noise(std::size_t length, std::uint64_t seed);

/// Deterministic binomial multiplicative cascade of 2^levels cells:
/// cell k carries p^n(k) (1-p)^(levels-n(k)), n(k) = number of set bits of k.
/// Requires 0.5 <= p < 1 and levels >= 8.
std::vector<double> binomial_cascade(int levels, double p);

/// Closed-form generalized Hurst exponent of the cascade's increments:
/// h(q) = 1/q - ln(p^q + (1-p)^q) / (q ln 2); at q = 0 the limit is used.
double cascade_hurst(double q, double p);

/// GOE sample (M + M^T) / 2 with M i.i.d. standard normal.
Eigen::MatrixXd goe_matrix(std::size_t size, std::uint64_t seed);

/// n_series x length matrix of i.i.d. standard normal rows.
Eigen::MatrixXd wishart_panel(std::size_t n_series, std::size_t length, std::uint64_t seed);

/// Price panel whose log-returns are the rows of wishart_panel(n_series,
/// n_dates - 1, seed) scaled by `daily_vol`, starting at 100 on consecutive
/// calendar days from 2000-01-01. Tickers are S000, S001, ...
PricePanel wishart_price_panel(std::size_t n_series, std::size_t n_dates, std::uint64_t seed,
                               double daily_vol = 0.01);

}  // namespace wbrmt
