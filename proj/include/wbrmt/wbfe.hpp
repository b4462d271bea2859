/**
 * @file wbfe.hpp
 * @brief Wavelet-based fluctuation extraction.
 *
 * Z_a = Y - T_a(Y), where T_a is the low-pass reconstruction at scale a.
 * Edge correction averages the forward extraction with the extraction of
 * the time-reversed profile (reversed back), over the whole series.
 * Scale a = 1 removes only the finest detail level from the trend, so the
 * fluctuation band widens toward lower frequencies as a grows.
 */

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wbrmt/ingest.hpp"
#include "wbrmt/wavelet.hpp"

namespace wbrmt {

enum class EdgeCorrection { none, reverse_average };

struct FluctuationSeries {
    int scale = 0;
    std::vector<double> values;
    bool edge_corrected = false;
};

struct FluctuationPanel {
    int scale = 0;
    Eigen::MatrixXd matrix;  ///< N x T, one row per scrip
    std::vector<std::string> tickers;
};

FluctuationSeries extract_fluctuations(std::span<const double> profile, const WaveletFilter& filter, int scale,
                                       EdgeCorrection edge = EdgeCorrection::reverse_average);

/// Profiles of every scrip in `panel` (normalized returns, cumulated).
/// Failures name the offending ticker.
std::vector<std::vector<double>> panel_profiles(const PricePanel& panel);

FluctuationPanel fluctuation_panel(const PricePanel& panel, const WaveletFilter& filter, int scale,
                                   std::size_t threads = 1);

/// One panel per requested scale, sharing the profile computation.
std::vector<FluctuationPanel> fluctuation_panels(std::span<const std::vector<double>> profiles,
                                                 std::span<const std::string> tickers, const WaveletFilter& filter,
                                                 std::span<const int> scales, std::size_t threads = 1);

}  // namespace wbrmt
