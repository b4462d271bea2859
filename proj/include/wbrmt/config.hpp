/**
 * @file config.hpp
 * @brief Run configuration for the batch pipeline, stored as JSON.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbrmt/ingest.hpp"
#include "wbrmt/mfdfa.hpp"
#include "wbrmt/rmt.hpp"

namespace wbrmt {

inline constexpr const char* kToolName = "wbrmt";
inline constexpr const char* kToolVersion = "0.1.0";

struct QGridSpec {
    double min = -5.0;
    double max = 5.0;
    double step = 0.25;

    std::vector<double> values() const;
};

struct SynthSpec {
    std::string kind = "white_noise";  ///< white_noise | binomial_cascade | goe | wishart_panel
    std::size_t length = 65536;        ///< white_noise length; wishart_panel returns per series
    std::size_t size = 196;            ///< goe matrix size
    std::size_t n_series = 196;        ///< wishart_panel series count
    int levels = 14;                   ///< binomial_cascade
    double p = 0.75;                   ///< binomial_cascade
    std::uint64_t seed = 1;
};

struct RunConfig {
    std::filesystem::path input;  ///< long-format price file
    ColumnMapping columns;
    std::filesystem::path series;  ///< single-column series file (treated as returns)
    int wavelet = 4;
    std::vector<int> scales;  ///< empty: every scale up to floor(log2 T)
    QGridSpec q_grid;
    double fit_lo = 16.0;
    double fit_hi = 0.0;  ///< <= 0: T/4
    MfdfaMode mfdfa_mode = MfdfaMode::multiscale;
    int mfdfa_scale = 0;
    int unfolding_degree = 5;
    std::size_t histogram_bins = 0;  ///< 0: Freedman-Diaconis
    HistogramConvention histogram_convention = HistogramConvention::density;
    bool standardize = true;
    int rmt_scale = 5;
    std::filesystem::path output_dir = "wbrmt_out";
    std::size_t threads = 1;
    bool quiet = false;
    SynthSpec synth;
};

nlohmann::ordered_json to_json(const RunConfig& config);

/// Throws ErrorCode::config naming the offending key; unknown keys are
/// rejected.
RunConfig config_from_json(const nlohmann::json& j);

/// Reads a JSON config file; syntax errors report line and column.
RunConfig load_config(const std::filesystem::path& path);

void save_config(const RunConfig& config, const std::filesystem::path& path);

/// FNV-1a 64 hash (hex) of the result-affecting part of the config:
/// everything except output_dir, threads and quiet.
std::string config_hash(const RunConfig& config);

}  // namespace wbrmt
