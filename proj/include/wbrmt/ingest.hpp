/**
 * @file ingest.hpp
 * @brief Price panel loading, normalized log-returns and cumulative profiles.
 *
 * A panel is read from a long-format delimited file (one row per
 * ticker/date/price observation), restricted to the dates every surviving
 * ticker shares, and exposed as an immutable N x (T+1) price matrix.
 */

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wbrmt {

inline constexpr std::size_t kMinPanelDates = 32;

/// Column names and delimiter used to read a price file.
struct ColumnMapping {
    std::string ticker = "ticker";
    std::string date = "date";
    std::string price = "price";
    char delimiter = ',';
};

/// Parses "YYYY-MM-DD" optionally followed by "THH:MM[:SS]" or " HH:MM[:SS]".
/// Returns false on malformed or out-of-range input.
bool parse_iso8601(std::string_view text, std::chrono::sys_seconds& out);

class PricePanel {
public:
    PricePanel(std::vector<std::string> tickers, std::vector<std::string> dates,
               Eigen::MatrixXd prices);

    std::size_t n_series() const { return tickers_.size(); }
    std::size_t n_dates() const { return dates_.size(); }
    /// Number of returns per scrip (T).
    std::size_t n_returns() const { return dates_.size() - 1; }

    const std::vector<std::string>& tickers() const { return tickers_; }
    const std::vector<std::string>& dates() const { return dates_; }
    const Eigen::MatrixXd& prices() const { return prices_; }

    /// Row i as a contiguous vector.
    std::vector<double> row(std::size_t i) const;

private:
    std::vector<std::string> tickers_;
    std::vector<std::string> dates_;
    Eigen::MatrixXd prices_;
};

struct RowRejection {
    std::size_t line = 0;
    std::string reason;
};

struct LoadReport {
    ColumnMapping mapping;
    std::vector<RowRejection> rejected_rows;
    /// Tickers dropped for having fewer than kMinPanelDates valid dates.
    std::vector<std::string> dropped_tickers;
    /// Distinct dates seen in the file but absent for at least one ticker.
    std::size_t dropped_dates = 0;
};

struct LoadResult {
    PricePanel panel;
    LoadReport report;
};

LoadResult load_price_panel(const std::filesystem::path& source, const ColumnMapping& mapping = {});

/// Same as load_price_panel but reads from an in-memory buffer.
LoadResult parse_price_panel(std::string_view text, const ColumnMapping& mapping = {});

struct ReturnSeries {
    std::vector<double> values;  ///< R(t), zero mean and unit population variance
    double mean_raw = 0.0;       ///< mean of the raw log-returns r(t)
    double volatility = 0.0;     ///< population standard deviation of r(t)
};

/// r(t) = log X(t+1) - log X(t), then standardized with the population
/// standard deviation. Throws ErrorCode::degenerate_series when the raw
/// returns have zero volatility.
ReturnSeries compute_normalized_returns(std::span<const double> prices);

/// Treats `raw` as r(t) directly and standardizes it.
ReturnSeries normalize_returns(std::span<const double> raw);

/// Cumulative sum Y(t) = sum_{k<=t} R(k).
std::vector<double> build_profile(std::span<const double> returns);

}  // namespace wbrmt
