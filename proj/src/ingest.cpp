#include "wbrmt/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "wbrmt/error.hpp"

namespace wbrmt {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delimiter) {
            fields.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void fail(ErrorCode code, const std::string& message) {
    throw Error(code, "ingest", message);
}

}  // namespace

bool parse_iso8601(std::string_view text, std::chrono::sys_seconds& out) {
    using namespace std::chrono;
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return false;
    int y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d))
        return false;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return false;

    int hh = 0, mm = 0, ss = 0;
    if (text.size() > 10) {
        if (text[10] != 'T' && text[10] != ' ') return false;
        const auto clock = text.substr(11);
        if (clock.size() != 5 && clock.size() != 8) return false;
        if (clock[2] != ':' || !parse_uint(clock.substr(0, 2), hh) || !parse_uint(clock.substr(3, 2), mm))
            return false;
        if (clock.size() == 8 && (clock[5] != ':' || !parse_uint(clock.substr(6, 2), ss))) return false;
        if (hh > 23 || mm > 59 || ss > 60) return false;
    }
    out = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
    return true;
}

PricePanel::PricePanel(std::vector<std::string> tickers, std::vector<std::string> dates,
                       Eigen::MatrixXd prices)
    : tickers_(std::move(tickers)), dates_(std::move(dates)), prices_(std::move(prices)) {
    if (tickers_.size() < 2) fail(ErrorCode::invalid_input, "panel needs at least 2 tickers");
    if (dates_.size() < kMinPanelDates)
        fail(ErrorCode::invalid_input, "panel needs at least " + std::to_string(kMinPanelDates) + " dates");
    if (static_cast<std::size_t>(prices_.rows()) != tickers_.size() ||
        static_cast<std::size_t>(prices_.cols()) != dates_.size())
        fail(ErrorCode::invalid_input, "price matrix shape does not match tickers x dates");
    if (!(prices_.array() > 0.0).all() || !prices_.allFinite())
        fail(ErrorCode::invalid_input, "all prices must be finite and strictly positive");

    std::chrono::sys_seconds prev{}, cur{};
    for (std::size_t t = 0; t < dates_.size(); ++t) {
        if (!parse_iso8601(dates_[t], cur)) fail(ErrorCode::invalid_input, "malformed date '" + dates_[t] + "'");
        if (t > 0 && cur <= prev) fail(ErrorCode::invalid_input, "dates must be strictly increasing");
        prev = cur;
    }
}

std::vector<double> PricePanel::row(std::size_t i) const {
    std::vector<double> out(n_dates());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = prices_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
    return out;
}

LoadResult parse_price_panel(std::string_view text, const ColumnMapping& mapping) {
    LoadReport report;
    report.mapping = mapping;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    auto next_line = [&](std::string_view& line) {
        while (pos < text.size()) {
            const auto end = text.find('\n', pos);
            line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
            pos = end == std::string_view::npos ? text.size() : end + 1;
            ++line_no;
            const auto t = trim(line);
            if (!t.empty() && t.front() != '#') return true;
        }
        return false;
    };

    std::string_view line;
    if (!next_line(line)) fail(ErrorCode::invalid_input, "input is empty");
    const auto header = split(line, mapping.delimiter);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) fail(ErrorCode::invalid_input, "missing column '" + name + "' in header");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ticker_col = column(mapping.ticker);
    const std::size_t date_col = column(mapping.date);
    const std::size_t price_col = column(mapping.price);

    struct Series {
        std::map<std::chrono::sys_seconds, double> prices;
    };
    std::vector<std::string> order;
    std::unordered_map<std::string, Series> by_ticker;
    std::map<std::chrono::sys_seconds, std::string> date_text;

    while (next_line(line)) {
        const auto fields = split(line, mapping.delimiter);
        if (fields.size() != header.size()) {
            report.rejected_rows.push_back({line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                                         std::to_string(fields.size())});
            continue;
        }
        const std::string ticker{fields[ticker_col]};
        if (ticker.empty()) {
            report.rejected_rows.push_back({line_no, "empty ticker"});
            continue;
        }
        std::chrono::sys_seconds when;
        if (!parse_iso8601(fields[date_col], when)) {
            report.rejected_rows.push_back({line_no, "malformed date '" + std::string(fields[date_col]) + "'"});
            continue;
        }
        const auto price_text = fields[price_col];
        double price = 0.0;
        auto [ptr, ec] = std::from_chars(price_text.data(), price_text.data() + price_text.size(), price);
        if (ec != std::errc{} || ptr != price_text.data() + price_text.size() || !std::isfinite(price)) {
            report.rejected_rows.push_back({line_no, "non-numeric price '" + std::string(price_text) + "'"});
            continue;
        }
        if (price <= 0.0) {
            report.rejected_rows.push_back({line_no, "nonpositive price " + std::string(price_text)});
            continue;
        }
        auto [it, fresh] = by_ticker.try_emplace(ticker);
        if (fresh) order.push_back(ticker);
        if (!it->second.prices.emplace(when, price).second) {
            report.rejected_rows.push_back({line_no, "duplicate date for " + ticker});
            continue;
        }
        date_text.try_emplace(when, std::string(fields[date_col]));
    }

    std::vector<std::string> kept;
    for (const auto& ticker : order) {
        if (by_ticker[ticker].prices.size() < kMinPanelDates)
            report.dropped_tickers.push_back(ticker);
        else
            kept.push_back(ticker);
    }
    if (kept.size() < 2)
        fail(ErrorCode::invalid_input, "fewer than 2 tickers with at least " + std::to_string(kMinPanelDates) +
                                           " valid dates (" + std::to_string(kept.size()) + " survived)");

    std::vector<std::chrono::sys_seconds> common;
    for (const auto& [when, price] : by_ticker[kept.front()].prices) {
        const bool everywhere = std::all_of(kept.begin() + 1, kept.end(), [&](const std::string& t) {
            return by_ticker[t].prices.count(when) > 0;
        });
        if (everywhere) common.push_back(when);
    }
    if (common.size() < kMinPanelDates)
        fail(ErrorCode::invalid_input, "only " + std::to_string(common.size()) +
                                           " dates are shared by all tickers; need " +
                                           std::to_string(kMinPanelDates));

    std::size_t all_dates = 0;
    {
        std::map<std::chrono::sys_seconds, int> seen;
        for (const auto& t : kept)
            for (const auto& [when, p] : by_ticker[t].prices) seen[when] = 1;
        all_dates = seen.size();
    }
    report.dropped_dates = all_dates - common.size();

    Eigen::MatrixXd prices(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(common.size()));
    std::vector<std::string> dates;
    dates.reserve(common.size());
    for (const auto& when : common) dates.push_back(date_text[when]);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& series = by_ticker[kept[i]].prices;
        for (std::size_t t = 0; t < common.size(); ++t)
            prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = series.at(common[t]);
    }
    return {PricePanel(std::move(kept), std::move(dates), std::move(prices)), std::move(report)};
}

LoadResult load_price_panel(const std::filesystem::path& source, const ColumnMapping& mapping) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "ingest", "cannot open " + source.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_price_panel(buffer.str(), mapping);
}

ReturnSeries normalize_returns(std::span<const double> raw) {
    if (raw.size() < 2) fail(ErrorCode::invalid_input, "need at least 2 returns");
    const double n = static_cast<double>(raw.size());
    const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
    double ss = 0.0;
    for (double r : raw) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 0.0) || sd <= 1e-14 * std::max(1.0, std::abs(mean)))
        fail(ErrorCode::degenerate_series, "zero volatility (constant series)");

    ReturnSeries out;
    out.mean_raw = mean;
    out.volatility = sd;
    out.values.resize(raw.size());
    for (std::size_t t = 0; t < raw.size(); ++t) out.values[t] = (raw[t] - mean) / sd;

    // Re-centre once more so the zero-mean invariant holds to rounding.
    const double residual = std::accumulate(out.values.begin(), out.values.end(), 0.0) / n;
    for (double& v : out.values) v -= residual;
    return out;
}

ReturnSeries compute_normalized_returns(std::span<const double> prices) {
    if (prices.size() < 3) fail(ErrorCode::invalid_input, "need at least 3 prices");
    std::vector<double> raw(prices.size() - 1);
    for (std::size_t t = 0; t + 1 < prices.size(); ++t) {
        if (!(prices[t] > 0.0) || !(prices[t + 1] > 0.0))
            fail(ErrorCode::invalid_input, "prices must be strictly positive");
        raw[t] = std::log(prices[t + 1]) - std::log(prices[t]);
    }
    return normalize_returns(raw);
}

std::vector<double> build_profile(std::span<const double> returns) {
    std::vector<double> profile(returns.size());
    std::partial_sum(returns.begin(), returns.end(), profile.begin());
    return profile;
}

}  // namespace wbrmt
