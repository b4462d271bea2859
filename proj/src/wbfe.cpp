#include "wbrmt/wbfe.hpp"

#include <algorithm>

#include "wbrmt/error.hpp"
#include "wbrmt/parallel.hpp"

namespace wbrmt {

namespace {

std::vector<double> detrend(std::span<const double> y, const WaveletFilter& filter, int scale) {
    auto trend = trend_at_scale(y, filter, scale);
    for (std::size_t t = 0; t < y.size(); ++t) trend[t] = y[t] - trend[t];
    return trend;
}

}  // namespace

FluctuationSeries extract_fluctuations(std::span<const double> profile, const WaveletFilter& filter, int scale,
                                       EdgeCorrection edge) {
    FluctuationSeries out;
    out.scale = scale;
    out.values = detrend(profile, filter, scale);
    if (edge == EdgeCorrection::none) return out;

    std::vector<double> reversed(profile.rbegin(), profile.rend());
    auto backward = detrend(reversed, filter, scale);
    std::reverse(backward.begin(), backward.end());
    for (std::size_t t = 0; t < out.values.size(); ++t) out.values[t] = 0.5 * (out.values[t] + backward[t]);
    out.edge_corrected = true;
    return out;
}

std::vector<std::vector<double>> panel_profiles(const PricePanel& panel) {
    std::vector<std::vector<double>> profiles;
    profiles.reserve(panel.n_series());
    for (std::size_t i = 0; i < panel.n_series(); ++i) {
        try {
            profiles.push_back(build_profile(compute_normalized_returns(panel.row(i)).values));
        } catch (const Error& e) {
            throw Error(e.code(), "wbfe", "ticker " + panel.tickers()[i] + ": " + e.what());
        }
    }
    return profiles;
}

std::vector<FluctuationPanel> fluctuation_panels(std::span<const std::vector<double>> profiles,
                                                 std::span<const std::string> tickers, const WaveletFilter& filter,
                                                 std::span<const int> scales, std::size_t threads) {
    if (profiles.size() != tickers.size()) throw Error(ErrorCode::inconsistent, "wbfe", "tickers/profiles mismatch");
    const std::size_t n = profiles.size();
    const std::size_t length = n == 0 ? 0 : profiles.front().size();
    for (const auto& p : profiles)
        if (p.size() != length) throw Error(ErrorCode::inconsistent, "wbfe", "profiles differ in length");

    std::vector<FluctuationPanel> panels(scales.size());
    for (std::size_t k = 0; k < scales.size(); ++k) {
        panels[k].scale = scales[k];
        panels[k].tickers.assign(tickers.begin(), tickers.end());
        panels[k].matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(length));
    }
    parallel_for(n * scales.size(), threads, [&](std::size_t task) {
        const std::size_t k = task / n;
        const std::size_t i = task % n;
        FluctuationSeries z;
        try {
            z = extract_fluctuations(profiles[i], filter, scales[k]);
        } catch (const Error& e) {
            throw Error(e.code(), "wbfe",
                        "ticker " + tickers[i] + " at scale " + std::to_string(scales[k]) + ": " + e.what());
        }
        auto row = panels[k].matrix.row(static_cast<Eigen::Index>(i));
        for (std::size_t t = 0; t < length; ++t) row(static_cast<Eigen::Index>(t)) = z.values[t];
    });
    return panels;
}

FluctuationPanel fluctuation_panel(const PricePanel& panel, const WaveletFilter& filter, int scale,
                                   std::size_t threads) {
    const auto profiles = panel_profiles(panel);
    const int scales[] = {scale};
    return std::move(fluctuation_panels(profiles, panel.tickers(), filter, scales, threads).front());
}

}  // namespace wbrmt
