#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "wbrmt/error.hpp"
#include "wbrmt/ingest.hpp"
#include "wbrmt/synth.hpp"
#include "wbrmt/wbfe.hpp"

using namespace wbrmt;

namespace {

std::vector<double> reversed(std::vector<double> v) {
    std::reverse(v.begin(), v.end());
    return v;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    return build_profile(testing::gaussian(n, seed));
}

}  // namespace

TEST_CASE("linear ramp profile leaves no interior fluctuation") {
    const std::size_t n = 4096;
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) y[t] = 2.0 + 0.5 * static_cast<double>(t);
    const double range = y.back() - y.front();
    const WaveletFilter f(4);
    for (int a = 1; a <= 8; ++a) {
        const auto z = extract_fluctuations(y, f, a);
        CHECK(z.scale == a);
        CHECK(z.edge_corrected);
        const std::size_t margin = (std::size_t{1} << a) * 4;
        for (std::size_t t = margin; t + margin < n; ++t) CHECK(std::abs(z.values[t]) <= 1e-6 * range);
    }
}

TEST_CASE("time-symmetric profile gives time-symmetric fluctuations") {
    auto half = random_walk(500, 5);
    auto y = half;
    y.insert(y.end(), half.rbegin(), half.rend());
    const WaveletFilter f(4);
    for (int a : {1, 3, 6}) {
        const auto z = extract_fluctuations(y, f, a).values;
        for (std::size_t t = 0; t < z.size(); ++t) CHECK(std::abs(z[t] - z[z.size() - 1 - t]) <= 1e-12);
    }
}

TEST_CASE("reversal equivariance is exact") {
    const auto y = random_walk(3000, 8);
    const WaveletFilter f(6);
    for (int a : {1, 4, 9}) {
        const auto z = extract_fluctuations(y, f, a).values;
        const auto zr = extract_fluctuations(reversed(y), f, a).values;
        const auto back = reversed(zr);
        for (std::size_t t = 0; t < z.size(); ++t) CHECK(std::abs(back[t] - z[t]) <= 1e-12 * (1.0 + std::abs(z[t])));
    }
}

TEST_CASE("extraction is linear") {
    const auto y1 = random_walk(2048, 1);
    const auto y2 = random_walk(2048, 2);
    const double alpha = 1.7, beta = -0.4;
    std::vector<double> mix(y1.size());
    for (std::size_t t = 0; t < mix.size(); ++t) mix[t] = alpha * y1[t] + beta * y2[t];
    const WaveletFilter f(4);
    for (int a : {2, 5}) {
        const auto z1 = extract_fluctuations(y1, f, a).values;
        const auto z2 = extract_fluctuations(y2, f, a).values;
        const auto zm = extract_fluctuations(mix, f, a).values;
        for (std::size_t t = 0; t < zm.size(); ++t) CHECK(std::abs(zm[t] - (alpha * z1[t] + beta * z2[t])) <= 1e-10);
    }
}

TEST_CASE("fluctuations of a white-noise profile have zero mean") {
    const WaveletFilter f(4);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto y = random_walk(std::size_t{1} << 12, seed);
        for (int a = 1; a <= 10; ++a) {
            const auto z = extract_fluctuations(y, f, a).values;
            CHECK(std::abs(testing::mean(z)) <= 1e-8 * std::sqrt(testing::variance(z)));
        }
    }
}

TEST_CASE("uncorrected extraction is the plain forward pass") {
    const auto y = random_walk(1000, 3);
    const WaveletFilter f(4);
    const auto trend = trend_at_scale(y, f, 3);
    const auto z = extract_fluctuations(y, f, 3, EdgeCorrection::none);
    CHECK_FALSE(z.edge_corrected);
    for (std::size_t t = 0; t < y.size(); ++t) CHECK(z.values[t] == doctest::Approx(y[t] - trend[t]).epsilon(1e-12));
}

TEST_CASE("fluctuation variance grows with scale in at least 95% of draws") {
    const WaveletFilter f(4);
    int ok = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto y = random_walk(2048, seed);
        double prev = 0.0;
        bool monotone = true;
        for (int a = 1; a <= 9; ++a) {
            const double v = testing::variance(extract_fluctuations(y, f, a).values);
            monotone = monotone && v >= prev;
            prev = v;
        }
        ok += monotone;
        ++total;
    }
    CHECK(ok >= 95 * total / 100);
}

TEST_CASE("scale out of range propagates") {
    const auto y = random_walk(100, 1);
    try {
        extract_fluctuations(y, WaveletFilter(4), 7);
        FAIL("accepted scale 7");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::scale_range);
    }
}

TEST_CASE("identical scrips give identical rows") {
    const auto base = wishart_price_panel(2, 300, 1);
    Eigen::MatrixXd prices(2, 300);
    prices.row(0) = base.prices().row(0);
    prices.row(1) = base.prices().row(0);
    const PricePanel panel({"A", "B"}, base.dates(), prices);
    const auto fp = fluctuation_panel(panel, WaveletFilter(4), 3);
    CHECK(fp.matrix.rows() == 2);
    CHECK(fp.matrix.cols() == 299);
    CHECK((fp.matrix.row(0) - fp.matrix.row(1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("permuting tickers permutes rows") {
    const auto base = wishart_price_panel(5, 400, 2);
    const std::vector<int> order{3, 0, 4, 1, 2};
    Eigen::MatrixXd prices(5, 400);
    std::vector<std::string> tickers;
    for (int i = 0; i < 5; ++i) {
        prices.row(i) = base.prices().row(order[static_cast<std::size_t>(i)]);
        tickers.push_back(base.tickers()[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    }
    const PricePanel permuted(tickers, base.dates(), prices);
    const WaveletFilter f(4);
    const auto a = fluctuation_panel(base, f, 4);
    const auto b = fluctuation_panel(permuted, f, 4, 3);
    CHECK(b.tickers == tickers);
    for (int i = 0; i < 5; ++i) CHECK(b.matrix.row(i) == a.matrix.row(order[static_cast<std::size_t>(i)]));
}

TEST_CASE("reference-sized corpus gives twelve 196 x 5799 panels") {
    const auto panel = wishart_price_panel(196, 5800, 7);
    const auto profiles = panel_profiles(panel);
    std::vector<int> scales;
    for (int a = 1; a <= 12; ++a) scales.push_back(a);
    const auto one = fluctuation_panels(profiles, panel.tickers(), WaveletFilter(4), scales, 1);
    REQUIRE(one.size() == 12);
    for (std::size_t k = 0; k < one.size(); ++k) {
        CHECK(one[k].scale == scales[k]);
        CHECK(one[k].matrix.rows() == 196);
        CHECK(one[k].matrix.cols() == 5799);
    }
    // Worker count never changes results.
    const auto four = fluctuation_panels(profiles, panel.tickers(), WaveletFilter(4), std::vector<int>{1, 7, 12}, 4);
    CHECK(four[0].matrix == one[0].matrix);
    CHECK(four[1].matrix == one[6].matrix);
    CHECK(four[2].matrix == one[11].matrix);
}

TEST_CASE("per-scrip failures name the ticker") {
    const auto base = wishart_price_panel(3, 100, 3);
    Eigen::MatrixXd prices = base.prices();
    prices.row(1).setConstant(50.0);
    const PricePanel panel(base.tickers(), base.dates(), prices);
    try {
        fluctuation_panel(panel, WaveletFilter(4), 2);
        FAIL("constant scrip accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate_series);
        CHECK(std::string(e.what()).find("S001") != std::string::npos);
    }
}
