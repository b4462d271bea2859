#include "wbrmt/synth.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "wbrmt/error.hpp"

namespace wbrmt {

double Rng::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<double> white_noise(std::size_t length, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(length);
    for (double& v : out) v = rng.gaussian();
    return out;
}

std::vector<double> binomial_cascade(int levels, double p) {
    if (!(p >= 0.5 && p < 1.0)) throw Error(ErrorCode::parameter, "synth", "cascade p must lie in [0.5, 1)");
    if (levels < 8 || levels > 30) throw Error(ErrorCode::parameter, "synth", "cascade levels must lie in [8, 30]");
    const std::size_t n = std::size_t{1} << levels;
    std::vector<double> out(n);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (std::size_t k = 0; k < n; ++k) {
        const int ones = std::popcount(k);
        out[k] = std::exp(ones * lp + (levels - ones) * lq);
    }
    return out;
}

double cascade_hurst(double q, double p) {
    if (q == 0.0) {
        // The 1/q terms cancel in the limit.
        const double lp = std::log(p), lq = std::log1p(-p);
        return -(lp + lq) / (2.0 * std::numbers::ln2);
    }
    return 1.0 / q - std::log(std::pow(p, q) + std::pow(1.0 - p, q)) / (q * std::numbers::ln2);
}

Eigen::MatrixXd goe_matrix(std::size_t size, std::uint64_t seed) {
    if (size < 2) throw Error(ErrorCode::parameter, "synth", "GOE size must be at least 2");
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.gaussian();
    Eigen::MatrixXd a = 0.5 * (m + m.transpose());
    return a;
}

Eigen::MatrixXd wishart_panel(std::size_t n_series, std::size_t length, std::uint64_t seed) {
    if (length <= n_series) throw Error(ErrorCode::parameter, "synth", "wishart panel needs length > n_series");
    Rng rng(seed);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n_series), static_cast<Eigen::Index>(length));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index t = 0; t < x.cols(); ++t) x(i, t) = rng.gaussian();
    return x;
}

PricePanel wishart_price_panel(std::size_t n_series, std::size_t n_dates, std::uint64_t seed, double daily_vol) {
    const Eigen::MatrixXd r = wishart_panel(n_series, n_dates - 1, seed);
    Eigen::MatrixXd prices(r.rows(), static_cast<Eigen::Index>(n_dates));
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        double log_price = std::log(100.0);
        prices(i, 0) = 100.0;
        for (Eigen::Index t = 0; t < r.cols(); ++t) {
            log_price += daily_vol * r(i, t);
            prices(i, t + 1) = std::exp(log_price);
        }
    }
    std::vector<std::string> tickers;
    for (std::size_t i = 0; i < n_series; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "S%03zu", i);
        tickers.emplace_back(buf);
    }
    using namespace std::chrono;
    std::vector<std::string> dates;
    const sys_days start = year{2000} / January / 1;
    for (std::size_t t = 0; t < n_dates; ++t) {
        const year_month_day ymd{start + days{static_cast<long>(t)}};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        dates.emplace_back(buf);
    }
    return PricePanel(std::move(tickers), std::move(dates), std::move(prices));
}

}  // namespace wbrmt
