#include "wbrmt/mfdfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wbrmt/error.hpp"

namespace wbrmt {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, "mfdfa", message); }

double mean_square(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc / static_cast<double>(x.size());
}

}  // namespace

SegmentVariances segment_variances(std::span<const double> fluct, std::size_t segment_size) {
    if (segment_size < 1) fail(ErrorCode::insufficient_data, "segment size must be positive");
    const std::size_t per_direction = fluct.size() / segment_size;
    if (2 * per_direction < 4)
        fail(ErrorCode::insufficient_data, "segment size " + std::to_string(segment_size) + " leaves " +
                                               std::to_string(2 * per_direction) + " segments in a series of length " +
                                               std::to_string(fluct.size()) + "; need at least 4");
    SegmentVariances out;
    out.segment_size = segment_size;
    out.per_direction = per_direction;
    out.variances.reserve(2 * per_direction);
    for (std::size_t k = 0; k < per_direction; ++k) out.variances.push_back(mean_square(fluct.subspan(k * segment_size, segment_size)));
    const std::size_t tail = fluct.size() - per_direction * segment_size;
    for (std::size_t k = 0; k < per_direction; ++k)
        out.variances.push_back(mean_square(fluct.subspan(tail + k * segment_size, segment_size)));
    return out;
}

double fluctuation_moment(const SegmentVariances& sv, double q) {
    const auto& v = sv.variances;
    const double count = static_cast<double>(v.size());
    if (q <= 0.0) {
        for (std::size_t k = 0; k < v.size(); ++k)
            if (!(v[k] > 0.0)) {
                const bool forward = k < sv.per_direction;
                fail(ErrorCode::degenerate_segment,
                     "zero variance in " + std::string(forward ? "forward" : "backward") + " segment " +
                         std::to_string((forward ? k : k - sv.per_direction) + 1) + " (s=" +
                         std::to_string(sv.segment_size) + ") with q=" + std::to_string(q));
            }
    }
    if (q == 0.0) {
        double acc = 0.0;
        for (double x : v) acc += std::log(x);
        return std::exp(0.5 * acc / count);
    }
    // log-sum-exp keeps large |q| finite when the variances span many decades.
    double peak = -std::numeric_limits<double>::infinity();
    for (double x : v)
        if (x > 0.0) peak = std::max(peak, 0.5 * q * std::log(x));
    if (!std::isfinite(peak)) return 0.0;
    double acc = 0.0;
    for (double x : v)
        if (x > 0.0) acc += std::exp(0.5 * q * std::log(x) - peak);
    return std::exp((peak + std::log(acc / count)) / q);
}

FluctuationFunction fluctuation_function(std::span<const double> fluct, std::span<const double> q_grid,
                                         std::span<const double> s_grid) {
    FluctuationFunction ff;
    ff.q_grid.assign(q_grid.begin(), q_grid.end());
    ff.s_grid.assign(s_grid.begin(), s_grid.end());
    for (std::size_t j = 1; j < ff.s_grid.size(); ++j)
        if (!(ff.s_grid[j] > ff.s_grid[j - 1])) fail(ErrorCode::grid, "segment sizes must be strictly increasing");
    ff.values.resize(static_cast<Eigen::Index>(q_grid.size()), static_cast<Eigen::Index>(s_grid.size()));
    for (std::size_t j = 0; j < s_grid.size(); ++j) {
        const auto s = static_cast<std::size_t>(std::llround(s_grid[j]));
        if (s < 1 || std::abs(s_grid[j] - static_cast<double>(s)) > 1e-9)
            fail(ErrorCode::grid, "segment sizes must be positive integers");
        const auto sv = segment_variances(fluct, s);
        for (std::size_t i = 0; i < q_grid.size(); ++i)
            ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fluctuation_moment(sv, q_grid[i]);
    }
    return ff;
}

std::size_t segment_size_for_scale(int scale, std::size_t support_width) {
    if (scale < 1 || scale > 40) fail(ErrorCode::scale_range, "scale must be in [1, 40]");
    return (std::size_t{1} << (scale - 1)) * support_width;
}

FluctuationFunction multiscale_fluctuation_function(std::span<const FluctuationSeries> series,
                                                    std::span<const double> q_grid, std::size_t support_width) {
    FluctuationFunction ff;
    ff.q_grid.assign(q_grid.begin(), q_grid.end());
    ff.values.resize(static_cast<Eigen::Index>(q_grid.size()), static_cast<Eigen::Index>(series.size()));
    for (std::size_t j = 0; j < series.size(); ++j) {
        const std::size_t s = segment_size_for_scale(series[j].scale, support_width);
        if (j > 0 && !(static_cast<double>(s) > ff.s_grid.back()))
            fail(ErrorCode::grid, "scales must be strictly increasing");
        ff.s_grid.push_back(static_cast<double>(s));
        const auto sv = segment_variances(series[j].values, s);
        for (std::size_t i = 0; i < q_grid.size(); ++i)
            ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fluctuation_moment(sv, q_grid[i]);
    }
    return ff;
}

HurstEstimate generalized_hurst(const FluctuationFunction& ff, double s_lo, double s_hi) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < ff.s_grid.size(); ++j)
        if (ff.s_grid[j] >= s_lo && ff.s_grid[j] <= s_hi) cols.push_back(j);
    if (cols.size() < 4)
        fail(ErrorCode::fit_range, "only " + std::to_string(cols.size()) + " segment sizes fall in [" +
                                       std::to_string(s_lo) + ", " + std::to_string(s_hi) + "]; need 4");

    const double n = static_cast<double>(cols.size());
    double mx = 0.0;
    for (auto j : cols) mx += std::log(ff.s_grid[j]);
    mx /= n;
    double sxx = 0.0;
    for (auto j : cols) sxx += (std::log(ff.s_grid[j]) - mx) * (std::log(ff.s_grid[j]) - mx);

    HurstEstimate out;
    out.points = cols.size();
    for (std::size_t i = 0; i < ff.q_grid.size(); ++i) {
        std::vector<double> y;
        for (auto j : cols) {
            const double f = ff.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (!(f > 0.0) || !std::isfinite(f))
                fail(ErrorCode::fit_range, "non-positive F_q(s) at q=" + std::to_string(ff.q_grid[i]) +
                                               ", s=" + std::to_string(ff.s_grid[j]));
            y.push_back(std::log(f));
        }
        double my = 0.0;
        for (double v : y) my += v;
        my /= n;
        double sxy = 0.0, syy = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double dx = std::log(ff.s_grid[cols[k]]) - mx;
            sxy += dx * (y[k] - my);
            syy += (y[k] - my) * (y[k] - my);
        }
        const double slope = sxy / sxx;
        double ss_res = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double r = y[k] - my - slope * (std::log(ff.s_grid[cols[k]]) - mx);
            ss_res += r * r;
        }
        out.h.push_back(slope);
        out.intercept.push_back(my - slope * mx);
        out.r_squared.push_back(syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0);
    }
    return out;
}

std::vector<double> scaling_exponent(std::span<const double> q_grid, std::span<const double> h) {
    if (q_grid.size() != h.size()) fail(ErrorCode::grid, "h(q) does not match the q grid");
    std::vector<double> tau(q_grid.size());
    for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = q_grid[i] * h[i] - 1.0;
    return tau;
}

SingularitySpectrum singularity_spectrum(std::span<const double> q_grid, std::span<const double> tau) {
    const std::size_t n = q_grid.size();
    if (n < 5) fail(ErrorCode::grid, "need at least 5 q values for the Legendre transform");
    if (tau.size() != n) fail(ErrorCode::grid, "tau(q) does not match the q grid");
    const double step = (q_grid.back() - q_grid.front()) / static_cast<double>(n - 1);
    if (!(step > 0.0)) fail(ErrorCode::grid, "q grid must be increasing");
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(q_grid[i] - q_grid[i - 1] - step) > 1e-9 * std::max(1.0, step))
            fail(ErrorCode::grid, "q grid must be uniform");

    SingularitySpectrum out;
    out.beta.resize(n);
    out.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0)
            out.beta[i] = (tau[1] - tau[0]) / step;
        else if (i == n - 1)
            out.beta[i] = (tau[n - 1] - tau[n - 2]) / step;
        else
            out.beta[i] = (tau[i + 1] - tau[i - 1]) / (2.0 * step);
        out.f[i] = q_grid[i] * out.beta[i] - tau[i];
    }
    return out;
}

std::vector<double> default_q_grid() {
    std::vector<double> q;
    for (int i = -20; i <= 20; ++i) q.push_back(0.25 * i);
    return q;
}

std::vector<int> admissible_scales(std::size_t length, std::size_t support_width) {
    std::vector<int> scales;
    for (int a = 1; a <= max_levels(length); ++a) {
        const std::size_t s = segment_size_for_scale(a, support_width);
        if (s >= 4 && s <= length / 4) scales.push_back(a);
    }
    return scales;
}

MultifractalSpectrum spectrum_from(const FluctuationFunction& ff, double s_lo, double s_hi) {
    const auto fit = generalized_hurst(ff, s_lo, s_hi);
    MultifractalSpectrum spec;
    spec.q = ff.q_grid;
    spec.h = fit.h;
    spec.fit_quality = fit.r_squared;
    spec.tau = scaling_exponent(spec.q, spec.h);
    const auto legendre = singularity_spectrum(spec.q, spec.tau);
    spec.beta = legendre.beta;
    spec.f_beta = legendre.f;
    return spec;
}

MfdfaResult analyze_profile(std::span<const double> profile, const WaveletFilter& filter,
                            const MfdfaOptions& options) {
    const auto q_grid = options.q_grid.empty() ? default_q_grid() : options.q_grid;
    const bool has_zero = std::any_of(q_grid.begin(), q_grid.end(), [](double q) { return q == 0.0; });
    const bool has_two = std::any_of(q_grid.begin(), q_grid.end(), [](double q) { return q == 2.0; });
    if (!has_zero || !has_two) fail(ErrorCode::grid, "q grid must contain 0 and 2");
    const double fit_hi = options.fit_hi > 0.0 ? options.fit_hi : static_cast<double>(profile.size()) / 4.0;

    MfdfaResult result;
    if (options.mode == MfdfaMode::multiscale) {
        auto scales = options.scales.empty() ? admissible_scales(profile.size(), filter.support_width()) : options.scales;
        std::sort(scales.begin(), scales.end());
        std::vector<FluctuationSeries> series;
        series.reserve(scales.size());
        for (int a : scales) series.push_back(extract_fluctuations(profile, filter, a));
        result.fluctuation = multiscale_fluctuation_function(series, q_grid, filter.support_width());
    } else {
        const int scale = options.series_scale > 0 ? options.series_scale : max_levels(profile.size());
        std::vector<double> s_grid = options.s_grid;
        if (s_grid.empty())
            for (std::size_t s = 4; s <= profile.size() / 4; s *= 2) s_grid.push_back(static_cast<double>(s));
        const auto z = extract_fluctuations(profile, filter, scale);
        result.fluctuation = fluctuation_function(z.values, q_grid, s_grid);
    }
    result.spectrum = spectrum_from(result.fluctuation, options.fit_lo, fit_hi);
    return result;
}

}  // namespace wbrmt
