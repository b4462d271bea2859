/**
 * @file mfdfa.hpp
 * @brief Wavelet-based multifractal detrended fluctuation analysis.
 *
 * Fluctuation series are cut into N_s = floor(T/s) segments from the start
 * and N_s from the end. Each segment contributes its mean square (the
 * fluctuations are already detrended, so no segment mean is removed). The
 * q-th order fluctuation function is the generalized mean of the segment
 * standard deviations, with the geometric mean as the q = 0 limit.
 *
 * Two ways of building F_q(s):
 *  - multiscale (default): each wavelet scale a supplies one segment size
 *    s_a = 2^(a-1) W, evaluated on the fluctuations extracted at that scale;
 *  - single_series: one fluctuation series evaluated on an arbitrary s grid.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wbrmt/wavelet.hpp"
#include "wbrmt/wbfe.hpp"

namespace wbrmt {

struct SegmentVariances {
    std::size_t segment_size = 0;
    std::size_t per_direction = 0;  ///< N_s
    std::vector<double> variances;  ///< 2 N_s mean squares, forward then backward
};

SegmentVariances segment_variances(std::span<const double> fluct, std::size_t segment_size);

/// F_q from precomputed segment variances. q == 0 uses the geometric-mean
/// limit. Throws ErrorCode::degenerate_segment if a variance is zero and
/// q <= 0.
double fluctuation_moment(const SegmentVariances& sv, double q);

struct FluctuationFunction {
    std::vector<double> q_grid;
    std::vector<double> s_grid;
    Eigen::MatrixXd values;  ///< values(i, j) = F_{q_i}(s_j)
};

FluctuationFunction fluctuation_function(std::span<const double> fluct, std::span<const double> q_grid,
                                         std::span<const double> s_grid);

/// Segment size paired with wavelet scale a: 2^(a-1) * support width.
std::size_t segment_size_for_scale(int scale, std::size_t support_width);

/// Multiscale F_q(s): series[k] holds the fluctuations at scale
/// series[k].scale and contributes the single column s = 2^(a-1) W.
FluctuationFunction multiscale_fluctuation_function(std::span<const FluctuationSeries> series,
                                                    std::span<const double> q_grid, std::size_t support_width);

struct HurstEstimate {
    std::vector<double> h;
    std::vector<double> r_squared;
    std::vector<double> intercept;
    std::size_t points = 0;
};

/// Least-squares slope of ln F_q(s) against ln s for s in [s_lo, s_hi].
HurstEstimate generalized_hurst(const FluctuationFunction& ff, double s_lo, double s_hi);

/// tau(q) = q h(q) - 1.
std::vector<double> scaling_exponent(std::span<const double> q_grid, std::span<const double> h);

struct SingularitySpectrum {
    std::vector<double> beta;
    std::vector<double> f;
};

/// Legendre transform by finite differences on a uniform q grid.
SingularitySpectrum singularity_spectrum(std::span<const double> q_grid, std::span<const double> tau);

struct MultifractalSpectrum {
    std::vector<double> q;
    std::vector<double> h;
    std::vector<double> tau;
    std::vector<double> beta;
    std::vector<double> f_beta;
    std::vector<double> fit_quality;  ///< R^2 per q
};

enum class MfdfaMode { multiscale, single_series };

struct MfdfaOptions {
    std::vector<double> q_grid;  ///< empty selects default_q_grid()
    double fit_lo = 16.0;
    double fit_hi = 0.0;  ///< <= 0 selects T/4
    MfdfaMode mode = MfdfaMode::multiscale;
    std::vector<int> scales;  ///< multiscale: empty selects every admissible scale
    int series_scale = 0;     ///< single_series: <= 0 selects the deepest scale
    std::vector<double> s_grid;  ///< single_series: empty selects powers of two in [4, T/4]
};

struct MfdfaResult {
    FluctuationFunction fluctuation;
    MultifractalSpectrum spectrum;
};

/// -5, -4.75, ..., 5.
std::vector<double> default_q_grid();

/// Scales a >= 1 with 4 <= 2^(a-1) W <= length / 4 and a <= floor(log2 length).
std::vector<int> admissible_scales(std::size_t length, std::size_t support_width);

MfdfaResult analyze_profile(std::span<const double> profile, const WaveletFilter& filter,
                            const MfdfaOptions& options = {});

/// Spectrum from an already computed fluctuation function.
MultifractalSpectrum spectrum_from(const FluctuationFunction& ff, double s_lo, double s_hi);

}  // namespace wbrmt
