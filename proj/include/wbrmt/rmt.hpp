/**
 * @file rmt.hpp
 * @brief Random-matrix analysis of scale-resolved fluctuation correlations.
 *
 * Correlation matrices C = X X^T / T of (optionally standardized) fluctuation
 * panels are diagonalized with cyclic Jacobi rotations, compared with the
 * Marchenko-Pastur law, unfolded with a polynomial fit of the cumulative
 * spectral function, and their nearest-neighbour spacings are compared with
 * the GOE Wigner surmise p(s) = (pi s / 2) exp(-pi s^2 / 4).
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wbrmt/wbfe.hpp"

namespace wbrmt {

struct CorrelationMatrix {
    Eigen::MatrixXd matrix;
    std::size_t n_series = 0;
    std::size_t length = 0;
    /// Variance of the entries of X used to build the matrix (1 when rows
    /// were standardized).
    double sigma2 = 1.0;
};

/// Rows are standardized to zero mean and unit population variance before
/// forming X X^T / T unless `standardize` is false. A zero-variance row
/// raises ErrorCode::degenerate_series naming tickers[i] when given.
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& data, std::span<const std::string> tickers = {},
                                     bool standardize = true);
CorrelationMatrix correlation_matrix(const FluctuationPanel& panel, bool standardize = true);

struct JacobiOptions {
    double tolerance = 1e-12;  ///< off-diagonal Frobenius norm relative to ||A||_F
    int max_sweeps = 100;
};

/// Ascending eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
std::vector<double> eigenvalues_sym(const Eigen::MatrixXd& matrix, const JacobiOptions& options = {});

struct MpParams {
    double Q = 1.0;
    double sigma2 = 1.0;
    double lambda_min = 0.0;
    double lambda_max = 4.0;
};

MpParams mp_bounds(double Q, double sigma2 = 1.0);

/// Marchenko-Pastur density; zero outside (lambda_min, lambda_max).
double mp_density(double lambda, const MpParams& params);

/// Integral of mp_density from lambda_min to lambda.
double mp_cdf(double lambda, const MpParams& params);

/// Fraction of eigenvalues within [lambda_min, lambda_max].
double mp_inside_fraction(std::span<const double> eigenvalues, const MpParams& params);

struct Histogram {
    std::vector<double> edges;   ///< bins + 1 edges
    std::vector<double> counts;  ///< raw counts per bin
    std::size_t total = 0;

    std::size_t bins() const { return counts.size(); }
    double center(std::size_t k) const { return 0.5 * (edges[k] + edges[k + 1]); }
    double width(std::size_t k) const { return edges[k + 1] - edges[k]; }
    double density(std::size_t k) const { return counts[k] / (static_cast<double>(total) * width(k)); }
};

/// Freedman-Diaconis bin count for `samples` over [lo, hi]; throws
/// ErrorCode::fit if the interquartile range is zero.
std::size_t freedman_diaconis_bins(std::span<const double> samples, double lo, double hi);

Histogram make_histogram(std::span<const double> samples, double lo, double hi, std::size_t bins);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 0.0;
    std::size_t bins = 0;  ///< after merging bins with expected count < 5
};

/// Pearson chi-square of pooled eigenvalues against the Marchenko-Pastur
/// law on Freedman-Diaconis bins (bins = 0) or a fixed bin count.
ChiSquareResult mp_chi_square(std::span<const double> eigenvalues, const MpParams& params, std::size_t bins = 0);

/// Variable the cumulative count is fitted against. `automatic` picks log
/// when every eigenvalue is positive (correlation spectra spanning several
/// decades at coarse scales) and linear otherwise.
enum class UnfoldingAbscissa { automatic, linear, log };

struct UnfoldedSpectrum {
    std::vector<double> raw;
    std::vector<double> unfolded;
    std::vector<double> spacings;
    int unfolding_degree = 0;  ///< degree actually used
    UnfoldingAbscissa abscissa = UnfoldingAbscissa::linear;
};

/// Fits the cumulative count i -> Lambda_i with a degree-`degree`
/// polynomial (Chebyshev basis on the rescaled abscissa) by least squares
/// and maps each eigenvalue through it. Requires >= 20 sorted eigenvalues
/// and degree >= 3. Throws ErrorCode::unfolding when the fit is
/// ill-conditioned or not monotone.
UnfoldedSpectrum unfold_eigenvalues(std::span<const double> sorted_eigenvalues, int degree = 5,
                                    UnfoldingAbscissa abscissa = UnfoldingAbscissa::automatic);

/// Tries `degree`, then lower degrees down to 3, while the fit is not
/// monotone.
UnfoldedSpectrum unfold_with_fallback(std::span<const double> sorted_eigenvalues, int degree = 5);

/// xi[i+1] - xi[i].
std::vector<double> nn_spacings(std::span<const double> unfolded);

/// Normalized Wigner surmise (pi s / 2) exp(-pi s^2 / 4); s >= 0.
double wigner_pdf(double s);
double wigner_cdf(double s);

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `samples` and the Wigner surmise.
double ks_wigner(std::span<const double> samples);

enum class HistogramConvention { density, counts };

struct GoeFit {
    double a = 0.0;
    double b = 0.0;
    double a_lo = 0.0, a_hi = 0.0;  ///< 95% confidence bounds
    double b_lo = 0.0, b_hi = 0.0;
    double ks_stat = 0.0;
    double residual_rms = 0.0;
    HistogramConvention convention = HistogramConvention::density;
    Histogram histogram;
};

/// Fits rho(s) = a s exp(-b s^2) to the spacing histogram: a log-linear
/// regression seeds Gauss-Newton refinement. Requires >= 100 spacings.
GoeFit fit_spacing_density(std::span<const double> spacings,
                           HistogramConvention convention = HistogramConvention::density,
                           std::optional<std::size_t> bins = std::nullopt);

struct SweepConfig {
    int unfolding_degree = 5;
    std::optional<std::size_t> bins;  ///< nullopt: Freedman-Diaconis
    HistogramConvention convention = HistogramConvention::density;
    bool standardize = true;
    std::size_t threads = 1;
};

struct SpectralResult {
    int scale = 0;
    bool ok = false;
    std::string error;
    std::size_t n_series = 0;
    std::size_t length = 0;
    std::vector<double> eigenvalues;
    MpParams mp;
    double inside_fraction = 0.0;
    std::vector<double> spacings;
    double mean_spacing = 0.0;
    GoeFit goe;
    double ks_stat = 0.0;
    int unfolding_degree = 0;
};

struct SweepReport {
    std::vector<SpectralResult> scales;
    std::size_t failures() const;
};

/// Analyses one fluctuation panel; throws on failure.
SpectralResult analyze_panel(const FluctuationPanel& panel, const SweepConfig& config = {});

/// Analyses every panel; per-scale failures are recorded in the report,
/// keeping the eigenvalues and MP comparison when only the spacing
/// analysis failed.
SweepReport scale_sweep(std::span<const FluctuationPanel> panels, const SweepConfig& config = {});

}  // namespace wbrmt
