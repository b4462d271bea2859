/**
 * @file wavelet.hpp
 * @brief Daubechies filter bank and periodic one-dimensional DWT.
 *
 * Db-N denotes the N-tap orthonormal Daubechies filter (N even, 2..20)
 * with N/2 vanishing moments, so Db-2 is Haar and Db-4 annihilates
 * constant and linear trends. Convolution uses periodic extension. Odd
 * lengths are padded by one sample (edge replication) before each
 * decimation, so per-level lengths follow ceiling halving and the inverse
 * still reconstructs the original samples exactly.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wbrmt {

class WaveletFilter {
public:
    /// Throws ErrorCode::invalid_filter unless index is even and in [2, 20].
    explicit WaveletFilter(int index);

    int index() const { return index_; }
    std::span<const double> lowpass() const { return lowpass_; }
    std::span<const double> highpass() const { return highpass_; }
    std::size_t support_width() const { return lowpass_.size(); }
    int vanishing_moments() const { return index_ / 2; }

private:
    int index_;
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
};

WaveletFilter daubechies_filter(int index);

/// Checks every embedded filter against its normalization and
/// orthonormality invariants; throws ErrorCode::invalid_filter otherwise.
void validate_filter_table();

struct DwtDecomposition {
    /// approx[j] and detail[j] hold the level j+1 coefficients.
    std::vector<std::vector<double>> approx;
    std::vector<std::vector<double>> detail;
    /// lengths[j] is the signal length entering level j+1; lengths[0] is
    /// the original length.
    std::vector<std::size_t> lengths;
    int levels = 0;
    std::size_t original_length = 0;
    int filter_index = 0;
};

/// floor(log2(length)), the deepest decomposition admitted for a signal.
int max_levels(std::size_t length);

DwtDecomposition dwt_forward(std::span<const double> signal, const WaveletFilter& filter, int levels);

std::vector<double> dwt_inverse(const DwtDecomposition& decomp, const WaveletFilter& filter);

/// Low-pass reconstruction of `profile` at scale a: forward DWT to depth a,
/// detail levels 1..a zeroed, inverse DWT.
std::vector<double> trend_at_scale(std::span<const double> profile, const WaveletFilter& filter, int scale);

}  // namespace wbrmt
