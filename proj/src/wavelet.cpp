#include "wbrmt/wavelet.hpp"

#include <cmath>
#include <string>

#include "wbrmt/error.hpp"

namespace wbrmt {

namespace {

// Scaling (low-pass) filters h[0..N-1], normalized to sum sqrt(2).
const std::vector<std::vector<double>> kDaubechies = {
    // Db-2
    {
        7.0710678118654752e-1, 7.0710678118654752e-1},
    // Db-4
    {
        4.8296291314453414e-1, 8.3651630373780791e-1, 2.2414386804201338e-1,
        -1.2940952255126038e-1},
    // Db-6
    {
        3.3267055295008262e-1, 8.0689150931109258e-1, 4.5987750211849157e-1,
        -1.3501102001025459e-1, -8.5441273882026662e-2, 3.5226291885709537e-2},
    // Db-8
    {
        2.303778133088965e-1, 7.1484657055291565e-1, 6.3088076792985891e-1,
        -2.7983769416859854e-2, -1.8703481171909308e-1, 3.0841381835560764e-2,
        3.28830116668852e-2, -1.0597401785069032e-2},
    // Db-10
    {
        1.6010239797419291e-1, 6.0382926979718967e-1, 7.2430852843777293e-1,
        1.3842814590132073e-1, -2.4229488706638203e-1, -3.2244869584638375e-2,
        7.7571493840045714e-2, -6.2414902127982743e-3, -1.2580751999081999e-2,
        3.3357252854737713e-3},
    // Db-12
    {
        1.1154074335010946e-1, 4.9462389039845309e-1, 7.5113390802109535e-1,
        3.1525035170919763e-1, -2.2626469396543982e-1, -1.2976686756726194e-1,
        9.7501605587323049e-2, 2.7522865530305729e-2, -3.158203931748603e-2,
        5.5384220116149614e-4, 4.7772575109455106e-3, -1.0773010853084796e-3},
    // Db-14
    {
        7.7852054085009179e-2, 3.9653931948191731e-1, 7.2913209084623512e-1,
        4.6978228740519312e-1, -1.4390600392856498e-1, -2.2403618499387498e-1,
        7.1309219266830265e-2, 8.0612609151083072e-2, -3.8029936935014414e-2,
        -1.6574541630666881e-2, 1.2550998556099841e-2, 4.2957797292136652e-4,
        -1.8016407040474909e-3, 3.5371379997452025e-4},
    // Db-16
    {
        5.441584224310401e-2, 3.1287159091429997e-1, 6.7563073629728981e-1,
        5.8535468365420671e-1, -1.5829105256349306e-2, -2.8401554296154693e-1,
        4.7248457391328277e-4, 1.2874742662047846e-1, -1.7369301001807546e-2,
        -4.4088253930794752e-2, 1.3981027917398282e-2, 8.7460940474057767e-3,
        -4.8703529934515743e-3, -3.9174037337694705e-4, 6.7544940645056937e-4,
        -1.1747678412476953e-4},
    // Db-18
    {
        3.8077947363878347e-2, 2.4383467461259035e-1, 6.0482312369011111e-1,
        6.5728807805130054e-1, 1.3319738582500758e-1, -2.9327378327917491e-1,
        -9.6840783222976461e-2, 1.4854074933810638e-1, 3.0725681479333379e-2,
        -6.7632829061329974e-2, 2.5094711483145196e-4, 2.2361662123679097e-2,
        -4.7232047577513973e-3, -4.2815036824634298e-3, 1.8476468830562265e-3,
        2.3038576352319597e-4, -2.5196318894271014e-4, 3.9347320316271599e-5},
    // Db-20
    {
        2.6670057900555554e-2, 1.8817680007769149e-1, 5.2720118893172559e-1,
        6.8845903945360357e-1, 2.8117234366057746e-1, -2.4984642432731538e-1,
        -1.9594627437737704e-1, 1.2736934033579326e-1, 9.3057364603572351e-2,
        -7.1394147166397087e-2, -2.9457536821875813e-2, 3.3212674059341002e-2,
        3.6065535669561697e-3, -1.0733175483330575e-2, 1.3953517470529012e-3,
        1.9924052951850561e-3, -6.8585669495971163e-4, -1.1646685512928545e-4,
        9.3588670320069591e-5, -1.3264202894521245e-5}
};


[[noreturn]] void fail(ErrorCode code, const std::string& message) {
    throw Error(code, "wavelet", message);
}

void check_invariants(const WaveletFilter& f) {
    const auto lo = f.lowpass();
    const auto hi = f.highpass();
    const std::size_t n = lo.size();
    double sum_lo = 0.0, sum_hi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum_lo += lo[k];
        sum_hi += hi[k];
    }
    const std::string name = "Db-" + std::to_string(f.index());
    if (std::abs(sum_lo - std::sqrt(2.0)) > 1e-12) fail(ErrorCode::invalid_filter, name + " low-pass sum");
    if (std::abs(sum_hi) > 1e-12) fail(ErrorCode::invalid_filter, name + " high-pass sum");
    for (std::size_t shift = 0; shift < n; shift += 2) {
        double ll = 0.0, hh = 0.0, lh = 0.0, hl = 0.0;
        for (std::size_t k = 0; k + shift < n; ++k) {
            ll += lo[k] * lo[k + shift];
            hh += hi[k] * hi[k + shift];
            lh += lo[k] * hi[k + shift];
            hl += hi[k] * lo[k + shift];
        }
        const double expect = shift == 0 ? 1.0 : 0.0;
        if (std::abs(ll - expect) > 1e-12 || std::abs(hh - expect) > 1e-12 || std::abs(lh) > 1e-12 ||
            std::abs(hl) > 1e-12)
            fail(ErrorCode::invalid_filter, name + " not orthonormal under shift " + std::to_string(shift));
    }
}

// One analysis step on an even-length periodic signal.
void analyze(std::span<const double> x, const WaveletFilter& f, std::vector<double>& approx,
             std::vector<double>& detail) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    const auto lo = f.lowpass();
    const auto hi = f.highpass();
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0, d = 0.0;
        for (std::size_t j = 0; j < lo.size(); ++j) {
            const double v = x[(2 * k + j) % n];
            a += lo[j] * v;
            d += hi[j] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

// Inverse of analyze; detail may be empty (treated as zero).
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               const WaveletFilter& f) {
    const std::size_t half = approx.size();
    const std::size_t n = 2 * half;
    const auto lo = f.lowpass();
    const auto hi = f.highpass();
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        const double a = approx[k];
        const double d = detail.empty() ? 0.0 : detail[k];
        for (std::size_t j = 0; j < lo.size(); ++j) x[(2 * k + j) % n] += lo[j] * a + hi[j] * d;
    }
    return x;
}

}  // namespace

WaveletFilter::WaveletFilter(int index) : index_(index) {
    if (index < 2 || index > 20 || index % 2 != 0)
        fail(ErrorCode::invalid_filter, "Daubechies index must be even in [2, 20], got " + std::to_string(index));
    lowpass_ = kDaubechies[static_cast<std::size_t>(index / 2 - 1)];
    const std::size_t n = lowpass_.size();
    highpass_.resize(n);
    for (std::size_t k = 0; k < n; ++k) highpass_[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass_[n - 1 - k];
}

WaveletFilter daubechies_filter(int index) { return WaveletFilter(index); }

void validate_filter_table() {
    for (int index = 2; index <= 20; index += 2) check_invariants(WaveletFilter(index));
}

int max_levels(std::size_t length) {
    int levels = 0;
    while (length >= 2) {
        length >>= 1;
        ++levels;
    }
    return levels;
}

DwtDecomposition dwt_forward(std::span<const double> signal, const WaveletFilter& filter, int levels) {
    if (signal.size() < filter.support_width())
        fail(ErrorCode::size, "signal length " + std::to_string(signal.size()) + " is shorter than the Db-" +
                                  std::to_string(filter.index()) + " support");
    if (levels < 1 || levels > max_levels(signal.size()))
        fail(ErrorCode::scale_range, "levels must be in [1, " + std::to_string(max_levels(signal.size())) +
                                         "], got " + std::to_string(levels));

    DwtDecomposition out;
    out.levels = levels;
    out.original_length = signal.size();
    out.filter_index = filter.index();
    out.approx.resize(static_cast<std::size_t>(levels));
    out.detail.resize(static_cast<std::size_t>(levels));

    std::vector<double> current(signal.begin(), signal.end());
    for (int j = 0; j < levels; ++j) {
        out.lengths.push_back(current.size());
        if (current.size() % 2 != 0) current.push_back(current.back());
        analyze(current, filter, out.approx[static_cast<std::size_t>(j)], out.detail[static_cast<std::size_t>(j)]);
        current = out.approx[static_cast<std::size_t>(j)];
    }
    return out;
}

std::vector<double> dwt_inverse(const DwtDecomposition& decomp, const WaveletFilter& filter) {
    const auto levels = static_cast<std::size_t>(decomp.levels);
    if (decomp.filter_index != filter.index())
        fail(ErrorCode::inconsistent, "decomposition was produced with Db-" + std::to_string(decomp.filter_index) +
                                          ", not Db-" + std::to_string(filter.index()));
    if (decomp.levels < 1 || decomp.approx.size() != levels || decomp.detail.size() != levels ||
        decomp.lengths.size() != levels || decomp.lengths.front() != decomp.original_length)
        fail(ErrorCode::inconsistent, "decomposition level metadata is inconsistent");
    for (std::size_t j = 0; j < levels; ++j) {
        const std::size_t half = (decomp.lengths[j] + 1) / 2;
        if (!decomp.detail[j].empty() && decomp.detail[j].size() != half)
            fail(ErrorCode::inconsistent, "detail level " + std::to_string(j + 1) + " has the wrong length");
    }
    if (decomp.approx.back().size() != (decomp.lengths.back() + 1) / 2)
        fail(ErrorCode::inconsistent, "coarsest approximation has the wrong length");

    std::vector<double> current = decomp.approx.back();
    for (std::size_t j = levels; j-- > 0;) {
        current = synthesize(current, decomp.detail[j], filter);
        current.resize(decomp.lengths[j]);
    }
    return current;
}

std::vector<double> trend_at_scale(std::span<const double> profile, const WaveletFilter& filter, int scale) {
    if (scale < 1 || scale > max_levels(profile.size()))
        fail(ErrorCode::scale_range, "scale must be in [1, " + std::to_string(max_levels(profile.size())) +
                                         "], got " + std::to_string(scale));
    auto decomp = dwt_forward(profile, filter, scale);
    for (auto& d : decomp.detail) d.clear();
    return dwt_inverse(decomp, filter);
}

}  // namespace wbrmt
