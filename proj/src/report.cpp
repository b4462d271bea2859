#include "wbrmt/report.hpp"

#include <charconv>
#include <cmath>

#include "wbrmt/config.hpp"
#include "wbrmt/error.hpp"

namespace wbrmt {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view config_hash,
                     std::initializer_list<std::string> metadata)
    : out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::io, "report", "cannot write " + path.string());
    out_ << "# " << kToolName << ' ' << kToolVersion << " config_hash=" << config_hash << '\n';
    for (const auto& m : metadata) out_ << "# " << m << '\n';
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    for (auto name : names) cell(name);
    end_row();
}

void CsvWriter::comment(std::string_view text) { out_ << "# " << text << '\n'; }

CsvWriter& CsvWriter::cell(std::string_view text) {
    if (!first_in_row_) out_ << ',';
    out_ << text;
    first_in_row_ = false;
    return *this;
}

CsvWriter& CsvWriter::cell(double value) { return cell(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::cell(long long value) { return cell(std::string_view(std::to_string(value))); }

void CsvWriter::end_row() {
    out_ << '\n';
    first_in_row_ = true;
}

nlohmann::ordered_json report_meta(std::string_view config_hash) {
    return {{"tool", kToolName}, {"version", kToolVersion}, {"config_hash", std::string(config_hash)}};
}

nlohmann::ordered_json spectral_to_json(const SpectralResult& r) {
    nlohmann::ordered_json j;
    j["ok"] = r.ok;
    if (!r.ok) j["error"] = r.error;
    if (r.eigenvalues.empty()) return j;
    j["n_series"] = r.n_series;
    j["length"] = r.length;
    j["eigenvalues"] = r.eigenvalues;
    j["mp"] = {{"Q", r.mp.Q},
               {"sigma2", r.mp.sigma2},
               {"lambda_min", r.mp.lambda_min},
               {"lambda_max", r.mp.lambda_max},
               {"inside_fraction", r.inside_fraction}};
    if (!r.ok) return j;
    j["unfolding_degree"] = r.unfolding_degree;
    j["spacings"] = r.spacings;
    j["mean_spacing"] = r.mean_spacing;
    j["ks"] = r.ks_stat;
    j["goe_fit"] = {{"a", r.goe.a},
                    {"b", r.goe.b},
                    {"ci", {{"a", {r.goe.a_lo, r.goe.a_hi}}, {"b", {r.goe.b_lo, r.goe.b_hi}}}},
                    {"ks", r.goe.ks_stat},
                    {"convention", r.goe.convention == HistogramConvention::density ? "density" : "counts"},
                    {"bins", r.goe.histogram.bins()},
                    {"residual_rms", r.goe.residual_rms}};
    return j;
}

nlohmann::ordered_json sweep_to_json(const SweepReport& report, std::string_view config_hash) {
    nlohmann::ordered_json j;
    j["meta"] = report_meta(config_hash);
    nlohmann::ordered_json scales = nlohmann::ordered_json::object();
    for (const auto& r : report.scales) scales[std::to_string(r.scale)] = spectral_to_json(r);
    j["scales"] = std::move(scales);
    j["failures"] = report.failures();
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "report", "cannot write " + path.string());
    out << j.dump(1) << '\n';
}

void write_eigenvalue_histogram(const std::filesystem::path& path, const SpectralResult& r,
                                std::string_view config_hash) {
    CsvWriter csv(path, config_hash,
                  {"scale=" + std::to_string(r.scale), "Q=" + format_double(r.mp.Q),
                   "lambda_min=" + format_double(r.mp.lambda_min), "lambda_max=" + format_double(r.mp.lambda_max)});
    csv.header({"bin_lo", "bin_hi", "count", "density", "mp_density"});
    const double lo = std::min(r.eigenvalues.front(), r.mp.lambda_min);
    const double hi = std::max(r.eigenvalues.back(), r.mp.lambda_max);
    std::size_t bins = 20;
    try {
        bins = freedman_diaconis_bins(r.eigenvalues, lo, hi);
    } catch (const Error&) {
    }
    const auto h = make_histogram(r.eigenvalues, lo, hi, std::min<std::size_t>(bins, 1000));
    for (std::size_t k = 0; k < h.bins(); ++k)
        csv.cell(h.edges[k]).cell(h.edges[k + 1]).cell(h.counts[k]).cell(h.density(k)).cell(mp_density(h.center(k), r.mp)).end_row();
}

void write_spacing_histogram(const std::filesystem::path& path, const SpectralResult& r,
                             std::string_view config_hash) {
    CsvWriter csv(path, config_hash,
                  {"scale=" + std::to_string(r.scale), "a=" + format_double(r.goe.a), "b=" + format_double(r.goe.b),
                   std::string("convention=") + (r.goe.convention == HistogramConvention::density ? "density" : "counts")});
    csv.header({"bin_lo", "bin_hi", "count", "density", "wigner", "fit"});
    const auto& h = r.goe.histogram;
    for (std::size_t k = 0; k < h.bins(); ++k) {
        const double x = h.center(k);
        csv.cell(h.edges[k]).cell(h.edges[k + 1]).cell(h.counts[k]).cell(h.density(k)).cell(wigner_pdf(x))
            .cell(r.goe.a * x * std::exp(-r.goe.b * x * x)).end_row();
    }
}

}  // namespace wbrmt
