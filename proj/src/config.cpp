#include "wbrmt/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wbrmt/error.hpp"

namespace wbrmt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::config, "config", message); }

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& prefix = "") {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        fail("key '" + prefix + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& prefix) {
    if (!j.is_object()) fail("'" + (prefix.empty() ? std::string("<root>") : prefix) + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) fail("unknown key '" + prefix + key + "'");
    }
}

}  // namespace

std::vector<double> QGridSpec::values() const {
    if (!(step > 0.0) || !(max > min)) fail("q_grid needs step > 0 and max > min");
    const double count = (max - min) / step;
    const auto n = static_cast<long>(std::llround(count));
    if (std::abs(count - static_cast<double>(n)) > 1e-9) fail("q_grid range is not a multiple of the step");
    std::vector<double> q;
    for (long i = 0; i <= n; ++i) {
        double v = min + step * static_cast<double>(i);
        if (std::abs(v) < 1e-12 * step) v = 0.0;
        q.push_back(v);
    }
    return q;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["input"] = {{"path", c.input.string()},
                  {"ticker", c.columns.ticker},
                  {"date", c.columns.date},
                  {"price", c.columns.price},
                  {"delimiter", std::string(1, c.columns.delimiter)}};
    j["series"] = c.series.string();
    j["wavelet"] = c.wavelet;
    j["scales"] = c.scales;
    j["q_grid"] = {{"min", c.q_grid.min}, {"max", c.q_grid.max}, {"step", c.q_grid.step}};
    j["fit_range"] = {c.fit_lo, c.fit_hi};
    j["mfdfa_mode"] = c.mfdfa_mode == MfdfaMode::multiscale ? "multiscale" : "single_series";
    j["mfdfa_scale"] = c.mfdfa_scale;
    j["unfolding_degree"] = c.unfolding_degree;
    j["histogram_bins"] = c.histogram_bins;
    j["histogram_convention"] = c.histogram_convention == HistogramConvention::density ? "density" : "counts";
    j["standardize"] = c.standardize;
    j["rmt_scale"] = c.rmt_scale;
    j["output_dir"] = c.output_dir.string();
    j["threads"] = c.threads;
    j["quiet"] = c.quiet;
    j["synth"] = {{"kind", c.synth.kind},     {"length", c.synth.length}, {"size", c.synth.size},
                  {"n_series", c.synth.n_series}, {"levels", c.synth.levels}, {"p", c.synth.p},
                  {"seed", c.synth.seed}};
    return j;
}

RunConfig config_from_json(const json& j) {
    reject_unknown(j, {"input", "series", "wavelet", "scales", "q_grid", "fit_range", "mfdfa_mode", "mfdfa_scale",
                       "unfolding_degree", "histogram_bins", "histogram_convention", "standardize", "rmt_scale",
                       "output_dir", "threads", "quiet", "synth"},
                   "");
    RunConfig c;
    if (const auto it = j.find("input"); it != j.end()) {
        reject_unknown(*it, {"path", "ticker", "date", "price", "delimiter"}, "input.");
        std::string path, delimiter = ",";
        read(*it, "path", path, "input.");
        read(*it, "ticker", c.columns.ticker, "input.");
        read(*it, "date", c.columns.date, "input.");
        read(*it, "price", c.columns.price, "input.");
        read(*it, "delimiter", delimiter, "input.");
        if (delimiter == "\\t") delimiter = "\t";
        if (delimiter.size() != 1) fail("key 'input.delimiter' must be a single character");
        c.input = path;
        c.columns.delimiter = delimiter[0];
    }
    std::string series, output_dir = c.output_dir.string(), mode = "multiscale", convention = "density";
    read(j, "series", series);
    read(j, "wavelet", c.wavelet);
    read(j, "scales", c.scales);
    if (const auto it = j.find("q_grid"); it != j.end()) {
        reject_unknown(*it, {"min", "max", "step"}, "q_grid.");
        read(*it, "min", c.q_grid.min, "q_grid.");
        read(*it, "max", c.q_grid.max, "q_grid.");
        read(*it, "step", c.q_grid.step, "q_grid.");
    }
    if (const auto it = j.find("fit_range"); it != j.end()) {
        std::vector<double> range;
        read(j, "fit_range", range);
        if (range.size() != 2) fail("key 'fit_range' must be [s_lo, s_hi]");
        c.fit_lo = range[0];
        c.fit_hi = range[1];
    }
    read(j, "mfdfa_mode", mode);
    read(j, "mfdfa_scale", c.mfdfa_scale);
    read(j, "unfolding_degree", c.unfolding_degree);
    read(j, "histogram_bins", c.histogram_bins);
    read(j, "histogram_convention", convention);
    read(j, "standardize", c.standardize);
    read(j, "rmt_scale", c.rmt_scale);
    read(j, "output_dir", output_dir);
    read(j, "threads", c.threads);
    read(j, "quiet", c.quiet);
    if (const auto it = j.find("synth"); it != j.end()) {
        reject_unknown(*it, {"kind", "length", "size", "n_series", "levels", "p", "seed"}, "synth.");
        read(*it, "kind", c.synth.kind, "synth.");
        read(*it, "length", c.synth.length, "synth.");
        read(*it, "size", c.synth.size, "synth.");
        read(*it, "n_series", c.synth.n_series, "synth.");
        read(*it, "levels", c.synth.levels, "synth.");
        read(*it, "p", c.synth.p, "synth.");
        read(*it, "seed", c.synth.seed, "synth.");
    }
    c.series = series;
    c.output_dir = output_dir;

    if (mode == "multiscale")
        c.mfdfa_mode = MfdfaMode::multiscale;
    else if (mode == "single_series")
        c.mfdfa_mode = MfdfaMode::single_series;
    else
        fail("key 'mfdfa_mode' must be 'multiscale' or 'single_series'");
    if (convention == "density")
        c.histogram_convention = HistogramConvention::density;
    else if (convention == "counts")
        c.histogram_convention = HistogramConvention::counts;
    else
        fail("key 'histogram_convention' must be 'density' or 'counts'");
    if (c.wavelet < 2 || c.wavelet > 20 || c.wavelet % 2 != 0) fail("key 'wavelet' must be an even index in [2, 20]");
    for (int a : c.scales)
        if (a < 1) fail("key 'scales' entries must be >= 1");
    if (c.unfolding_degree < 3) fail("key 'unfolding_degree' must be >= 3");
    if (c.threads < 1) fail("key 'threads' must be >= 1");
    c.q_grid.values();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "config", "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    json j;
    try {
        j = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; translate it to line/column.
        const std::string text = buffer.str();
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        fail(path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "config", "cannot write " + path.string());
    out << to_json(config).dump(2) << '\n';
}

std::string config_hash(const RunConfig& config) {
    auto j = to_json(config);
    j.erase("output_dir");
    j.erase("threads");
    j.erase("quiet");
    const std::string text = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace wbrmt
