#include "wbrmt/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "wbrmt/error.hpp"
#include "wbrmt/ingest.hpp"
#include "wbrmt/mfdfa.hpp"
#include "wbrmt/report.hpp"
#include "wbrmt/rmt.hpp"
#include "wbrmt/synth.hpp"
#include "wbrmt/wavelet.hpp"
#include "wbrmt/wbfe.hpp"

namespace wbrmt {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kNames[] = {"ingest", "wbfe", "mfdfa", "rmt", "sweep", "synth"};

std::string scale_tag(int scale) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d", scale);
    return buf;
}

struct Context {
    const RunConfig& config;
    const Logger& log;
    std::string hash;
    PipelineResult result;

    fs::path out(const std::string& name) {
        auto path = config.output_dir / name;
        result.artifacts.push_back(path);
        return path;
    }
};

LoadResult load_input(const RunConfig& config) {
    if (config.input.empty()) throw Error(ErrorCode::config, "cli", "no input file (set 'input' or --input)");
    return load_price_panel(config.input, config.columns);
}

MfdfaOptions mfdfa_options(const RunConfig& config, std::size_t length, const WaveletFilter& filter) {
    MfdfaOptions opt;
    opt.q_grid = config.q_grid.values();
    opt.fit_lo = config.fit_lo;
    opt.fit_hi = config.fit_hi;
    opt.mode = config.mfdfa_mode;
    opt.series_scale = config.mfdfa_scale;
    if (!config.scales.empty()) {
        const auto ok = admissible_scales(length, filter.support_width());
        for (int a : config.scales)
            if (std::find(ok.begin(), ok.end(), a) != ok.end()) opt.scales.push_back(a);
        if (opt.scales.empty())
            throw Error(ErrorCode::scale_range, "mfdfa", "none of the configured scales is usable for MFDFA");
    }
    return opt;
}

SweepConfig sweep_config(const RunConfig& config) {
    SweepConfig sc;
    sc.unfolding_degree = config.unfolding_degree;
    if (config.histogram_bins > 0) sc.bins = config.histogram_bins;
    sc.convention = config.histogram_convention;
    sc.standardize = config.standardize;
    sc.threads = config.threads;
    return sc;
}

struct MfdfaTables {
    std::vector<std::string> names;
    std::vector<MfdfaResult> results;
};

void write_mfdfa(Context& ctx, const MfdfaTables& tables) {
    CsvWriter hq(ctx.out("mfdfa_hq.csv"), ctx.hash);
    hq.header({"ticker", "q", "h", "tau", "r_squared"});
    CsvWriter fq(ctx.out("mfdfa_fq.csv"), ctx.hash);
    fq.header({"ticker", "q", "s", "F_q"});
    CsvWriter spec(ctx.out("mfdfa_spectrum.csv"), ctx.hash);
    spec.header({"ticker", "q", "beta", "f_beta"});

    for (std::size_t i = 0; i < tables.names.size(); ++i) {
        const auto& name = tables.names[i];
        const auto& sp = tables.results[i].spectrum;
        const auto& ff = tables.results[i].fluctuation;
        for (std::size_t k = 0; k < sp.q.size(); ++k)
            hq.cell(name).cell(sp.q[k]).cell(sp.h[k]).cell(sp.tau[k]).cell(sp.fit_quality[k]).end_row();
        for (std::size_t k = 0; k < ff.q_grid.size(); ++k)
            for (std::size_t j = 0; j < ff.s_grid.size(); ++j)
                fq.cell(name).cell(ff.q_grid[k]).cell(ff.s_grid[j])
                    .cell(ff.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j))).end_row();
        for (std::size_t k = 0; k < sp.beta.size(); ++k)
            spec.cell(name).cell(sp.q[k]).cell(sp.beta[k]).cell(sp.f_beta[k]).end_row();
    }
}

void run_ingest(Context& ctx) {
    const auto [panel, report] = load_input(ctx.config);
    ctx.log.info("ingest", "loaded " + std::to_string(panel.n_series()) + " tickers x " +
                               std::to_string(panel.n_dates()) + " dates");

    nlohmann::ordered_json j;
    j["meta"] = report_meta(ctx.hash);
    j["input"] = ctx.config.input.generic_string();
    j["n_series"] = panel.n_series();
    j["n_dates"] = panel.n_dates();
    j["n_returns"] = panel.n_returns();
    j["first_date"] = panel.dates().front();
    j["last_date"] = panel.dates().back();
    j["dropped_tickers"] = report.dropped_tickers;
    j["dropped_dates"] = report.dropped_dates;
    auto& rejected = j["rejected_rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rejected_rows) rejected.push_back({{"line", r.line}, {"reason", r.reason}});

    std::vector<ReturnSeries> returns;
    auto& stats = j["returns"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < panel.n_series(); ++i) {
        const auto& ticker = panel.tickers()[i];
        try {
            returns.push_back(compute_normalized_returns(panel.row(i)));
        } catch (const Error& e) {
            throw Error(e.code(), "ingest", "ticker " + ticker + ": " + e.what());
        }
        stats[ticker] = {{"mean_log_return", returns.back().mean_raw}, {"volatility", returns.back().volatility}};
    }
    write_json(ctx.out("ingest_report.json"), j);

    CsvWriter csv(ctx.out("returns.csv"), ctx.hash, {"normalized log-returns, one column per ticker"});
    csv.cell("date");
    for (const auto& t : panel.tickers()) csv.cell(t);
    csv.end_row();
    for (std::size_t t = 0; t < panel.n_returns(); ++t) {
        csv.cell(panel.dates()[t + 1]);
        for (const auto& r : returns) csv.cell(r.values[t]);
        csv.end_row();
    }
}

void run_wbfe(Context& ctx) {
    const auto panel = load_input(ctx.config).panel;
    const WaveletFilter filter(ctx.config.wavelet);
    const auto profiles = panel_profiles(panel);
    const auto scales = resolve_scales(ctx.config.scales, panel.n_returns());
    const auto panels = fluctuation_panels(profiles, panel.tickers(), filter, scales, ctx.config.threads);
    for (const auto& fp : panels) {
        for (const auto& ticker : fp.tickers)
            ctx.log.info("wbfe", "scrip=" + ticker + " scale=" + std::to_string(fp.scale) + " status=ok");
        CsvWriter csv(ctx.out("fluctuations_scale_" + scale_tag(fp.scale) + ".csv"), ctx.hash,
                      {"scale=" + std::to_string(fp.scale) + " wavelet=db" + std::to_string(filter.index())});
        csv.cell("t");
        for (const auto& t : fp.tickers) csv.cell(t);
        csv.end_row();
        for (Eigen::Index t = 0; t < fp.matrix.cols(); ++t) {
            csv.cell(static_cast<long long>(t));
            for (Eigen::Index i = 0; i < fp.matrix.rows(); ++i) csv.cell(fp.matrix(i, t));
            csv.end_row();
        }
    }
}

void run_mfdfa(Context& ctx) {
    const WaveletFilter filter(ctx.config.wavelet);
    MfdfaTables tables;
    auto analyze = [&](const std::string& name, const std::vector<double>& profile) {
        try {
            tables.results.push_back(analyze_profile(profile, filter, mfdfa_options(ctx.config, profile.size(), filter)));
        } catch (const Error& e) {
            throw Error(e.code(), "mfdfa", name + ": " + e.what());
        }
        tables.names.push_back(name);
        ctx.log.info("mfdfa", "scrip=" + name + " status=ok");
    };

    if (!ctx.config.series.empty()) {
        const auto values = read_series_file(ctx.config.series);
        analyze("series", build_profile(normalize_returns(values).values));
    } else {
        const auto panel = load_input(ctx.config).panel;
        const auto profiles = panel_profiles(panel);
        for (std::size_t i = 0; i < profiles.size(); ++i) analyze(panel.tickers()[i], profiles[i]);
    }
    write_mfdfa(ctx, tables);
}

void write_spectral_artifacts(Context& ctx, const SpectralResult& r) {
    if (!r.eigenvalues.empty())
        write_eigenvalue_histogram(ctx.out("eigenvalue_hist_scale_" + scale_tag(r.scale) + ".csv"), r, ctx.hash);
    if (!r.ok) return;
    write_spacing_histogram(ctx.out("spacing_hist_scale_" + scale_tag(r.scale) + ".csv"), r, ctx.hash);
}

void log_spectral(Context& ctx, const SpectralResult& r) {
    if (r.ok)
        ctx.log.info("rmt", "scale=" + std::to_string(r.scale) + " inside_fraction=" +
                                format_double(r.inside_fraction) + " ks=" + format_double(r.ks_stat));
    else
        ctx.log.error("rmt", "scale=" + std::to_string(r.scale) + " " + r.error);
}

void run_rmt(Context& ctx) {
    const auto panel = load_input(ctx.config).panel;
    const WaveletFilter filter(ctx.config.wavelet);
    const auto fp = fluctuation_panel(panel, filter, ctx.config.rmt_scale, ctx.config.threads);
    SpectralResult r;
    try {
        r = analyze_panel(fp, sweep_config(ctx.config));
    } catch (const Error& e) {
        throw Error(e.code(), "rmt", "scale " + std::to_string(fp.scale) + ": " + e.what());
    }
    log_spectral(ctx, r);
    nlohmann::ordered_json j;
    j["meta"] = report_meta(ctx.hash);
    j["scale"] = r.scale;
    j["result"] = spectral_to_json(r);
    write_json(ctx.out("rmt_report.json"), j);
    write_spectral_artifacts(ctx, r);
}

void run_sweep(Context& ctx) {
    const auto panel = load_input(ctx.config).panel;
    const WaveletFilter filter(ctx.config.wavelet);
    const auto profiles = panel_profiles(panel);
    const auto scales = resolve_scales(ctx.config.scales, panel.n_returns());
    const auto panels = fluctuation_panels(profiles, panel.tickers(), filter, scales, ctx.config.threads);
    for (const auto& fp : panels)
        for (const auto& ticker : fp.tickers)
            ctx.log.info("wbfe", "scrip=" + ticker + " scale=" + std::to_string(fp.scale) + " status=ok");

    const auto report = scale_sweep(panels, sweep_config(ctx.config));
    for (const auto& r : report.scales) log_spectral(ctx, r);

    // MFDFA reuses the sweep's fluctuation panels where the scale is admissible.
    MfdfaTables tables;
    nlohmann::ordered_json mfdfa_failures = nlohmann::ordered_json::array();
    const auto opt = mfdfa_options(ctx.config, panel.n_returns(), filter);
    const auto usable = opt.scales.empty() ? admissible_scales(panel.n_returns(), filter.support_width()) : opt.scales;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& ticker = panel.tickers()[i];
        try {
            MfdfaResult res;
            if (opt.mode == MfdfaMode::multiscale) {
                std::vector<FluctuationSeries> series;
                for (const auto& fp : panels) {
                    if (std::find(usable.begin(), usable.end(), fp.scale) == usable.end()) continue;
                    const Eigen::VectorXd row = fp.matrix.row(static_cast<Eigen::Index>(i)).transpose();
                    series.push_back({fp.scale, std::vector<double>(row.data(), row.data() + row.size()), true});
                }
                for (int a : usable)
                    if (std::none_of(series.begin(), series.end(), [a](const auto& s) { return s.scale == a; }))
                        series.push_back(extract_fluctuations(profiles[i], filter, a));
                std::sort(series.begin(), series.end(), [](const auto& x, const auto& y) { return x.scale < y.scale; });
                res.fluctuation = multiscale_fluctuation_function(series, opt.q_grid, filter.support_width());
                const double hi = opt.fit_hi > 0.0 ? opt.fit_hi : static_cast<double>(profiles[i].size()) / 4.0;
                res.spectrum = spectrum_from(res.fluctuation, opt.fit_lo, hi);
            } else {
                res = analyze_profile(profiles[i], filter, opt);
            }
            tables.names.push_back(ticker);
            tables.results.push_back(std::move(res));
            ctx.log.info("mfdfa", "scrip=" + ticker + " status=ok");
        } catch (const Error& e) {
            ctx.log.error("mfdfa", "scrip=" + ticker + " " + e.what());
            mfdfa_failures.push_back({{"ticker", ticker}, {"error", e.what()}});
        }
    }

    auto j = sweep_to_json(report, ctx.hash);
    j["mfdfa_failures"] = mfdfa_failures;
    write_json(ctx.out("sweep_report.json"), j);
    for (const auto& r : report.scales) write_spectral_artifacts(ctx, r);
    if (!tables.names.empty()) write_mfdfa(ctx, tables);

    if (report.failures() > 0 || !mfdfa_failures.empty()) {
        ctx.log.error("sweep", std::to_string(report.failures()) + " scale(s) and " +
                                   std::to_string(mfdfa_failures.size()) + " MFDFA series failed");
        ctx.result.exit_code = kExitPartial;
    }
}

void run_synth(Context& ctx) {
    const auto& s = ctx.config.synth;
    const std::string seed = "seed=" + std::to_string(s.seed);
    const auto path = ctx.out("synth_" + s.kind + ".csv");
    if (s.kind == "white_noise" || s.kind == "binomial_cascade") {
        const bool noise = s.kind == "white_noise";
        const auto values = noise ? white_noise(s.length, s.seed) : binomial_cascade(s.levels, s.p);
        CsvWriter csv(path, ctx.hash,
                      {"kind=" + s.kind + " " +
                       (noise ? seed + " length=" + std::to_string(s.length)
                              : "levels=" + std::to_string(s.levels) + " p=" + format_double(s.p))});
        csv.header({"index", "value"});
        for (std::size_t k = 0; k < values.size(); ++k) csv.cell(static_cast<long long>(k)).cell(values[k]).end_row();
    } else if (s.kind == "goe") {
        const auto m = goe_matrix(s.size, s.seed);
        CsvWriter csv(path, ctx.hash, {"kind=goe " + seed + " size=" + std::to_string(s.size)});
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index k = 0; k < m.cols(); ++k) csv.cell(m(i, k));
            csv.end_row();
        }
    } else if (s.kind == "wishart_panel") {
        const auto panel = wishart_price_panel(s.n_series, s.length + 1, s.seed);
        CsvWriter csv(path, ctx.hash,
                      {"kind=wishart_panel " + seed + " n_series=" + std::to_string(s.n_series) +
                       " returns=" + std::to_string(s.length)});
        csv.header({"ticker", "date", "price"});
        for (std::size_t i = 0; i < panel.n_series(); ++i)
            for (std::size_t t = 0; t < panel.n_dates(); ++t)
                csv.cell(panel.tickers()[i]).cell(panel.dates()[t])
                    .cell(panel.prices()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t))).end_row();
    } else {
        throw Error(ErrorCode::config, "synth", "unknown kind '" + s.kind + "'");
    }
    ctx.log.info("synth", "wrote " + path.generic_string());
}

}  // namespace

std::optional<Subcommand> parse_subcommand(std::string_view name) {
    for (std::size_t k = 0; k < std::size(kNames); ++k)
        if (kNames[k] == name) return static_cast<Subcommand>(k);
    return std::nullopt;
}

std::string_view to_string(Subcommand command) { return kNames[static_cast<std::size_t>(command)]; }

void Logger::info(std::string_view module, std::string_view message) const {
    if (!quiet_) *out_ << "level=info module=" << module << ' ' << message << '\n';
}

void Logger::error(std::string_view module, std::string_view message) const {
    *out_ << "level=error module=" << module << ' ' << message << '\n';
}

std::vector<int> resolve_scales(const std::vector<int>& requested, std::size_t length) {
    std::vector<int> scales = requested;
    if (scales.empty())
        for (int a = 1; a <= max_levels(length); ++a) scales.push_back(a);
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
    return scales;
}

std::vector<double> read_series_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cli", "cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool seen_row = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::string_view field(line);
        if (const auto comma = field.rfind(','); comma != std::string_view::npos) field.remove_prefix(comma + 1);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\r' || field.back() == '\t')) field.remove_suffix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        const bool ok = ec == std::errc{} && ptr == field.data() + field.size() && std::isfinite(v);
        if (!ok) {
            if (!seen_row) {
                seen_row = true;
                continue;
            }
            throw Error(ErrorCode::invalid_input, "cli",
                        path.string() + ":" + std::to_string(line_no) + ": non-numeric value '" + std::string(field) + "'");
        }
        seen_row = true;
        values.push_back(v);
    }
    return values;
}

PipelineResult run_pipeline(const RunConfig& config, Subcommand command, const Logger& log) {
    Context ctx{config, log, config_hash(config), {}};
    try {
        std::error_code ec;
        fs::create_directories(config.output_dir, ec);
        if (ec) throw Error(ErrorCode::io, "cli", "cannot create " + config.output_dir.string() + ": " + ec.message());
        log.info("cli", "command=" + std::string(to_string(command)) + " config_hash=" + ctx.hash);
        switch (command) {
            case Subcommand::ingest: run_ingest(ctx); break;
            case Subcommand::wbfe: run_wbfe(ctx); break;
            case Subcommand::mfdfa: run_mfdfa(ctx); break;
            case Subcommand::rmt: run_rmt(ctx); break;
            case Subcommand::sweep: run_sweep(ctx); break;
            case Subcommand::synth: run_synth(ctx); break;
        }
    } catch (const Error& e) {
        log.error(e.module(), std::string("code=") + std::string(to_string(e.code())) + " " + e.what());
        ctx.result.exit_code = kExitFatal;
    }
    return std::move(ctx.result);
}

}  // namespace wbrmt
