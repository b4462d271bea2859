// wbrmt: command-line front end for the batch pipeline.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wbrmt/config.hpp"
#include "wbrmt/error.hpp"
#include "wbrmt/pipeline.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string input;
    std::string series;
    std::string output;
    std::string write_config;
    std::size_t threads = 1;
    std::vector<int> scales;
    int wavelet = 4;
    int rmt_scale = 5;
    double fit_lo = 16.0;
    double fit_hi = 0.0;
    int unfolding_degree = 5;
    std::size_t bins = 0;
    std::string convention;
    std::string mode;
    wbrmt::SynthSpec synth;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet-based multifractal and random-matrix analysis of price panels"};
    app.set_version_flag("--version", std::string(wbrmt::kToolName) + " " + wbrmt::kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Overrides o;
    bool quiet = false;
    std::vector<CLI::Option*> set;
    auto add = [&](CLI::Option* opt) {
        set.push_back(opt);
        return opt;
    };

    app.add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    auto* input = add(app.add_option("-i,--input", o.input, "long-format price CSV (ticker,date,price)"));
    auto* series = add(app.add_option("--series", o.series, "single-column series, treated as returns (mfdfa)"));
    auto* output = add(app.add_option("-o,--output", o.output, "output directory"));
    auto* threads = add(app.add_option("-j,--threads", o.threads, "worker threads")->check(CLI::Range(1, 256)));
    auto* scales = add(app.add_option("--scales", o.scales, "wavelet scales, e.g. 1,2,3")->delimiter(','));
    auto* wavelet = add(app.add_option("--wavelet", o.wavelet, "Daubechies filter length (2..20, even)"));
    auto* rmt_scale = add(app.add_option("--rmt-scale", o.rmt_scale, "scale analysed by 'rmt'"));
    auto* fit_lo = add(app.add_option("--fit-lo", o.fit_lo, "smallest segment size in the h(q) fit"));
    auto* fit_hi = add(app.add_option("--fit-hi", o.fit_hi, "largest segment size in the h(q) fit (0: T/4)"));
    auto* degree = add(app.add_option("--unfolding-degree", o.unfolding_degree, "unfolding polynomial degree"));
    auto* bins = add(app.add_option("--bins", o.bins, "spacing histogram bins (0: Freedman-Diaconis)"));
    auto* convention = add(app.add_option("--convention", o.convention, "spacing histogram convention")
                               ->check(CLI::IsMember({"density", "counts"})));
    auto* mode = add(app.add_option("--mfdfa-mode", o.mode, "MFDFA mode")
                         ->check(CLI::IsMember({"multiscale", "single_series"})));
    app.add_flag("-q,--quiet", quiet, "suppress progress lines");
    app.add_option("--write-config", o.write_config, "write the effective configuration and exit");

    std::vector<CLI::App*> commands;
    commands.push_back(app.add_subcommand("ingest", "load a price panel; write returns and a load report"));
    commands.push_back(app.add_subcommand("wbfe", "write wavelet fluctuation panels per scale"));
    commands.push_back(app.add_subcommand("mfdfa", "generalized Hurst exponents and singularity spectra"));
    commands.push_back(app.add_subcommand("rmt", "correlation spectrum at one scale against MP and GOE"));
    commands.push_back(app.add_subcommand("sweep", "rmt at every scale plus mfdfa; exit 2 on partial failure"));
    auto* synth = app.add_subcommand("synth", "write a seeded synthetic fixture");
    commands.push_back(synth);

    std::vector<CLI::Option*> synth_set;
    synth_set.push_back(synth->add_option("--kind", o.synth.kind, "fixture kind")
                            ->check(CLI::IsMember({"white_noise", "binomial_cascade", "goe", "wishart_panel"})));
    synth_set.push_back(synth->add_option("--size", o.synth.size, "GOE matrix size"));
    synth_set.push_back(synth->add_option("--length", o.synth.length, "white-noise length or returns per series"));
    synth_set.push_back(synth->add_option("--n-series", o.synth.n_series, "wishart_panel series"));
    synth_set.push_back(synth->add_option("--levels", o.synth.levels, "cascade levels"));
    synth_set.push_back(synth->add_option("--p", o.synth.p, "cascade weight"));
    synth_set.push_back(synth->add_option("--seed", o.synth.seed, "random seed"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : wbrmt::kExitFatal;
    }

    const wbrmt::Logger log(std::cerr, quiet);
    wbrmt::RunConfig config;
    try {
        if (!o.config.empty()) config = wbrmt::load_config(o.config);
    } catch (const wbrmt::Error& e) {
        log.error(e.module(), e.what());
        return wbrmt::kExitFatal;
    }

    auto given = [](CLI::Option* opt) { return opt->count() > 0; };
    if (given(input)) config.input = o.input;
    if (given(series)) config.series = o.series;
    if (given(output)) config.output_dir = o.output;
    if (given(threads)) config.threads = o.threads;
    if (given(scales)) config.scales = o.scales;
    if (given(wavelet)) config.wavelet = o.wavelet;
    if (given(rmt_scale)) config.rmt_scale = o.rmt_scale;
    if (given(fit_lo)) config.fit_lo = o.fit_lo;
    if (given(fit_hi)) config.fit_hi = o.fit_hi;
    if (given(degree)) config.unfolding_degree = o.unfolding_degree;
    if (given(bins)) config.histogram_bins = o.bins;
    if (given(convention))
        config.histogram_convention =
            o.convention == "counts" ? wbrmt::HistogramConvention::counts : wbrmt::HistogramConvention::density;
    if (given(mode))
        config.mfdfa_mode = o.mode == "single_series" ? wbrmt::MfdfaMode::single_series : wbrmt::MfdfaMode::multiscale;
    if (given(synth_set[0])) config.synth.kind = o.synth.kind;
    if (given(synth_set[1])) config.synth.size = o.synth.size;
    if (given(synth_set[2])) config.synth.length = o.synth.length;
    if (given(synth_set[3])) config.synth.n_series = o.synth.n_series;
    if (given(synth_set[4])) config.synth.levels = o.synth.levels;
    if (given(synth_set[5])) config.synth.p = o.synth.p;
    if (given(synth_set[6])) config.synth.seed = o.synth.seed;
    config.quiet = quiet;

    if (!o.write_config.empty()) {
        try {
            wbrmt::save_config(config, o.write_config);
        } catch (const wbrmt::Error& e) {
            log.error(e.module(), e.what());
            return wbrmt::kExitFatal;
        }
        return wbrmt::kExitOk;
    }

    for (auto* cmd : commands)
        if (cmd->parsed()) return wbrmt::run_pipeline(config, *wbrmt::parse_subcommand(cmd->get_name()), log).exit_code;
    return wbrmt::kExitFatal;
}
