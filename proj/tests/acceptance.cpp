// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "wbrmt/config.hpp"
#include "wbrmt/error.hpp"
#include "wbrmt/ingest.hpp"
#include "wbrmt/mfdfa.hpp"
#include "wbrmt/pipeline.hpp"
#include "wbrmt/rmt.hpp"
#include "wbrmt/synth.hpp"
#include "wbrmt/wavelet.hpp"
#include "wbrmt/wbfe.hpp"

using namespace wbrmt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::vector<double> polynomial(std::size_t n, int degree) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(n);
        x[t] = 1.0;
        for (int d = 1; d <= degree; ++d) x[t] += std::pow(u - 0.3, d) * (d % 2 ? 2.0 : -1.5);
    }
    return x;
}

MfdfaResult analyze_returns(const std::vector<double>& r) {
    return analyze_profile(build_profile(normalize_returns(r).values), WaveletFilter(4));
}

std::size_t index_of(const std::vector<double>& grid, double q) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i] - q) < 1e-12) return i;
    throw std::runtime_error("q not on grid");
}

Outcome wavelet_round_trip() {
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<std::size_t> length(256, 8192);
    std::uniform_int_distribution<int> half_index(1, 10);
    std::normal_distribution<double> normal;
    const auto start = Clock::now();
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = length(gen);
        const auto f = daubechies_filter(2 * half_index(gen));
        std::uniform_int_distribution<int> levels(1, max_levels(n));
        std::vector<double> x(n);
        for (double& v : x) v = normal(gen);
        const auto y = dwt_inverse(dwt_forward(x, f, levels(gen)), f);
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            num += (y[t] - x[t]) * (y[t] - x[t]);
            den += x[t] * x[t];
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-10 && elapsed < 30.0, fmt("max relative error %.3g over 1000 signals in %.2f s", worst, elapsed)};
}

double interior_detail_ratio(int index, int degree) {
    const std::size_t n = 4096;
    const auto f = daubechies_filter(index);
    const auto x = polynomial(n, degree);
    double sup = 0.0;
    for (double v : x) sup = std::max(sup, std::abs(v));
    const auto d = dwt_forward(x, f, 4);
    double worst = 0.0;
    for (int j = 1; j <= 4; ++j) {
        const auto& det = d.detail[static_cast<std::size_t>(j - 1)];
        for (std::size_t k = 0; k < det.size(); ++k)
            // Coefficient k at level j only touches unwrapped samples when 2^j (k + taps) <= n.
            if ((std::size_t{1} << j) * (k + f.support_width()) <= n) worst = std::max(worst, std::abs(det[k]) / sup);
    }
    return worst;
}

Outcome vanishing_moments() {
    const double ramp = interior_detail_ratio(4, 1);
    const double cubic = interior_detail_ratio(8, 3);
    return {ramp <= 1e-8 && cubic <= 1e-8, fmt("Db-4 ramp %.3g, Db-8 cubic %.3g (relative to sup|x|)", ramp, cubic)};
}

Outcome monofractal_oracle() {
    double sum_h2 = 0.0, worst_spread = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto sp = analyze_returns(white_noise(1 << 16, seed)).spectrum;
        sum_h2 += sp.h[index_of(sp.q, 2.0)];
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < sp.q.size(); ++i)
            if (std::abs(sp.q[i]) <= 4.0) {
                lo = std::min(lo, sp.h[i]);
                hi = std::max(hi, sp.h[i]);
            }
        worst_spread = std::max(worst_spread, hi - lo);
    }
    const double mean_h2 = sum_h2 / 20.0;
    return {std::abs(mean_h2 - 0.5) <= 0.05 && worst_spread <= 0.1,
            fmt("mean h(2) = %.4f, max spread over q in [-4, 4] = %.4f (20 seeds)", mean_h2, worst_spread)};
}

Outcome multifractal_oracle() {
    const auto sp = analyze_returns(binomial_cascade(14, 0.75)).spectrum;
    double worst_h = 0.0;
    std::string per_q;
    for (double q : {-4.0, -2.0, -1.0, 1.0, 2.0, 4.0}) {
        const double h = sp.h[index_of(sp.q, q)];
        const double want = 1.0 / q - std::log(std::pow(0.75, q) + std::pow(0.25, q)) / (q * std::numbers::ln2);
        worst_h = std::max(worst_h, std::abs(h - want));
        per_q += fmt(" h(%g)=%.3f/%.3f", q, h, want);
    }
    double curvature = -INFINITY;
    for (std::size_t i = 1; i + 1 < sp.tau.size(); ++i)
        curvature = std::max(curvature, sp.tau[i + 1] - 2.0 * sp.tau[i] + sp.tau[i - 1]);
    const double f_max = *std::max_element(sp.f_beta.begin(), sp.f_beta.end());
    const bool pass = worst_h <= 0.05 && curvature <= 0.0 && std::abs(f_max - 1.0) <= 0.02;
    return {pass, fmt("max |h - closed form| = %.4f, max second difference of tau = %.3g, max f = %.4f;",
                      worst_h, curvature, f_max) +
                      per_q};
}

Outcome mp_law() {
    const auto p = mp_bounds(5799.0 / 196.0);
    std::vector<double> pooled;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto e = eigenvalues_sym(correlation_matrix(wishart_panel(196, 5799, seed)).matrix);
        pooled.insert(pooled.end(), e.begin(), e.end());
    }
    std::sort(pooled.begin(), pooled.end());
    const double inside = mp_inside_fraction(pooled, p);
    const auto chi = mp_chi_square(pooled, p);
    return {inside >= 0.99 && chi.p_value >= 0.01,
            fmt("bounds [%.4f, %.4f], inside %.4f of %zu eigenvalues, chi2 = %.2f on %zu bins, p = %.3f",
                p.lambda_min, p.lambda_max, inside, pooled.size(), chi.statistic, chi.bins, chi.p_value)};
}

Outcome goe_spacings() {
    std::vector<double> s;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto u = unfold_eigenvalues(eigenvalues_sym(goe_matrix(196, seed)));
        s.insert(s.end(), u.spacings.begin(), u.spacings.end());
    }
    const double ks = ks_wigner(s);
    const double mean = testing::mean(s);
    const auto fit = fit_spacing_density(s, HistogramConvention::density);
    const double ea = std::abs(fit.a / (std::numbers::pi / 2.0) - 1.0);
    const double eb = std::abs(fit.b / (std::numbers::pi / 4.0) - 1.0);
    return {ks <= 0.03 && std::abs(mean - 1.0) <= 0.05 && ea <= 0.05 && eb <= 0.05,
            fmt("KS %.4f over %zu spacings, mean spacing %.4f, a = %.4f (%.1f%%), b = %.4f (%.1f%%)", ks, s.size(),
                mean, fit.a, 100.0 * ea, fit.b, 100.0 * eb)};
}

Outcome eigensolver_oracle() {
    double worst = 0.0;
    std::uint64_t seed = 5000;
    for (int k = 0; k < 1000; ++k) {
        const int n = 1 + k % 8;
        const auto a = testing::random_symmetric(n, seed++);
        const auto got = eigenvalues_sym(a);
        const auto want = testing::bisection_eigenvalues(a);
        for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    }
    double trace_err = 0.0;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        for (const Eigen::MatrixXd& m : {goe_matrix(196, s), correlation_matrix(wishart_panel(196, 1000, s)).matrix}) {
            const auto e = eigenvalues_sym(m);
            double sum = 0.0;
            for (double v : e) sum += v;
            trace_err = std::max(trace_err, std::abs(sum - m.trace()));
        }
    }
    return {worst <= 1e-8 && trace_err <= 1e-6 * 196,
            fmt("max eigenvalue error %.3g over 1000 matrices up to 8x8, max 196x196 trace error %.3g", worst,
                trace_err)};
}

struct Corpus {
    testing::TempDir dir{"acceptance"};
    fs::path panel;
};

PipelineResult run(RunConfig config, Subcommand command, const fs::path& out) {
    config.output_dir = out;
    config.quiet = true;
    std::ostringstream log;
    return run_pipeline(config, command, Logger(log, true));
}

Outcome full_sweep(const Corpus& corpus, std::vector<std::string>& lines) {
    RunConfig c;
    c.input = corpus.panel;
    const auto start = Clock::now();
    const auto r = run(c, Subcommand::sweep, corpus.dir / "sweep");
    const double elapsed = seconds_since(start);
    const auto j = nlohmann::json::parse(testing::read_file(corpus.dir / "sweep" / "sweep_report.json"));
    bool complete = j["scales"].size() == 12;
    for (int a = 1; a <= 12 && complete; ++a) {
        const auto& e = j["scales"][std::to_string(a)];
        complete = e.contains("mp") && e.contains("ks");
        if (!complete) break;
        lines.push_back(fmt("    scale %2d: MP-inside %.3f, spacing KS %.4f, unfolding degree %d", a,
                            e["mp"]["inside_fraction"].get<double>(), e["ks"].get<double>(),
                            e["unfolding_degree"].get<int>()));
    }
    return {r.exit_code == kExitOk && complete && elapsed < 600.0,
            fmt("exit %d, %zu scale entries, %.1f s", r.exit_code, j["scales"].size(), elapsed)};
}

Outcome fq_continuity() {
    const WaveletFilter f(4);
    const std::vector<double> q{-0.01, 0.0, 0.01};
    std::map<std::string, double> worst;

    auto check = [&](const std::string& name, const std::vector<double>& returns) {
        const auto y = build_profile(normalize_returns(returns).values);
        std::vector<FluctuationSeries> series;
        for (int a : admissible_scales(y.size(), f.support_width())) series.push_back(extract_fluctuations(y, f, a));
        const auto ff = multiscale_fluctuation_function(series, q, f.support_width());
        const double s_hi = static_cast<double>(y.size()) / 4.0;
        for (Eigen::Index j = 0; j < ff.values.cols(); ++j) {
            const double s = ff.s_grid[static_cast<std::size_t>(j)];
            if (s < 16.0 || s > s_hi) continue;
            const double f0 = ff.values(1, j);
            for (Eigen::Index i : {0, 2}) worst[name] = std::max(worst[name], std::abs(ff.values(i, j) - f0) / f0);
        }
    };
    for (std::uint64_t seed = 1; seed <= 20; ++seed) check("white noise", white_noise(1 << 16, seed));
    check("binomial cascade", binomial_cascade(14, 0.75));
    const auto panel = wishart_panel(196, 5799, 1);
    for (Eigen::Index i = 0; i < panel.rows(); ++i) {
        const auto row = panel.row(i);
        check("wishart panel rows", std::vector<double>(row.begin(), row.end()));
    }

    bool pass = true;
    std::string detail = "max |F_q - F_0| / F_0 at q = +-0.01 over fit-range s:";
    for (const auto& [name, value] : worst) {
        pass = pass && value <= 1e-3;
        detail += fmt(" %s %.3g;", name.c_str(), value);
    }
    return {pass, detail};
}

Outcome determinism(const Corpus& corpus) {
    RunConfig base;
    base.input = corpus.panel;
    std::vector<std::pair<std::string, RunConfig>> runs;
    for (auto command : {"ingest", "wbfe", "mfdfa", "rmt", "sweep"}) runs.emplace_back(command, base);
    for (auto kind : {"white_noise", "binomial_cascade", "goe", "wishart_panel"}) {
        RunConfig c;
        c.synth.kind = kind;
        c.synth.seed = 7;
        c.synth.size = 196;
        runs.emplace_back("synth", c);
    }
    RunConfig series;
    series.series = corpus.dir / "det_synth_binomial_cascade_a" / "synth_binomial_cascade.csv";

    std::size_t compared = 0;
    std::string mismatch;
    int tag = 0;
    for (auto& [name, config] : runs) {
        const auto command = *parse_subcommand(name);
        const auto label = name == "synth" ? "synth_" + config.synth.kind : name;
        const auto a = run(config, command, corpus.dir / ("det_" + label + "_a"));
        RunConfig threaded = config;
        threaded.threads = 4;
        const auto b = run(threaded, command, corpus.dir / ("det_" + label + "_b"));
        ++tag;
        if (a.exit_code != kExitOk || b.exit_code != kExitOk || a.artifacts.size() != b.artifacts.size()) {
            mismatch += " " + label + " (exit or artifact count)";
            continue;
        }
        for (std::size_t k = 0; k < a.artifacts.size(); ++k) {
            ++compared;
            if (testing::read_file(a.artifacts[k]) != testing::read_file(b.artifacts[k]))
                mismatch += " " + a.artifacts[k].filename().string();
        }
    }
    {
        const auto a = run(series, Subcommand::mfdfa, corpus.dir / "det_series_a");
        const auto b = run(series, Subcommand::mfdfa, corpus.dir / "det_series_b");
        for (std::size_t k = 0; k < a.artifacts.size() && k < b.artifacts.size(); ++k, ++compared)
            if (testing::read_file(a.artifacts[k]) != testing::read_file(b.artifacts[k]))
                mismatch += " series/" + a.artifacts[k].filename().string();
        if (a.exit_code != kExitOk || a.artifacts.size() != b.artifacts.size()) mismatch += " mfdfa --series";
    }
    return {mismatch.empty() && compared > 0,
            fmt("%zu artifacts compared across %d subcommand runs (1 vs 4 workers)", compared, tag + 1) +
                (mismatch.empty() ? "" : "; differing:" + mismatch)};
}

}  // namespace

int main() {
    Corpus corpus;
    {
        RunConfig c;
        c.synth.kind = "wishart_panel";
        c.synth.n_series = 196;
        c.synth.length = 5799;
        c.synth.seed = 1;
        run(c, Subcommand::synth, corpus.dir.path());
        corpus.panel = corpus.dir / "synth_wishart_panel.csv";
    }

    std::vector<std::string> sweep_lines;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"wavelet round trip", wavelet_round_trip},
        {"vanishing moments", vanishing_moments},
        {"monofractal oracle", monofractal_oracle},
        {"multifractal oracle", multifractal_oracle},
        {"Marchenko-Pastur law", mp_law},
        {"GOE spacings", goe_spacings},
        {"eigensolver oracle", eigensolver_oracle},
        {"full sweep on the Wishart corpus", [&] { return full_sweep(corpus, sweep_lines); }},
        {"F_q continuity at q = 0", fq_continuity},
        {"determinism", [&] { return determinism(corpus); }},
    };

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
        if (k == 7)
            for (const auto& line : sweep_lines) std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
