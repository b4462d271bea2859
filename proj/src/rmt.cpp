#include "wbrmt/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wbrmt/error.hpp"
#include "wbrmt/parallel.hpp"

namespace wbrmt {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, "rmt", message); }

double quantile(std::vector<double> sorted, double p) {
    std::sort(sorted.begin(), sorted.end());
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& data, std::span<const std::string> tickers,
                                     bool standardize) {
    const auto n = data.rows();
    const auto t = data.cols();
    if (n < 2) fail(ErrorCode::invalid_input, "need at least 2 series");
    if (t <= n) fail(ErrorCode::constraint, "need more observations than series (T > N)");

    Eigen::MatrixXd x = data;
    double sigma2 = 1.0;
    if (standardize) {
        for (Eigen::Index i = 0; i < n; ++i) {
            auto row = x.row(i);
            row.array() -= row.mean();
            const double sd = std::sqrt(row.squaredNorm() / static_cast<double>(t));
            if (!(sd > 0.0) || sd <= 1e-300) {
                const std::string who = static_cast<std::size_t>(i) < tickers.size()
                                            ? tickers[static_cast<std::size_t>(i)]
                                            : "row " + std::to_string(i);
                fail(ErrorCode::degenerate_series, "zero-variance fluctuations for " + who);
            }
            row /= sd;
        }
    } else {
        const double mean = x.mean();
        sigma2 = (x.array() - mean).square().sum() / static_cast<double>(x.size());
    }

    CorrelationMatrix out;
    out.matrix = Eigen::MatrixXd(n, n);
    out.matrix.triangularView<Eigen::Lower>() = (x * x.transpose()) / static_cast<double>(t);
    out.matrix.triangularView<Eigen::StrictlyUpper>() = out.matrix.transpose();
    if (standardize) out.matrix.diagonal().setOnes();
    out.n_series = static_cast<std::size_t>(n);
    out.length = static_cast<std::size_t>(t);
    out.sigma2 = sigma2;
    return out;
}

CorrelationMatrix correlation_matrix(const FluctuationPanel& panel, bool standardize) {
    return correlation_matrix(panel.matrix, panel.tickers, standardize);
}

std::vector<double> eigenvalues_sym(const Eigen::MatrixXd& matrix, const JacobiOptions& options) {
    const auto n = matrix.rows();
    if (n != matrix.cols()) fail(ErrorCode::invalid_input, "matrix must be square");
    if (!matrix.allFinite()) fail(ErrorCode::invalid_input, "matrix has non-finite entries");
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * std::max(1.0, matrix.cwiseAbs().maxCoeff())) fail(ErrorCode::invalid_input, "matrix is not symmetric");

    Eigen::MatrixXd a = 0.5 * (matrix + matrix.transpose());
    const double norm = a.norm();
    auto off_norm = [&] {
        double acc = 0.0;
        for (Eigen::Index q = 1; q < n; ++q)
            for (Eigen::Index p = 0; p < q; ++p) acc += 2.0 * a(p, q) * a(p, q);
        return std::sqrt(acc);
    };

    bool converged = norm == 0.0;
    for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
        if (off_norm() <= options.tolerance * norm) {
            converged = true;
            break;
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }
    if (!converged && off_norm() > options.tolerance * norm)
        fail(ErrorCode::numerical_failure,
             "Jacobi iteration did not converge in " + std::to_string(options.max_sweeps) + " sweeps");

    std::vector<double> eig(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

MpParams mp_bounds(double Q, double sigma2) {
    if (!(Q >= 1.0)) fail(ErrorCode::constraint, "Q = T/N must be at least 1, got " + std::to_string(Q));
    if (!(sigma2 > 0.0)) fail(ErrorCode::constraint, "sigma^2 must be positive");
    const double r = std::sqrt(1.0 / Q);
    MpParams p;
    p.Q = Q;
    p.sigma2 = sigma2;
    p.lambda_min = std::max(0.0, sigma2 * (1.0 + 1.0 / Q - 2.0 * r));
    p.lambda_max = sigma2 * (1.0 + 1.0 / Q + 2.0 * r);
    return p;
}

double mp_density(double lambda, const MpParams& params) {
    if (!(lambda > params.lambda_min) || !(lambda < params.lambda_max)) return 0.0;
    return params.Q / (2.0 * std::numbers::pi * params.sigma2) *
           std::sqrt((params.lambda_max - lambda) * (lambda - params.lambda_min)) / lambda;
}

double mp_cdf(double lambda, const MpParams& params) {
    if (lambda <= params.lambda_min) return 0.0;
    // lambda = lo + (hi - lo)(1 - cos u)/2 removes both square-root edges.
    const double lo = params.lambda_min, hi = params.lambda_max;
    const double half = 0.5 * (hi - lo);
    const double x = std::min(lambda, hi);
    const double upper = std::acos(std::clamp(1.0 - (x - lo) / half, -1.0, 1.0));
    auto integrand = [&](double u) {
        const double l = lo + half * (1.0 - std::cos(u));
        if (l <= 0.0) return 0.0;
        const double sn = std::sin(u);
        // sqrt((hi-l)(l-lo)) = half * sin u
        return params.Q / (2.0 * std::numbers::pi * params.sigma2) * half * sn / l * half * sn;
    };
    double value = 0.0;
    if (lo > 0.0) {
        value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, upper, 15, 1e-13);
    } else {
        // With lo = 0 the integrand tends to a finite limit at u = 0; avoid evaluating 0/0.
        auto safe = [&](double u) {
            if (u < 1e-8) u = 1e-8;
            return integrand(u);
        };
        value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(safe, 0.0, upper, 15, 1e-13);
    }
    return std::min(value, 1.0);
}

double mp_inside_fraction(std::span<const double> eigenvalues, const MpParams& params) {
    if (eigenvalues.empty()) return 0.0;
    const auto inside = std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](double l) {
        return l >= params.lambda_min && l <= params.lambda_max;
    });
    return static_cast<double>(inside) / static_cast<double>(eigenvalues.size());
}

std::size_t freedman_diaconis_bins(std::span<const double> samples, double lo, double hi) {
    if (samples.size() < 2) fail(ErrorCode::fit, "need at least 2 samples to bin");
    std::vector<double> v(samples.begin(), samples.end());
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    if (!(iqr > 0.0)) fail(ErrorCode::fit, "degenerate sample: zero interquartile range");
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(samples.size()));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
}

Histogram make_histogram(std::span<const double> samples, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) fail(ErrorCode::fit, "histogram needs a positive bin count and hi > lo");
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k)
        h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    h.counts.assign(bins, 0.0);
    for (double x : samples) {
        if (x < lo || x > hi) continue;
        auto k = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(bins));
        h.counts[std::min(k, bins - 1)] += 1.0;
        ++h.total;
    }
    return h;
}

ChiSquareResult mp_chi_square(std::span<const double> eigenvalues, const MpParams& params, std::size_t bins) {
    if (eigenvalues.size() < 10) fail(ErrorCode::fit, "too few eigenvalues for a chi-square test");
    const auto [mn, mx] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
    const double lo = *mn, hi = *mx;
    if (bins == 0) bins = freedman_diaconis_bins(eigenvalues, lo, hi);
    const auto hist = make_histogram(eigenvalues, lo, hi, bins);
    const double n = static_cast<double>(eigenvalues.size());

    // Outer bins absorb the tails so expected counts sum to n.
    std::vector<double> expected(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double a = k == 0 ? -1e300 : hist.edges[k];
        const double b = k + 1 == bins ? 1e300 : hist.edges[k + 1];
        expected[k] = n * (mp_cdf(b, params) - mp_cdf(a, params));
    }

    std::vector<double> obs_merged, exp_merged;
    double o = 0.0, e = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        o += hist.counts[k];
        e += expected[k];
        if (e >= 5.0) {
            obs_merged.push_back(o);
            exp_merged.push_back(e);
            o = e = 0.0;
        }
    }
    if (!exp_merged.empty()) {
        obs_merged.back() += o;
        exp_merged.back() += e;
    }
    if (exp_merged.size() < 2) fail(ErrorCode::fit, "too few populated bins for a chi-square test");

    ChiSquareResult r;
    for (std::size_t k = 0; k < exp_merged.size(); ++k) {
        const double d = obs_merged[k] - exp_merged[k];
        r.statistic += d * d / exp_merged[k];
    }
    r.bins = exp_merged.size();
    r.dof = r.bins - 1;
    boost::math::chi_squared dist(static_cast<double>(r.dof));
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

namespace {

/// Least-squares fit without the monotonicity check.
UnfoldedSpectrum fit_unfolding(std::span<const double> sorted_eigenvalues, int degree, UnfoldingAbscissa abscissa) {
    const std::size_t n = sorted_eigenvalues.size();
    if (n < 20) fail(ErrorCode::unfolding, "need at least 20 eigenvalues to unfold, got " + std::to_string(n));
    if (degree < 3) fail(ErrorCode::unfolding, "unfolding degree must be at least 3");
    if (static_cast<std::size_t>(degree) + 1 >= n) fail(ErrorCode::unfolding, "unfolding degree too high for the spectrum size");
    if (!std::is_sorted(sorted_eigenvalues.begin(), sorted_eigenvalues.end()))
        fail(ErrorCode::unfolding, "eigenvalues must be sorted ascending");

    if (abscissa == UnfoldingAbscissa::automatic)
        abscissa = sorted_eigenvalues.front() > 0.0 ? UnfoldingAbscissa::log : UnfoldingAbscissa::linear;
    if (abscissa == UnfoldingAbscissa::log && !(sorted_eigenvalues.front() > 0.0))
        fail(ErrorCode::unfolding, "log abscissa needs positive eigenvalues");
    auto to_x = [&](double lambda) { return abscissa == UnfoldingAbscissa::log ? std::log(lambda) : lambda; };

    const double lo = to_x(sorted_eigenvalues.front()), hi = to_x(sorted_eigenvalues.back());
    if (!(hi > lo)) fail(ErrorCode::unfolding, "spectrum has zero width");
    const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);

    const auto cols = static_cast<Eigen::Index>(degree + 1);
    auto basis = [&](double lambda) {
        const double x = (to_x(lambda) - mid) / half;
        Eigen::RowVectorXd row(cols);
        row(0) = 1.0;
        row(1) = x;
        for (Eigen::Index k = 2; k < cols; ++k) row(k) = 2.0 * x * row(k - 1) - row(k - 2);
        return row;
    };
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), cols);
    Eigen::VectorXd target(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        design.row(static_cast<Eigen::Index>(i)) = basis(sorted_eigenvalues[i]);
        target(static_cast<Eigen::Index>(i)) = static_cast<double>(i + 1);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(condition < 1e10))
        fail(ErrorCode::unfolding, "cumulative-spectrum fit is ill-conditioned (condition " + std::to_string(condition) +
                                       ") at degree " + std::to_string(degree) + "; try a lower degree");
    const Eigen::VectorXd coef = svd.solve(target);

    UnfoldedSpectrum out;
    out.raw.assign(sorted_eigenvalues.begin(), sorted_eigenvalues.end());
    out.unfolding_degree = degree;
    out.abscissa = abscissa;
    out.unfolded.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.unfolded[i] = basis(sorted_eigenvalues[i]).dot(coef);
    out.spacings = nn_spacings(out.unfolded);
    return out;
}

bool monotone(const UnfoldedSpectrum& u) { return std::is_sorted(u.unfolded.begin(), u.unfolded.end()); }

}  // namespace

UnfoldedSpectrum unfold_eigenvalues(std::span<const double> sorted_eigenvalues, int degree,
                                    UnfoldingAbscissa abscissa) {
    auto out = fit_unfolding(sorted_eigenvalues, degree, abscissa);
    if (!monotone(out))
        fail(ErrorCode::unfolding, "fitted cumulative spectrum is not monotone at degree " + std::to_string(degree) +
                                       "; try a lower degree");
    return out;
}

UnfoldedSpectrum unfold_with_fallback(std::span<const double> sorted_eigenvalues, int degree) {
    for (int d = degree; d > 3; --d) {
        auto out = fit_unfolding(sorted_eigenvalues, d, UnfoldingAbscissa::automatic);
        if (monotone(out)) return out;
    }
    return unfold_eigenvalues(sorted_eigenvalues, std::min(degree, 3));
}

std::vector<double> nn_spacings(std::span<const double> unfolded) {
    std::vector<double> s;
    if (unfolded.size() < 2) return s;
    s.reserve(unfolded.size() - 1);
    for (std::size_t i = 0; i + 1 < unfolded.size(); ++i) s.push_back(unfolded[i + 1] - unfolded[i]);
    return s;
}

double wigner_pdf(double s) {
    if (s < 0.0) fail(ErrorCode::domain, "spacing must be non-negative");
    return 0.5 * std::numbers::pi * s * std::exp(-0.25 * std::numbers::pi * s * s);
}

double wigner_cdf(double s) {
    if (s <= 0.0) return 0.0;
    return -std::expm1(-0.25 * std::numbers::pi * s * s);
}

double ks_wigner(std::span<const double> samples) {
    if (samples.empty()) fail(ErrorCode::fit, "no samples for the KS statistic");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = wigner_cdf(v[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

GoeFit fit_spacing_density(std::span<const double> spacings, HistogramConvention convention,
                           std::optional<std::size_t> bins) {
    if (spacings.size() < 100)
        fail(ErrorCode::fit, "need at least 100 spacings, got " + std::to_string(spacings.size()));
    if (std::any_of(spacings.begin(), spacings.end(), [](double s) { return !(s >= 0.0) || !std::isfinite(s); }))
        fail(ErrorCode::fit, "spacings must be finite and non-negative");
    const double hi = *std::max_element(spacings.begin(), spacings.end());
    if (!(hi > 0.0)) fail(ErrorCode::fit, "degenerate spacings: all zero");
    const std::size_t nbins = bins.value_or(freedman_diaconis_bins(spacings, 0.0, hi));

    GoeFit fit;
    fit.convention = convention;
    fit.histogram = make_histogram(spacings, 0.0, hi, nbins);
    const auto& h = fit.histogram;
    std::vector<double> x(nbins), y(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        x[k] = h.center(k);
        y[k] = convention == HistogramConvention::density ? h.density(k) : h.counts[k];
    }

    // Seed: ln(y/x) = ln a - b x^2 on populated bins, count-weighted.
    double sw = 0.0, su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
    for (std::size_t k = 0; k < nbins; ++k) {
        if (h.counts[k] <= 0.0 || x[k] <= 0.0) continue;
        const double w = h.counts[k];
        const double u = x[k] * x[k];
        const double v = std::log(y[k] / x[k]);
        sw += w;
        su += w * u;
        sv += w * v;
        suu += w * u * u;
        suv += w * u * v;
    }
    const double denom = sw * suu - su * su;
    if (!(sw > 0.0) || !(std::abs(denom) > 0.0)) fail(ErrorCode::fit, "degenerate spacing histogram: cannot seed the fit");
    double b = -(sw * suv - su * sv) / denom;
    double a = std::exp((sv + b * su) / sw);
    if (!(b > 0.0) || !std::isfinite(a)) b = 1.0, a = std::max(1e-12, *std::max_element(y.begin(), y.end()) * 2.0);

    auto sse = [&](double aa, double bb) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nbins; ++k) {
            const double r = y[k] - aa * x[k] * std::exp(-bb * x[k] * x[k]);
            acc += r * r;
        }
        return acc;
    };

    double current = sse(a, b);
    Eigen::Matrix2d jtj;
    for (int iter = 0; iter < 200; ++iter) {
        jtj.setZero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (std::size_t k = 0; k < nbins; ++k) {
            const double e = std::exp(-b * x[k] * x[k]);
            const double model = a * x[k] * e;
            const Eigen::Vector2d g(x[k] * e, -a * x[k] * x[k] * x[k] * e);
            jtj += g * g.transpose();
            jtr += g * (y[k] - model);
        }
        const Eigen::Vector2d step = jtj.ldlt().solve(jtr);
        if (!step.allFinite()) break;
        double scale = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
            const double na = a + scale * step(0), nb = b + scale * step(1);
            if (!(na > 0.0) || !(nb > 0.0)) continue;
            const double trial = sse(na, nb);
            if (trial <= current) {
                const double gain = current - trial;
                a = na;
                b = nb;
                improved = gain > 1e-15 * std::max(current, 1e-300);
                current = trial;
                break;
            }
        }
        if (!improved) break;
    }
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b) || b > 1e6)
        fail(ErrorCode::fit, "fit diverged (a=" + std::to_string(a) + ", b=" + std::to_string(b) +
                                 ", residual rms=" + std::to_string(std::sqrt(current / static_cast<double>(nbins))) + ")");

    fit.a = a;
    fit.b = b;
    fit.residual_rms = std::sqrt(current / static_cast<double>(nbins));
    if (nbins > 2) {
        jtj.setZero();
        for (std::size_t k = 0; k < nbins; ++k) {
            const double e = std::exp(-b * x[k] * x[k]);
            const Eigen::Vector2d g(x[k] * e, -a * x[k] * x[k] * x[k] * e);
            jtj += g * g.transpose();
        }
        const double dof = static_cast<double>(nbins - 2);
        const Eigen::Matrix2d cov = jtj.inverse() * (current / dof);
        const double t = boost::math::quantile(boost::math::students_t(dof), 0.975);
        const double da = t * std::sqrt(std::max(0.0, cov(0, 0)));
        const double db = t * std::sqrt(std::max(0.0, cov(1, 1)));
        fit.a_lo = a - da;
        fit.a_hi = a + da;
        fit.b_lo = b - db;
        fit.b_hi = b + db;
    }
    fit.ks_stat = ks_wigner(spacings);
    return fit;
}

std::size_t SweepReport::failures() const {
    return static_cast<std::size_t>(std::count_if(scales.begin(), scales.end(), [](const SpectralResult& r) { return !r.ok; }));
}

namespace {

void spectrum_stage(SpectralResult& r, const FluctuationPanel& panel, const SweepConfig& config) {
    r.scale = panel.scale;
    r.n_series = static_cast<std::size_t>(panel.matrix.rows());
    r.length = static_cast<std::size_t>(panel.matrix.cols());
    const auto corr = correlation_matrix(panel, config.standardize);
    r.eigenvalues = eigenvalues_sym(corr.matrix);
    r.mp = mp_bounds(static_cast<double>(r.length) / static_cast<double>(r.n_series), corr.sigma2);
    r.inside_fraction = mp_inside_fraction(r.eigenvalues, r.mp);
}

void spacing_stage(SpectralResult& r, const SweepConfig& config) {
    const auto unfolded = unfold_with_fallback(r.eigenvalues, config.unfolding_degree);
    r.unfolding_degree = unfolded.unfolding_degree;
    r.spacings = unfolded.spacings;
    r.mean_spacing = std::accumulate(r.spacings.begin(), r.spacings.end(), 0.0) / static_cast<double>(r.spacings.size());
    r.ks_stat = ks_wigner(r.spacings);
    r.goe = fit_spacing_density(r.spacings, config.convention, config.bins);
}

}  // namespace

SpectralResult analyze_panel(const FluctuationPanel& panel, const SweepConfig& config) {
    SpectralResult r;
    spectrum_stage(r, panel, config);
    spacing_stage(r, config);
    r.ok = true;
    return r;
}

SweepReport scale_sweep(std::span<const FluctuationPanel> panels, const SweepConfig& config) {
    if (panels.size() < 2) fail(ErrorCode::invalid_input, "a sweep needs at least 2 scales");
    SweepReport report;
    report.scales.resize(panels.size());
    parallel_for(panels.size(), config.threads, [&](std::size_t k) {
        SpectralResult r;
        r.scale = panels[k].scale;
        try {
            spectrum_stage(r, panels[k], config);
            spacing_stage(r, config);
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
            r.spacings.clear();
        }
        report.scales[k] = std::move(r);
    });
    std::sort(report.scales.begin(), report.scales.end(),
              [](const SpectralResult& x, const SpectralResult& y) { return x.scale < y.scale; });
    return report;
}

}  // namespace wbrmt
