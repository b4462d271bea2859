// Shared helpers and independent oracles for the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <Eigen/Dense>

namespace testing {

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("wbrmt_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

/// Test-side Gaussian draws, deliberately independent of the library RNG.
inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> dist;
    std::vector<double> v(n);
    for (auto& x : v) x = dist(eng);
    return v;
}

inline double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size());
}

/// Number of eigenvalues of symmetric `a` below x: the count of negative
/// pivots of A - xI, i.e. sign changes along the leading principal minors
/// (Sylvester's law of inertia). Exact zero pivots are nudged.
inline int count_below(const Eigen::MatrixXd& a, double x) {
    Eigen::MatrixXd m = a;
    m.diagonal().array() -= x;
    const auto n = m.rows();
    int negatives = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        double pivot = m(k, k);
        if (pivot == 0.0) pivot = -1e-300;
        if (pivot < 0.0) ++negatives;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double factor = m(i, k) / pivot;
            for (Eigen::Index j = k + 1; j < n; ++j) m(i, j) -= factor * m(k, j);
        }
    }
    return negatives;
}

/// Brute-force eigenvalues of a small symmetric matrix by bisection on the
/// characteristic-polynomial sign count.
inline std::vector<double> bisection_eigenvalues(const Eigen::MatrixXd& a) {
    const auto n = static_cast<int>(a.rows());
    const double bound = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;  // Gershgorin
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        double lo = -bound, hi = bound;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * bound; ++it) {
            const double mid = 0.5 * (lo + hi);
            (count_below(a, mid) > k ? hi : lo) = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

inline Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed) {
    const auto g = gaussian(static_cast<std::size_t>(n * n), seed);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g[static_cast<std::size_t>(i * n + j)];
    return 0.5 * (m + m.transpose());
}

/// Closed-form generalized Hurst exponent of the binomial cascade.
inline double cascade_h(double q, double p) {
    return 1.0 / q - std::log(std::pow(p, q) + std::pow(1.0 - p, q)) / (q * std::log(2.0));
}

/// Asymptotic one-sample Kolmogorov-Smirnov critical value.
inline double ks_critical(double alpha, std::size_t n) {
    return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

}  // namespace testing
