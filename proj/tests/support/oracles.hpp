#pragma once

// Independent reference computations for tests. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kC = 299'792'458.0;

inline std::vector<cplx> naive_dft(const std::vector<cplx>& x, bool inverse = false) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t m = 0; m < n; ++m) {
        long double re = 0, im = 0;
        for (std::size_t s = 0; s < n; ++s) {
            // Reduce m·s mod n first so the angle stays small and exact.
            const long double ang = sign * 2.0L * std::numbers::pi_v<long double> *
                                    static_cast<long double>((m * s) % n) / static_cast<long double>(n);
            re += x[s].real() * std::cos(ang) - x[s].imag() * std::sin(ang);
            im += x[s].real() * std::sin(ang) + x[s].imag() * std::cos(ang);
        }
        out[m] = {static_cast<double>(re), static_cast<double>(im)};
        if (inverse) out[m] /= static_cast<double>(n);
    }
    return out;
}

inline std::vector<cplx> random_vector(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {nd(gen), nd(gen)};
    return v;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<cplx>& a) {
    double m = 0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Plain 9x9 / 5x5 (or any) CA-CFAR decision for one cell, by double loop.
inline double naive_training_mean(const Eigen::MatrixXd& p, int r, int d, int guard_half, int train_half) {
    double sum = 0;
    int count = 0;
    for (int i = -train_half; i <= train_half; ++i) {
        for (int j = -train_half; j <= train_half; ++j) {
            if (std::abs(i) <= guard_half && std::abs(j) <= guard_half) continue;
            sum += p(r + i, d + j);
            ++count;
        }
    }
    return sum / count;
}

inline double threshold_factor_long(int m, double pfa) {
    return static_cast<double>(m * (std::pow(static_cast<long double>(pfa), -1.0L / m) - 1.0L));
}

/// ULA steering vector written out independently of the library.
inline Eigen::VectorXcd steering(double deg, int n_rx, double spacing_wl = 0.5) {
    Eigen::VectorXcd a(n_rx);
    for (int n = 0; n < n_rx; ++n) a(n) = std::exp(cplx(0, 2 * kPi * n * spacing_wl * std::sin(deg * kPi / 180)));
    return a;
}

/// Brute force over all column pairs: the pair whose least-squares fit of y
/// leaves the smallest residual.
inline std::pair<int, int> best_two_sparse_support(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& y) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> arg{-1, -1};
    for (int i = 0; i < phi.cols(); ++i) {
        for (int j = i + 1; j < phi.cols(); ++j) {
            Eigen::MatrixXcd a(phi.rows(), 2);
            a.col(0) = phi.col(i);
            a.col(1) = phi.col(j);
            const Eigen::MatrixXcd gram = a.adjoint() * a;
            const Eigen::VectorXcd rhs = a.adjoint() * y;
            const cplx det = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
            if (std::abs(det) < 1e-12) continue;
            Eigen::VectorXcd coef(2);
            coef(0) = (gram(1, 1) * rhs(0) - gram(0, 1) * rhs(1)) / det;
            coef(1) = (gram(0, 0) * rhs(1) - gram(1, 0) * rhs(0)) / det;
            const double res = (y - a * coef).norm();
            if (res < best) {
                best = res;
                arg = {i, j};
            }
        }
    }
    return arg;
}

/// Snapshots x_t = Σ_i s_i(t)·a(θ_i) + n(t) with independent unit-power
/// complex Gaussian source signals and noise at the given per-element SNR.
inline Eigen::MatrixXcd random_snapshots(const std::vector<double>& angles_deg, int n_rx, int count, double snr_db,
                                         std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    const double sigma = std::pow(10.0, -snr_db / 20.0);
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n_rx, count);
    for (int t = 0; t < count; ++t) {
        for (double a : angles_deg) {
            const cplx s = cplx(nd(gen), nd(gen)) / std::sqrt(2.0);
            x.col(t) += s * steering(a, n_rx);
        }
        for (int n = 0; n < n_rx; ++n) x(n, t) += sigma * cplx(nd(gen), nd(gen)) / std::sqrt(2.0);
    }
    return x;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace oracle
