#include "fmcw/doa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fmcw/fft.hpp"

namespace fmcw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Keeps exactly-orthogonal steering vectors finite.
constexpr double kMinDenominator = std::numeric_limits<double>::min();

}  // namespace

std::string_view to_string(DoaMethod m) {
    switch (m) {
        case DoaMethod::fft: return "fft";
        case DoaMethod::music: return "music";
        case DoaMethod::cs: return "cs";
    }
    return "fft";
}

SnapshotSet concat(const std::vector<SnapshotSet>& sets) {
    SnapshotSet out;
    if (sets.empty()) return out;
    const Eigen::Index rows = sets.front().n_rx();
    Eigen::Index cols = 0;
    for (const auto& s : sets) {
        if (s.n_rx() != rows) throw std::invalid_argument("concat: snapshot sets disagree on receiver count");
        cols += s.size();
    }
    out.snapshots.resize(rows, cols);
    Eigen::Index at = 0;
    for (const auto& s : sets) {
        out.snapshots.middleCols(at, s.size()) = s.snapshots;
        at += s.size();
    }
    return out;
}

std::vector<double> make_angle_grid(double min_deg, double max_deg, double step_deg) {
    if (!(step_deg > 0) || !(max_deg >= min_deg)) throw std::invalid_argument("make_angle_grid: bad grid bounds");
    const auto n = static_cast<std::size_t>(std::floor((max_deg - min_deg) / step_deg + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = std::round((min_deg + static_cast<double>(i) * step_deg) * 1e9) / 1e9;
    }
    return grid;
}

Eigen::VectorXcd steering_vector(double theta_deg, const ArrayGeometry& array) {
    Eigen::VectorXcd a(array.n_rx);
    const double u = std::sin(deg2rad(theta_deg));
    for (int n = 0; n < array.n_rx; ++n) {
        a(n) = std::polar(1.0, kTwoPi * n * array.rx_spacing_wl * u);
    }
    return a;
}

SnapshotSet extract_snapshots(const ComplexCube& profile, const Detection& det) {
    if (det.range_bin < 0 || static_cast<std::size_t>(det.range_bin) >= profile.dim(0) || det.cpi_index < 0 ||
        static_cast<std::size_t>(det.cpi_index) >= profile.dim(3)) {
        throw std::out_of_range("extract_snapshots: detection (range bin " + std::to_string(det.range_bin) + ", cpi " +
                                std::to_string(det.cpi_index) + ") outside the cube");
    }
    const auto nk = static_cast<Eigen::Index>(profile.dim(1));
    const auto nrx = static_cast<Eigen::Index>(profile.dim(2));
    SnapshotSet out;
    out.snapshots.resize(nrx, nk);
    out.range_bin = det.range_bin;
    out.cpi_index = det.cpi_index;
    for (Eigen::Index k = 0; k < nk; ++k) {
        for (Eigen::Index n = 0; n < nrx; ++n) out.snapshots(n, k) = profile(det.range_bin, k, n, det.cpi_index);
    }
    return out;
}

SnapshotSet extract_cell_snapshot(const ComplexCube& rd, const Detection& det) {
    if (det.range_bin < 0 || static_cast<std::size_t>(det.range_bin) >= rd.dim(0) || det.doppler_bin < 0 ||
        static_cast<std::size_t>(det.doppler_bin) >= rd.dim(1) || det.cpi_index < 0 ||
        static_cast<std::size_t>(det.cpi_index) >= rd.dim(3)) {
        throw std::out_of_range("extract_cell_snapshot: detection outside the cube");
    }
    const auto nrx = static_cast<Eigen::Index>(rd.dim(2));
    SnapshotSet out;
    out.snapshots.resize(nrx, 1);
    out.range_bin = det.range_bin;
    out.cpi_index = det.cpi_index;
    for (Eigen::Index n = 0; n < nrx; ++n) out.snapshots(n, 0) = rd(det.range_bin, det.doppler_bin, n, det.cpi_index);
    return out;
}

std::vector<SpectrumPeak> find_peaks(const std::vector<double>& angles, const std::vector<double>& power,
                                     std::size_t count) {
    std::vector<SpectrumPeak> peaks;
    const std::size_t n = power.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(power[i] > 0.0)) continue;
        const bool left_ok = i == 0 || power[i] > power[i - 1];
        const bool right_ok = i + 1 == n || power[i] >= power[i + 1];
        if (n == 1 || (left_ok && right_ok)) peaks.push_back({angles[i], power[i]});
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const SpectrumPeak& a, const SpectrumPeak& b) { return a.power > b.power; });
    if (peaks.size() > count) peaks.resize(count);
    return peaks;
}

AngleSpectrum fft_angle_spectrum(const SnapshotSet& snap, int n_fft, const ArrayGeometry& array,
                                 std::size_t num_peaks) {
    if (n_fft < snap.n_rx() || !is_power_of_two(static_cast<std::size_t>(n_fft))) {
        throw std::invalid_argument("fft_angle_spectrum: n_fft must be a power of two >= n_rx");
    }
    const FftPlan plan(static_cast<std::size_t>(n_fft));
    std::vector<double> acc(static_cast<std::size_t>(n_fft), 0.0);
    std::vector<cplx> buf(static_cast<std::size_t>(n_fft));
    for (Eigen::Index t = 0; t < snap.size(); ++t) {
        std::fill(buf.begin(), buf.end(), cplx{});
        for (Eigen::Index n = 0; n < snap.n_rx(); ++n) buf[static_cast<std::size_t>(n)] = snap.snapshots(n, t);
        plan.transform(buf);
        for (std::size_t k = 0; k < buf.size(); ++k) acc[k] += std::norm(buf[k]);
    }

    AngleSpectrum out;
    out.method = DoaMethod::fft;
    const int half = n_fft / 2;
    for (int k = -half; k < half; ++k) {
        const double u = static_cast<double>(k) / (n_fft * array.rx_spacing_wl);
        if (std::abs(u) > 1.0) continue;
        out.angles_deg.push_back(rad2deg(std::asin(u)));
        out.power.push_back(acc[static_cast<std::size_t>((k + n_fft) % n_fft)]);
    }
    out.peaks = find_peaks(out.angles_deg, out.power, num_peaks);
    return out;
}

CovarianceMatrix covariance(const SnapshotSet& snap) {
    if (snap.size() < 1) throw std::invalid_argument("covariance: need at least one snapshot");
    CovarianceMatrix c;
    c.R = snap.snapshots * snap.snapshots.adjoint() / static_cast<double>(snap.size());
    // Exact Hermitian symmetry regardless of summation order.
    c.R = 0.5 * (c.R + c.R.adjoint()).eval();
    return c;
}

HermitianEigen hermitian_eig(const CovarianceMatrix& cov) { return hermitian_eig(cov.R); }

namespace {

std::vector<double> music_values(const Eigen::MatrixXcd& noise_subspace, const std::vector<double>& grid,
                                 const ArrayGeometry& array) {
    std::vector<double> p(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Eigen::VectorXcd a = steering_vector(grid[g], array);
        const double denom = (noise_subspace.adjoint() * a).squaredNorm();
        p[g] = 1.0 / std::max(denom, kMinDenominator);
    }
    return p;
}

}  // namespace

AngleSpectrum music_pseudospectrum(const CovarianceMatrix& cov, int num_sources, const std::vector<double>& grid,
                                   const ArrayGeometry& array) {
    const auto n = static_cast<int>(cov.R.rows());
    if (num_sources < 1 || num_sources >= n) {
        throw std::invalid_argument("music_pseudospectrum: source count " + std::to_string(num_sources) +
                                    " outside [1, " + std::to_string(n - 1) + "]");
    }
    if (grid.empty()) throw std::invalid_argument("music_pseudospectrum: empty angle grid");
    if (array.n_rx != n) throw std::invalid_argument("music_pseudospectrum: covariance size does not match array");

    const auto eig = hermitian_eig(cov);
    const Eigen::MatrixXcd un = eig.vectors.rightCols(n - num_sources);

    AngleSpectrum out;
    out.method = DoaMethod::music;
    out.angles_deg = grid;
    out.power = music_values(un, grid, array);
    out.peaks = find_peaks(out.angles_deg, out.power, static_cast<std::size_t>(num_sources));
    return out;
}

Eigen::MatrixXd range_angle_map(const ComplexCube& profile, int cpi, int num_sources, const std::vector<double>& grid,
                                const ArrayGeometry& array) {
    const auto nr = static_cast<Eigen::Index>(profile.dim(0));
    const auto nk = static_cast<Eigen::Index>(profile.dim(1));
    const auto nrx = static_cast<Eigen::Index>(profile.dim(2));
    if (cpi < 0 || static_cast<std::size_t>(cpi) >= profile.dim(3)) throw std::out_of_range("range_angle_map: bad cpi");
    if (num_sources < 1 || num_sources >= nrx) throw std::invalid_argument("range_angle_map: source count out of range");

    Eigen::MatrixXd map = Eigen::MatrixXd::Zero(nr, static_cast<Eigen::Index>(grid.size()));
    SnapshotSet snap;
    snap.snapshots.resize(nrx, nk);
    for (Eigen::Index r = 0; r < nr; ++r) {
        for (Eigen::Index k = 0; k < nk; ++k) {
            for (Eigen::Index n = 0; n < nrx; ++n) snap.snapshots(n, k) = profile(r, k, n, cpi);
        }
        const auto cov = covariance(snap);
        const double trace = cov.R.trace().real();
        if (!(trace > 0.0)) continue;
        const auto eig = hermitian_eig(cov);
        int d = num_sources;
        if (!(eig.values(d - 1) > 1e-10 * trace)) d = 1;
        const auto p = music_values(eig.vectors.rightCols(nrx - d), grid, array);
        for (std::size_t g = 0; g < p.size(); ++g) map(r, static_cast<Eigen::Index>(g)) = p[g];
    }
    return map;
}

SteeringDictionary build_dictionary(const std::vector<double>& grid, const ArrayGeometry& array) {
    if (grid.empty()) throw std::invalid_argument("build_dictionary: empty angle grid");
    SteeringDictionary d;
    d.angles_deg = grid;
    d.phi.resize(array.n_rx, static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g) d.phi.col(static_cast<Eigen::Index>(g)) = steering_vector(grid[g], array);
    return d;
}

double cs_objective(const Eigen::VectorXcd& y, const SteeringDictionary& dict, const Eigen::VectorXcd& s,
                    double lambda_reg) {
    return 0.5 * (y - dict.phi * s).squaredNorm() + lambda_reg * s.cwiseAbs().sum();
}

namespace {

// Largest eigenvalue of ΦΦᴴ (equal to that of ΦᴴΦ) by power iteration.
double lipschitz_constant(const Eigen::MatrixXcd& phi) {
    const Eigen::MatrixXcd gram = phi * phi.adjoint();
    Eigen::VectorXcd v(gram.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::polar(1.0 + 0.1 * static_cast<double>(i), 0.7 * static_cast<double>(i));
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXcd w = gram * v;
        const double next = std::real(v.dot(w));
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (std::abs(next - lambda) <= 1e-15 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // Rayleigh quotients approach from below; a hair of margin keeps 1/L a valid step.
    return lambda * (1.0 + 1e-9);
}

cplx soft_threshold(cplx z, double t) {
    const double mag = std::abs(z);
    if (mag <= t) return cplx{};
    return z * ((mag - t) / mag);
}

}  // namespace

CsResult cs_solve(const Eigen::VectorXcd& y, const SteeringDictionary& dict, const CsSolveParams& params) {
    if (y.size() != dict.phi.rows()) throw std::invalid_argument("cs_solve: measurement length does not match dictionary rows");
    if (!(params.lambda_reg > 0.0)) throw std::invalid_argument("cs_solve: lambda_reg must be positive");
    if (params.max_iter < 1) throw std::invalid_argument("cs_solve: max_iter must be >= 1");

    const auto g = dict.phi.cols();
    CsResult res;
    res.lambda_reg = params.lambda_reg;
    res.s = Eigen::VectorXcd::Zero(g);
    const double lip = lipschitz_constant(dict.phi);
    double obj = cs_objective(y, dict, res.s, params.lambda_reg);
    res.objective.push_back(obj);
    if (lip == 0.0) {
        res.converged = true;
        return res;
    }
    const double step = 1.0 / lip;
    const double shrink = step * params.lambda_reg;

    // Monotone FISTA: the accepted iterate only moves when the proximal step
    // does not raise the objective; a rejected step resets the momentum.
    Eigen::VectorXcd x_prev = res.s;
    Eigen::VectorXcd ext = res.s;
    Eigen::VectorXcd z(g);
    double t = 1.0;
    for (int it = 0; it < params.max_iter; ++it) {
        const bool plain_step = t == 1.0;
        const Eigen::VectorXcd grad = dict.phi.adjoint() * (dict.phi * ext - y);
        for (Eigen::Index i = 0; i < g; ++i) z(i) = soft_threshold(ext(i) - step * grad(i), shrink);
        const double fz = cs_objective(y, dict, z, params.lambda_reg);

        x_prev = res.s;
        const bool accepted = fz <= obj;
        if (accepted) res.s = z;
        const double next = accepted ? fz : obj;
        const double decrease = obj - next;
        obj = next;
        res.objective.push_back(obj);
        res.iterations = it + 1;

        const bool stalled = decrease <= params.tol * std::max(obj, std::numeric_limits<double>::min());
        if (stalled && plain_step) {
            res.converged = true;
            break;
        }
        if (stalled || !accepted) {
            t = 1.0;
            ext = res.s;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        ext = res.s + ((t - 1.0) / t_next) * (res.s - x_prev);
        t = t_next;
    }
    return res;
}

Eigen::VectorXcd aligned_mean(const SnapshotSet& snap) {
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(snap.n_rx());
    if (snap.size() == 0) return y;
    for (Eigen::Index t = 0; t < snap.size(); ++t) {
        const cplx ref = snap.snapshots(0, t);
        const double mag = std::abs(ref);
        const cplx rot = mag > 0.0 ? std::conj(ref) / mag : cplx(1.0);
        y += snap.snapshots.col(t) * rot;
    }
    return y / static_cast<double>(snap.size());
}

AngleSpectrum cs_angle_spectrum(const SnapshotSet& snap, const SteeringDictionary& dict, const CsOptions& options,
                                std::size_t num_peaks) {
    if (snap.n_rx() != dict.phi.rows()) throw std::invalid_argument("cs_angle_spectrum: snapshot rows do not match dictionary");
    const Eigen::VectorXcd y = aligned_mean(snap);
    const double corr = (dict.phi.adjoint() * y).cwiseAbs().maxCoeff();

    AngleSpectrum out;
    out.method = DoaMethod::cs;
    out.angles_deg = dict.angles_deg;
    out.power.assign(dict.angles_deg.size(), 0.0);
    if (corr > 0.0) {
        const auto res = cs_solve(y, dict, {options.lambda_rel * corr, options.max_iter, options.tol});
        for (Eigen::Index i = 0; i < res.s.size(); ++i) out.power[static_cast<std::size_t>(i)] = std::norm(res.s(i));
    }
    out.peaks = find_peaks(out.angles_deg, out.power, num_peaks);
    return out;
}

}  // namespace fmcw
