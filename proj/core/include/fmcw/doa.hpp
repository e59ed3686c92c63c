#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fmcw/cfar.hpp"
#include "fmcw/cube.hpp"
#include "fmcw/eig.hpp"
#include "fmcw/scene.hpp"

namespace fmcw {

/// Array snapshots: one column per observation, one row per receiver.
struct SnapshotSet {
    Eigen::MatrixXcd snapshots;
    int range_bin = -1;
    int cpi_index = -1;

    Eigen::Index n_rx() const { return snapshots.rows(); }
    Eigen::Index size() const { return snapshots.cols(); }
};

/// Column-wise concatenation (row counts must agree). Provenance is dropped.
SnapshotSet concat(const std::vector<SnapshotSet>& sets);

struct CovarianceMatrix {
    Eigen::MatrixXcd R;
};

enum class DoaMethod { fft, music, cs };

std::string_view to_string(DoaMethod m);

struct SpectrumPeak {
    double angle_deg = 0.0;
    double power = 0.0;
};

struct AngleSpectrum {
    std::vector<double> angles_deg;
    std::vector<double> power;
    DoaMethod method = DoaMethod::fft;
    std::vector<SpectrumPeak> peaks;  // strongest first
};

struct SteeringDictionary {
    Eigen::MatrixXcd phi;  // n_rx x G
    std::vector<double> angles_deg;
};

struct CsSolveParams {
    double lambda_reg = 0.0;
    int max_iter = 20000;
    double tol = 1e-14;
};

struct CsResult {
    Eigen::VectorXcd s;
    std::vector<double> objective;  // value after each iteration, objective[0] at the start point
    int iterations = 0;
    bool converged = false;
    double lambda_reg = 0.0;
};

struct CsOptions {
    double lambda_rel = 0.05;  // lambda_reg = lambda_rel · ||Φᴴy||∞
    int max_iter = 20000;
    double tol = 1e-14;
};

/// Angles min, min+step, ..., max (inclusive when max lands on the grid),
/// rounded to 1e-9 deg so decimal grid points come out exact.
std::vector<double> make_angle_grid(double min_deg, double max_deg, double step_deg);

/// a_n = exp(j·2π·n·d·sin θ) with d in wavelengths.
Eigen::VectorXcd steering_vector(double theta_deg, const ArrayGeometry& array);

/// Range-profile values at det.range_bin for every chirp of det's CPI.
/// `profile` is indexed [range bin, chirp, channel, cpi].
/// Throws std::out_of_range for indices outside the cube.
SnapshotSet extract_snapshots(const ComplexCube& profile, const Detection& det);

/// The single channel vector at (range_bin, doppler_bin) of a complex
/// range-Doppler cube indexed [range, doppler, channel, cpi].
SnapshotSet extract_cell_snapshot(const ComplexCube& rd, const Detection& det);

/// Largest `count` local maxima, strongest first. Endpoints qualify when they
/// exceed their single neighbour; zero-power samples never qualify.
std::vector<SpectrumPeak> find_peaks(const std::vector<double>& angles, const std::vector<double>& power,
                                     std::size_t count);

/// Zero-padded channel DFT per snapshot, powers summed across snapshots.
/// Bin k (two-sided) maps to sin θ = k / (n_fft·d); bins with |sin θ| > 1 are
/// dropped. Throws std::invalid_argument unless n_fft is a power of two >= n_rx.
AngleSpectrum fft_angle_spectrum(const SnapshotSet& snap, int n_fft, const ArrayGeometry& array,
                                 std::size_t num_peaks = 2);

/// (1/T)·Σ x xᴴ.
CovarianceMatrix covariance(const SnapshotSet& snap);

HermitianEigen hermitian_eig(const CovarianceMatrix& cov);

/// 1 / (aᴴ U_n U_nᴴ a) over the grid with U_n the n_rx − D weakest
/// eigenvectors. Peak list holds the D largest local maxima.
/// Throws std::invalid_argument unless 1 <= D < n_rx and the grid is non-empty.
AngleSpectrum music_pseudospectrum(const CovarianceMatrix& cov, int num_sources, const std::vector<double>& grid,
                                   const ArrayGeometry& array);

/// MUSIC pseudospectrum of every range bin of one CPI (chirps as snapshots).
/// Rows whose covariance has fewer than D significant eigenvalues use D = 1;
/// all-zero rows stay zero.
Eigen::MatrixXd range_angle_map(const ComplexCube& profile, int cpi, int num_sources, const std::vector<double>& grid,
                                const ArrayGeometry& array);

/// Steering vectors on the grid as columns. Throws std::invalid_argument on an
/// empty grid.
SteeringDictionary build_dictionary(const std::vector<double>& grid, const ArrayGeometry& array);

/// Solves min ½‖y − Φs‖² + λ‖s‖₁ by monotone accelerated proximal gradient
/// (soft-thresholding step 1/L, L the largest eigenvalue of ΦᴴΦ found by power
/// iteration). The recorded objective never increases. Stops when a plain
/// proximal step lowers the objective by less than tol·objective, or after
/// max_iter iterations.
/// Throws std::invalid_argument on dimension mismatch or lambda_reg <= 0.
CsResult cs_solve(const Eigen::VectorXcd& y, const SteeringDictionary& dict, const CsSolveParams& params);

/// ½‖y − Φs‖² + λ‖s‖₁.
double cs_objective(const Eigen::VectorXcd& y, const SteeringDictionary& dict, const Eigen::VectorXcd& s,
                    double lambda_reg);

/// Mean of the snapshots after rotating each so channel 0 has zero phase.
Eigen::VectorXcd aligned_mean(const SnapshotSet& snap);

/// Sparse angle spectrum |s_g|² from the phase-aligned snapshot mean.
AngleSpectrum cs_angle_spectrum(const SnapshotSet& snap, const SteeringDictionary& dict, const CsOptions& options,
                                std::size_t num_peaks = 2);

}  // namespace fmcw
