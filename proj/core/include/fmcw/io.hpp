#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fmcw/cfar.hpp"
#include "fmcw/doa.hpp"
#include "fmcw/specproc.hpp"
#include "fmcw/synth.hpp"

namespace fmcw {

/// Fixed 64-byte little-endian cube header. Bytes 28..31 are zero padding so
/// the f64 fields sit on 8-byte boundaries.
struct CubeHeader {
    static constexpr char kMagic[8] = {'F', 'M', 'C', 'W', 'C', 'U', 'B', 'E'};
    static constexpr std::uint32_t kVersion = 1;
    static constexpr std::size_t kSize = 64;

    std::uint32_t version = kVersion;
    std::uint32_t n_samples = 0;
    std::uint32_t n_chirps = 0;
    std::uint32_t n_rx = 0;
    std::uint32_t n_cpi = 0;
    double sample_rate = 0.0;
    double chirp_period = 0.0;
    double fc = 0.0;
    double bandwidth = 0.0;
};

struct CubeFile {
    CubeHeader header;
    ComplexCube data;  // float32 payload widened to double
};

/// Header followed by interleaved (re, im) float32, sample fastest, then
/// chirp, channel, CPI. Throws IoError.
void write_cube_file(const std::filesystem::path& path, const DataCube& cube);
CubeFile read_cube_file(const std::filesystem::path& path);

/// Reattaches scenario metadata to a cube file; throws DependencyError when
/// the file does not match the scenario's radar and array dimensions.
DataCube cube_from_file(const CubeFile& file, const Scenario& scenario);

/// Comment header with axis metadata, then one row per range bin.
void write_range_doppler_csv(const std::filesystem::path& path, const RangeDopplerMap& map);

/// Binary 16-bit PGM (P5). Pixels are 10·log10 power clipped to
/// [max − dynamic_range_db, max] and scaled so the maximum is 65535.
void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& power, double dynamic_range_db = 60.0);

void write_detections_csv(const std::filesystem::path& path, const std::vector<Detection>& detections);
std::vector<Detection> read_detections_csv(const std::filesystem::path& path);

void write_spectrum_csv(const std::filesystem::path& path, const AngleSpectrum& spectrum);
AngleSpectrum read_spectrum_csv(const std::filesystem::path& path);

void write_range_angle_csv(const std::filesystem::path& path, const Eigen::MatrixXd& map, const Axis& range_axis,
                           const std::vector<double>& grid, int cpi);

/// Line plot of an angle spectrum in dB (max-normalised) as a standalone SVG.
std::string spectrum_to_svg(const AngleSpectrum& spectrum, const std::string& title);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// %.10g, the fixed float format for every CSV the toolkit writes.
std::string format_number(double v);

}  // namespace fmcw
