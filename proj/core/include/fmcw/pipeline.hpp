#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fmcw/cfar.hpp"
#include "fmcw/doa.hpp"
#include "fmcw/scene.hpp"
#include "fmcw/specproc.hpp"

namespace fmcw {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Stage { simulate, rdmap, detect, doa_fft, doa_music, doa_cs, range_angle };

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view name);
std::vector<Stage> all_stages();

struct RunOptions {
    std::filesystem::path scenario_path;
    std::filesystem::path out_dir;
    std::vector<Stage> stages;
    std::vector<std::string> overrides;  // dot.path=value
    bool cluster = false;                // merge 8-connected detections in the CSV
    std::optional<std::uint64_t> seed;   // replaces radar.rng_seed
};

struct RunManifest {
    std::string scenario_path;
    std::vector<std::string> stages;
    std::string out_dir;
    std::vector<std::string> outputs;  // file names relative to out_dir
    std::vector<std::pair<std::string, double>> timings;  // stage -> seconds
    std::string tool_version{kToolVersion};
    std::string scenario_hash;
};

std::string manifest_to_json(const RunManifest& manifest);

/// FNV-1a 64 of the bytes, as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

/// Reads, overrides, parses and validates. Throws IoError, ParseError or
/// ValidationError.
Scenario load_scenario(const RunOptions& options);

/// Adds file names to the outputs list of out_dir/manifest.json, if one
/// exists, so later helper commands leave no unlisted files behind.
void record_outputs(const std::filesystem::path& out_dir, const std::vector<std::string>& names);

/// Snapshots feeding the angle estimators for one scene.
struct DoaInputs {
    SnapshotSet chirp_snapshots;  // range-profile values across chirps, one block per (cpi, range bin)
    SnapshotSet cell_snapshots;   // range-Doppler cell vectors, one per cluster peak
    int num_sources = 1;
    int cpi_index = -1;           // CPI the snapshots were taken from
};

/// Pools the snapshots of the clustered detections of a single CPI (the one
/// with the most clusters, earliest on ties). The source count is the
/// configured override, else that CPI's cluster count, clamped to
/// [1, n_rx − 1].
DoaInputs gather_doa_inputs(const ComplexCube& profile, const ComplexCube& rd,
                            const std::vector<Detection>& detections, const Scenario& scenario);

AngleSpectrum estimate_fft(const DoaInputs& in, const Scenario& scenario);
AngleSpectrum estimate_music(const DoaInputs& in, const Scenario& scenario);
AngleSpectrum estimate_cs(const DoaInputs& in, const Scenario& scenario);

/// Matching tolerance used for resolution checks: min(3°, half the smallest
/// separation between distinct truth angles).
double resolution_tolerance(const std::vector<double>& truth_deg);

/// Number of truth angles matched one-to-one by a spectrum peak within tol.
int resolved_count(const std::vector<SpectrumPeak>& peaks, const std::vector<double>& truth_deg, double tol);

/// Executes the requested stages in dependency order and writes
/// manifest.json. Throws ParseError, ValidationError, DependencyError or
/// IoError.
RunManifest run(const RunOptions& options);

struct MethodReport {
    DoaMethod method = DoaMethod::fft;
    std::vector<double> peak_angles_deg;
    std::vector<double> abs_errors_deg;  // per distinct truth angle, nearest peak
    int resolved = 0;
    int n_truth = 0;
    double wall_seconds = 0.0;
};

/// Runs all three estimators on the same detections, writes compare.csv into
/// the output directory and returns the reports ordered by runtime.
std::vector<MethodReport> compare_methods(const RunOptions& options);

}  // namespace fmcw
