#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fmcw {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Sawtooth FMCW radar: sweep duration equals the chirp period.
struct RadarParams {
    double fc = 77e9;
    double bandwidth = 150e6;
    double chirp_period = 10e-6;
    int n_samples = 256;
    int n_chirps = 256;
    int n_cpi = 10;
    std::optional<double> snr_db;  // absent means noiseless
    std::uint64_t rng_seed = 1;

    double sample_rate() const { return n_samples / chirp_period; }
    double wavelength() const { return kSpeedOfLight / fc; }
    double slope() const { return bandwidth / chirp_period; }
    double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth); }
    double velocity_resolution() const { return wavelength() / (2.0 * n_chirps * chirp_period); }
    /// Unambiguous range of a complex beat signal, c·f_s·T/(2B).
    double max_range() const { return kSpeedOfLight * sample_rate() * chirp_period / (2.0 * bandwidth); }
    /// Unambiguous radial speed, λ/(4T).
    double max_velocity() const { return wavelength() / (4.0 * chirp_period); }
};

/// Uniform linear receive array with one transmitter.
struct ArrayGeometry {
    int n_rx = 8;
    double rx_spacing_wl = 0.5;
    double tx_offset_wl = 2.0;

    double element_position(int n, double wavelength) const { return n * rx_spacing_wl * wavelength; }
};

/// Point target. Positive velocity is receding (range grows as R + v·t).
struct Target {
    double range_m = 0.0;
    double vel_mps = 0.0;
    double angle_deg = 0.0;
    double amplitude = 1.0;
};

enum class EdgePolicy { skip };

struct CfarConfig {
    int guard_half = 2;
    int train_half = 4;
    double pfa = 1e-3;
    EdgePolicy edge_policy = EdgePolicy::skip;

    int window_size() const { return 2 * train_half + 1; }
    /// Outer window minus the guard block (which contains the cell under test).
    int training_cells() const {
        const int outer = 2 * train_half + 1;
        const int inner = 2 * guard_half + 1;
        return outer * outer - inner * inner;
    }
};

struct DoaConfig {
    double grid_min_deg = -90.0;
    double grid_max_deg = 90.0;
    double music_step_deg = 0.1;
    double cs_step_deg = 1.0;
    double range_angle_step_deg = 0.5;
    int fft_size = 256;
    std::optional<int> num_sources;
    double cs_lambda_rel = 0.05;
    int cs_max_iter = 20000;
    double cs_tol = 1e-14;
};

enum class Window { rect, hann };

struct ProcessingConfig {
    Window window = Window::rect;
};

struct Scenario {
    RadarParams radar;
    ArrayGeometry array;
    std::vector<Target> targets;
    CfarConfig cfar;
    DoaConfig doa;
    ProcessingConfig processing;
};

enum class Severity { error, warning };

/// One broken invariant. `bound` carries the computed limit when one applies.
struct Violation {
    std::string field;
    std::string message;
    std::optional<double> bound;
    Severity severity = Severity::error;

    bool operator==(const Violation&) const = default;
};

/// Parses a scenario JSON document, filling defaults. Each override is a
/// `dot.path=value` assignment applied to the document before decoding;
/// values that parse as JSON are inserted as such, anything else as a string.
/// Throws ParseError.
Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides = {});

/// Inverse of parse_scenario. Every field is written explicitly.
std::string serialize_scenario(const Scenario& scenario);

/// Every violated invariant. Warnings do not make a scenario invalid.
std::vector<Violation> validate(const Scenario& scenario);

bool has_errors(const std::vector<Violation>& violations);

/// Throws ValidationError when validate() reports any error-severity entry.
void require_valid(const Scenario& scenario);

std::string_view to_string(Window w);

}  // namespace fmcw
