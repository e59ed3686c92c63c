#include "fmcw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fmcw/parallel.hpp"

namespace fmcw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Uniform on (0, 1]: 53 random mantissa bits, never zero so log() is safe.
double unit_open(std::mt19937_64& gen) { return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

double target_delay(double t, const Target& target) {
    return 2.0 * (target.range_m + target.vel_mps * t) / kSpeedOfLight;
}

double beat_cycles(int sample, long chirp, int channel, const Target& target, const RadarParams& radar,
                   const ArrayGeometry& array) {
    const double tau = target_delay(static_cast<double>(chirp) * radar.chirp_period, target);
    const double fast_time = sample / radar.sample_rate();
    const double spatial = (channel * array.rx_spacing_wl + array.tx_offset_wl) * std::sin(deg2rad(target.angle_deg));
    return radar.fc * tau + radar.slope() * tau * fast_time + spatial;
}

double beat_phase(int sample, long chirp, int channel, const Target& target, const RadarParams& radar,
                  const ArrayGeometry& array) {
    return kTwoPi * beat_cycles(sample, chirp, channel, target, radar, array);
}

double noise_sigma(const Scenario& scenario) {
    if (!scenario.radar.snr_db) return 0.0;
    double ref = 0.0;
    for (const auto& t : scenario.targets) ref = std::max(ref, t.amplitude);
    if (ref == 0.0) ref = 1.0;
    return ref * std::pow(10.0, -*scenario.radar.snr_db / 20.0);
}

std::uint64_t noise_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

DataCube synthesize(const Scenario& scenario) {
    require_valid(scenario);
    const auto& radar = scenario.radar;
    const auto& array = scenario.array;

    const std::size_t ns = radar.n_samples, nk = radar.n_chirps, nrx = array.n_rx, ncpi = radar.n_cpi;
    DataCube cube{ComplexCube({ns, nk, nrx, ncpi}), radar, array};

    const double sigma = noise_sigma(scenario);
    const double component_sigma = sigma / std::numbers::sqrt2;
    const double fs = radar.sample_rate();

    parallel_for(nrx * ncpi, [&](std::size_t job) {
        const std::size_t n = job % nrx;
        const std::size_t p = job / nrx;
        for (std::size_t k = 0; k < nk; ++k) {
            auto line = cube.data.line(k, n, p);
            const long chirp = static_cast<long>(p * nk + k);
            for (const auto& tgt : scenario.targets) {
                if (tgt.amplitude == 0.0) continue;
                // Phase at s = 0 and per-sample increment, both in cycles.
                const double c0 = beat_cycles(0, chirp, static_cast<int>(n), tgt, radar, array);
                const double base = c0 - std::floor(c0);
                const double tau = target_delay(static_cast<double>(chirp) * radar.chirp_period, tgt);
                const double step = radar.slope() * tau / fs;
                for (std::size_t s = 0; s < ns; ++s) {
                    double cyc = base + step * static_cast<double>(s);
                    cyc -= std::floor(cyc);
                    line[s] += std::polar(tgt.amplitude, kTwoPi * cyc);
                }
            }
        }
        if (sigma > 0.0) {
            std::mt19937_64 gen(noise_stream_seed(radar.rng_seed, p * nrx + n));
            for (std::size_t k = 0; k < nk; ++k) {
                auto line = cube.data.line(k, n, p);
                for (std::size_t s = 0; s < ns; ++s) {
                    // Box-Muller: one complex sample per pair of uniforms.
                    const double u1 = unit_open(gen);
                    const double u2 = unit_open(gen);
                    const double mag = component_sigma * std::sqrt(-2.0 * std::log(u1));
                    line[s] += cplx(mag * std::cos(kTwoPi * u2), mag * std::sin(kTwoPi * u2));
                }
            }
        }
    });
    return cube;
}

void quantize_to_float(DataCube& cube) {
    for (auto& v : cube.data.data()) {
        v = cplx(static_cast<float>(v.real()), static_cast<float>(v.imag()));
    }
}

}  // namespace fmcw
