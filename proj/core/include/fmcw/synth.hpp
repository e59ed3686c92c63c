#pragma once

#include <cstdint>

#include "fmcw/cube.hpp"
#include "fmcw/scene.hpp"

namespace fmcw {

/// Complex baseband beat samples, indexed [sample, chirp, channel, cpi].
struct DataCube {
    ComplexCube data;
    RadarParams radar;
    ArrayGeometry array;

    std::size_t n_samples() const { return data.dim(0); }
    std::size_t n_chirps() const { return data.dim(1); }
    std::size_t n_rx() const { return data.dim(2); }
    std::size_t n_cpi() const { return data.dim(3); }
};

/// Round-trip delay 2(R + v·t)/c.
double target_delay(double t, const Target& target);

/// Beat phase in radians (unwrapped) for fast-time sample `sample` of global
/// chirp `chirp` on channel `channel`. The delay is frozen at the chirp start
/// (stop-and-hop), so the fast-time frequency is slope·τ_k and the
/// chirp-to-chirp increment is 2π·f_D·T.
double beat_phase(int sample, long chirp, int channel, const Target& target, const RadarParams& radar,
                  const ArrayGeometry& array);

/// Same quantity in cycles; the integer part is irrelevant to the sample value.
double beat_cycles(int sample, long chirp, int channel, const Target& target, const RadarParams& radar,
                   const ArrayGeometry& array);

/// Noise standard deviation per complex sample implied by radar.snr_db,
/// referenced to the strongest target amplitude (1 when all are zero).
double noise_sigma(const Scenario& scenario);

/// Simulated cube for a valid scenario. Throws ValidationError otherwise.
/// Noise for (channel n, cpi p) comes from its own mt19937_64 stream seeded by
/// noise_stream_seed(rng_seed, p·n_rx + n), so the output does not depend on
/// how work is split across threads.
DataCube synthesize(const Scenario& scenario);

/// splitmix64 finaliser applied to (seed, stream); documented so other
/// implementations can reproduce cubes bit-for-bit.
std::uint64_t noise_stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Rounds every sample to float32 precision, matching what the cube file stores.
void quantize_to_float(DataCube& cube);

}  // namespace fmcw
