#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmcw/cube.hpp"

namespace fmcw {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Iterative radix-2 decimation-in-time FFT of one fixed power-of-two length.
/// Twiddles are evaluated directly (no recurrence) so the transform stays
/// accurate to a few ulps at 4096 points.
class FftPlan {
public:
    /// Throws std::invalid_argument unless n is a power of two >= 2.
    explicit FftPlan(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    /// Forward: X[m] = Σ x[s]·exp(−j2πms/N). Inverse applies the 1/N scale.
    void transform(std::span<cplx> data, bool inverse = false) const;

private:
    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> twiddle_;  // exp(−j2πk/N), k < N/2
};

/// Convenience wrapper around FftPlan.
std::vector<cplx> dft(std::span<const cplx> x, bool inverse = false);

}  // namespace fmcw
