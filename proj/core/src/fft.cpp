#include "fmcw/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace fmcw {

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n < 2 || !is_power_of_two(n)) {
        throw std::invalid_argument("FFT length must be a power of two >= 2, got " + std::to_string(n));
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
        bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddle_[k] = {std::cos(angle), std::sin(angle)};
    }
}

void FftPlan::transform(std::span<cplx> data, bool inverse) const {
    if (data.size() != n_) {
        throw std::invalid_argument("FFT input length " + std::to_string(data.size()) + " does not match plan size " +
                                    std::to_string(n_));
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx w = twiddle_[j * stride];
                if (inverse) w = std::conj(w);
                const cplx u = data[start + j];
                const cplx v = data[start + j + half] * w;
                data[start + j] = u + v;
                data[start + j + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : data) v *= scale;
    }
}

std::vector<cplx> dft(std::span<const cplx> x, bool inverse) {
    FftPlan plan(x.size());
    std::vector<cplx> out(x.begin(), x.end());
    plan.transform(out, inverse);
    return out;
}

}  // namespace fmcw
