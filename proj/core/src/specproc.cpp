#include "fmcw/specproc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fmcw/fft.hpp"
#include "fmcw/parallel.hpp"

namespace fmcw {

std::vector<double> make_window(Window kind, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (kind == Window::hann) {
        // Periodic Hann.
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
        }
    }
    return w;
}

namespace {

void check_pad(int pad) {
    if (pad < 1 || !is_power_of_two(static_cast<std::size_t>(pad))) {
        throw std::invalid_argument("padding factor must be a power of two >= 1");
    }
}

}  // namespace

RangeProfile range_profile(const DataCube& cube, Window window, int pad) {
    check_pad(pad);
    const std::size_t ns = cube.n_samples(), nk = cube.n_chirps(), nrx = cube.n_rx(), ncpi = cube.n_cpi();
    const std::size_t nfft = ns * static_cast<std::size_t>(pad);
    const FftPlan plan(nfft);
    const auto win = make_window(window, ns);

    RangeProfile out{ComplexCube({nfft, nk, nrx, ncpi}),
                     Axis{0.0, cube.radar.range_resolution() / pad, static_cast<int>(nfft)}};
    parallel_for(nrx * ncpi, [&](std::size_t job) {
        const std::size_t n = job % nrx, p = job / nrx;
        for (std::size_t k = 0; k < nk; ++k) {
            auto src = cube.data.line(k, n, p);
            auto dst = out.data.line(k, n, p);
            for (std::size_t s = 0; s < ns; ++s) dst[s] = src[s] * win[s];
            plan.transform(dst);
        }
    });
    return out;
}

RangeDopplerResult doppler_process(const RangeProfile& profile, const RadarParams& radar,
                                   const RangeDopplerOptions& options) {
    check_pad(options.doppler_pad);
    const std::size_t nr = profile.data.dim(0), nk = profile.data.dim(1), nrx = profile.data.dim(2),
                      ncpi = profile.data.dim(3);
    const std::size_t nd = nk * static_cast<std::size_t>(options.doppler_pad);
    const std::size_t half = nd / 2;
    const FftPlan plan(nd);
    const auto win = make_window(options.window, nk);

    RangeDopplerResult result;
    result.rd = ComplexCube({nr, nd, nrx, ncpi});
    parallel_for(nrx * ncpi, [&](std::size_t job) {
        const std::size_t n = job % nrx, p = job / nrx;
        std::vector<cplx> buf(nd);
        for (std::size_t r = 0; r < nr; ++r) {
            std::fill(buf.begin(), buf.end(), cplx{});
            for (std::size_t k = 0; k < nk; ++k) buf[k] = profile.data(r, k, n, p) * win[k];
            plan.transform(buf);
            for (std::size_t d = 0; d < nd; ++d) result.rd(r, (d + half) % nd, n, p) = buf[d];
        }
    });

    const double dv = radar.wavelength() / (2.0 * static_cast<double>(nd) * radar.chirp_period);
    const Axis vel{-static_cast<double>(half) * dv, dv, static_cast<int>(nd)};
    result.maps.resize(ncpi);
    for (std::size_t p = 0; p < ncpi; ++p) {
        auto& m = result.maps[p];
        m.power = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nd));
        m.range_axis = profile.range_axis;
        m.velocity_axis = vel;
        m.cpi_index = static_cast<int>(p);
        for (std::size_t n = 0; n < nrx; ++n) {
            for (std::size_t d = 0; d < nd; ++d) {
                for (std::size_t r = 0; r < nr; ++r) m.power(r, d) += std::norm(result.rd(r, d, n, p));
            }
        }
    }
    return result;
}

RangeDopplerResult range_doppler(const DataCube& cube, const RangeDopplerOptions& options) {
    return doppler_process(range_profile(cube, options.window, options.range_pad), cube.radar, options);
}

}  // namespace fmcw
