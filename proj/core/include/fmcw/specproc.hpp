#pragma once

#include <vector>

#include <Eigen/Core>

#include "fmcw/cube.hpp"
#include "fmcw/scene.hpp"
#include "fmcw/synth.hpp"

namespace fmcw {

/// Uniformly spaced physical axis: value(i) = start + i·step.
struct Axis {
    double start = 0.0;
    double step = 1.0;
    int size = 0;

    double value(int i) const { return start + i * step; }
};

struct RangeDopplerOptions {
    Window window = Window::rect;
    int range_pad = 1;    // FFT length multiplier along fast time (power of two)
    int doppler_pad = 1;  // same along slow time
};

/// Fast-time spectrum, indexed [range bin, chirp, channel, cpi].
struct RangeProfile {
    ComplexCube data;
    Axis range_axis;
};

/// Channel-summed power for one CPI. Rows are range bins, columns Doppler
/// bins after the half shift (zero velocity at column n_doppler/2).
struct RangeDopplerMap {
    Eigen::MatrixXd power;
    Axis range_axis;
    Axis velocity_axis;
    int cpi_index = 0;
};

struct RangeDopplerResult {
    std::vector<RangeDopplerMap> maps;
    ComplexCube rd;  // [range bin, doppler bin (shifted), channel, cpi]
};

std::vector<double> make_window(Window kind, std::size_t n);

RangeProfile range_profile(const DataCube& cube, Window window = Window::rect, int pad = 1);

/// Slow-time FFT on an existing range profile.
RangeDopplerResult doppler_process(const RangeProfile& profile, const RadarParams& radar,
                                   const RangeDopplerOptions& options = {});

RangeDopplerResult range_doppler(const DataCube& cube, const RangeDopplerOptions& options = {});

}  // namespace fmcw
