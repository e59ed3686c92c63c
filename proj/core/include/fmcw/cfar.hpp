#pragma once

#include <vector>

#include "fmcw/scene.hpp"
#include "fmcw/specproc.hpp"

namespace fmcw {

struct Detection {
    int range_bin = 0;
    int doppler_bin = 0;
    double range_m = 0.0;
    double vel_mps = 0.0;
    double cell_power = 0.0;
    double threshold = 0.0;
    int cpi_index = 0;
};

/// CA-CFAR scale a = M·(pfa^(−1/M) − 1). Requires M >= 1 and 0 < pfa <= 1.
double threshold_factor(int training_cells, double pfa);

/// Two-dimensional cell-averaging CFAR over linear power. The noise estimate
/// is the mean of the training ring (outer window minus the guard block that
/// contains the CUT). Cells whose window leaves the map are not tested.
/// Throws std::invalid_argument if the map is smaller than the window or the
/// configuration is inconsistent.
std::vector<Detection> ca_cfar_2d(const RangeDopplerMap& map, const CfarConfig& config);

/// Number of cells ca_cfar_2d tests on a map of the given shape.
long tested_cell_count(int rows, int cols, const CfarConfig& config);

/// Groups 8-connected detections (per CPI) and keeps the strongest cell of
/// each group.
std::vector<Detection> cluster_detections(const std::vector<Detection>& detections);

}  // namespace fmcw
