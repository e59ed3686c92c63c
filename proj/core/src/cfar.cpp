#include "fmcw/cfar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <stdexcept>
#include <utility>

namespace fmcw {

double threshold_factor(int training_cells, double pfa) {
    if (training_cells < 1) throw std::invalid_argument("threshold_factor: training cell count must be >= 1");
    if (!(pfa > 0.0 && pfa <= 1.0)) throw std::invalid_argument("threshold_factor: pfa must lie in (0, 1]");
    const double m = training_cells;
    // pfa^(-1/M) - 1 written as expm1 to keep precision for large M.
    return m * std::expm1(-std::log(pfa) / m);
}

namespace {

void check_config(const CfarConfig& c) {
    if (c.guard_half < 0 || c.train_half <= c.guard_half) {
        throw std::invalid_argument("CFAR window requires train_half > guard_half >= 0");
    }
    if (!(c.pfa > 0.0 && c.pfa < 1.0)) throw std::invalid_argument("CFAR pfa must lie in (0, 1)");
}

}  // namespace

long tested_cell_count(int rows, int cols, const CfarConfig& config) {
    const int w = config.window_size();
    if (rows < w || cols < w) return 0;
    return static_cast<long>(rows - 2 * config.train_half) * (cols - 2 * config.train_half);
}

std::vector<Detection> ca_cfar_2d(const RangeDopplerMap& map, const CfarConfig& config) {
    check_config(config);
    const int rows = static_cast<int>(map.power.rows());
    const int cols = static_cast<int>(map.power.cols());
    const int w = config.window_size();
    if (rows < w || cols < w) {
        throw std::invalid_argument("range-Doppler map " + std::to_string(rows) + "x" + std::to_string(cols) +
                                    " is smaller than the " + std::to_string(w) + "x" + std::to_string(w) +
                                    " CFAR window");
    }

    const int th = config.train_half, gh = config.guard_half;
    const int m = config.training_cells();
    const double a = threshold_factor(m, config.pfa);
    const auto& P = map.power;

    std::vector<Detection> out;
    for (int r = th; r < rows - th; ++r) {
        for (int d = th; d < cols - th; ++d) {
            double sum = 0.0;
            for (int i = r - th; i <= r + th; ++i) {
                if (std::abs(i - r) > gh) {
                    for (int j = d - th; j <= d + th; ++j) sum += P(i, j);
                } else {
                    // Guard rows contribute only the cells left and right of the guard block.
                    for (int j = d - th; j < d - gh; ++j) sum += P(i, j);
                    for (int j = d + gh + 1; j <= d + th; ++j) sum += P(i, j);
                }
            }
            const double threshold = a * sum / m;
            const double cell = P(r, d);
            if (cell > threshold) {
                out.push_back({r, d, map.range_axis.value(r), map.velocity_axis.value(d), cell, threshold,
                               map.cpi_index});
            }
        }
    }
    return out;
}

std::vector<Detection> cluster_detections(const std::vector<Detection>& detections) {
    std::map<std::tuple<int, int, int>, std::size_t> index;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        const auto& d = detections[i];
        index[{d.cpi_index, d.range_bin, d.doppler_bin}] = i;
    }

    std::vector<bool> seen(detections.size(), false);
    std::vector<Detection> out;
    for (std::size_t i = 0; i < detections.size(); ++i) {
        if (seen[i]) continue;
        seen[i] = true;
        std::vector<std::size_t> stack{i};
        std::size_t best = i;
        while (!stack.empty()) {
            const auto cur = stack.back();
            stack.pop_back();
            const auto& c = detections[cur];
            if (c.cell_power > detections[best].cell_power) best = cur;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dd = -1; dd <= 1; ++dd) {
                    if (dr == 0 && dd == 0) continue;
                    auto it = index.find({c.cpi_index, c.range_bin + dr, c.doppler_bin + dd});
                    if (it != index.end() && !seen[it->second]) {
                        seen[it->second] = true;
                        stack.push_back(it->second);
                    }
                }
            }
        }
        out.push_back(detections[best]);
    }
    std::sort(out.begin(), out.end(), [](const Detection& x, const Detection& y) {
        return std::tie(x.cpi_index, x.range_bin, x.doppler_bin) < std::tie(y.cpi_index, y.range_bin, y.doppler_bin);
    });
    return out;
}

}  // namespace fmcw
