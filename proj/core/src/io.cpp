#include "fmcw/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "fmcw/errors.hpp"

namespace fmcw {

static_assert(std::endian::native == std::endian::little, "cube files are written with native little-endian layout");

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

template <class T>
void put(std::vector<char>& out, std::size_t at, T value) {
    std::memcpy(out.data() + at, &value, sizeof value);
}

template <class T>
T get(const char* data, std::size_t at) {
    T value;
    std::memcpy(&value, data + at, sizeof value);
    return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream os(path, mode | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw IoError("failed writing '" + path.string() + "'");
}

double to_db(double p) { return 10.0 * std::log10(std::max(p, std::numeric_limits<double>::min())); }

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path, std::ios::out | std::ios::binary);
    os << text;
    finish(os, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_cube_file(const std::filesystem::path& path, const DataCube& cube) {
    std::vector<char> header(CubeHeader::kSize, 0);
    std::memcpy(header.data(), CubeHeader::kMagic, 8);
    put<std::uint32_t>(header, 8, CubeHeader::kVersion);
    put<std::uint32_t>(header, 12, static_cast<std::uint32_t>(cube.n_samples()));
    put<std::uint32_t>(header, 16, static_cast<std::uint32_t>(cube.n_chirps()));
    put<std::uint32_t>(header, 20, static_cast<std::uint32_t>(cube.n_rx()));
    put<std::uint32_t>(header, 24, static_cast<std::uint32_t>(cube.n_cpi()));
    put<double>(header, 32, cube.radar.sample_rate());
    put<double>(header, 40, cube.radar.chirp_period);
    put<double>(header, 48, cube.radar.fc);
    put<double>(header, 56, cube.radar.bandwidth);

    std::vector<float> payload;
    payload.reserve(cube.data.size() * 2);
    for (const auto& v : cube.data.data()) {
        payload.push_back(static_cast<float>(v.real()));
        payload.push_back(static_cast<float>(v.imag()));
    }
    auto os = open_out(path, std::ios::out | std::ios::binary);
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    os.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size() * sizeof(float)));
    finish(os, path);
}

CubeFile read_cube_file(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    if (bytes.size() < CubeHeader::kSize || std::memcmp(bytes.data(), CubeHeader::kMagic, 8) != 0) {
        throw IoError("'" + path.string() + "' is not a cube file");
    }
    CubeFile f;
    const char* d = bytes.data();
    f.header.version = get<std::uint32_t>(d, 8);
    if (f.header.version != CubeHeader::kVersion) {
        throw IoError("'" + path.string() + "' has unsupported cube version " + std::to_string(f.header.version));
    }
    f.header.n_samples = get<std::uint32_t>(d, 12);
    f.header.n_chirps = get<std::uint32_t>(d, 16);
    f.header.n_rx = get<std::uint32_t>(d, 20);
    f.header.n_cpi = get<std::uint32_t>(d, 24);
    f.header.sample_rate = get<double>(d, 32);
    f.header.chirp_period = get<double>(d, 40);
    f.header.fc = get<double>(d, 48);
    f.header.bandwidth = get<double>(d, 56);

    const std::size_t count = std::size_t{f.header.n_samples} * f.header.n_chirps * f.header.n_rx * f.header.n_cpi;
    if (bytes.size() != CubeHeader::kSize + count * 2 * sizeof(float)) {
        throw IoError("'" + path.string() + "' payload size does not match its header");
    }
    f.data = ComplexCube({f.header.n_samples, f.header.n_chirps, f.header.n_rx, f.header.n_cpi});
    auto& out = f.data.data();
    for (std::size_t i = 0; i < count; ++i) {
        const float re = get<float>(d, CubeHeader::kSize + 8 * i);
        const float im = get<float>(d, CubeHeader::kSize + 8 * i + 4);
        out[i] = {re, im};
    }
    return f;
}

DataCube cube_from_file(const CubeFile& file, const Scenario& scenario) {
    const auto& h = file.header;
    const auto& r = scenario.radar;
    const bool dims_ok = h.n_samples == static_cast<std::uint32_t>(r.n_samples) &&
                         h.n_chirps == static_cast<std::uint32_t>(r.n_chirps) &&
                         h.n_rx == static_cast<std::uint32_t>(scenario.array.n_rx) &&
                         h.n_cpi == static_cast<std::uint32_t>(r.n_cpi);
    const bool radar_ok = h.fc == r.fc && h.bandwidth == r.bandwidth && h.chirp_period == r.chirp_period;
    if (!dims_ok || !radar_ok) throw DependencyError("cached cube does not match the scenario; rerun the simulate stage");
    return DataCube{file.data, r, scenario.array};
}

void write_range_doppler_csv(const std::filesystem::path& path, const RangeDopplerMap& map) {
    auto os = open_out(path);
    os << "# cpi=" << map.cpi_index << ",n_range=" << map.range_axis.size
       << ",range_start_m=" << format_number(map.range_axis.start) << ",range_step_m=" << format_number(map.range_axis.step)
       << ",n_doppler=" << map.velocity_axis.size << ",velocity_start_mps=" << format_number(map.velocity_axis.start)
       << ",velocity_step_mps=" << format_number(map.velocity_axis.step) << "\n";
    for (Eigen::Index r = 0; r < map.power.rows(); ++r) {
        for (Eigen::Index d = 0; d < map.power.cols(); ++d) {
            if (d) os << ',';
            os << format_number(map.power(r, d));
        }
        os << '\n';
    }
    finish(os, path);
}

void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& power, double dynamic_range_db) {
    const double peak_db = power.size() ? to_db(power.maxCoeff()) : 0.0;
    const double floor_db = peak_db - dynamic_range_db;
    std::string out = "P5\n" + std::to_string(power.cols()) + " " + std::to_string(power.rows()) + "\n65535\n";
    out.reserve(out.size() + static_cast<std::size_t>(power.size()) * 2);
    for (Eigen::Index r = 0; r < power.rows(); ++r) {
        for (Eigen::Index c = 0; c < power.cols(); ++c) {
            double frac = (to_db(power(r, c)) - floor_db) / dynamic_range_db;
            frac = std::clamp(frac, 0.0, 1.0);
            const auto v = static_cast<std::uint16_t>(std::lround(frac * 65535.0));
            out.push_back(static_cast<char>(v >> 8));  // PGM samples are big-endian
            out.push_back(static_cast<char>(v & 0xff));
        }
    }
    write_text_file(path, out);
}

void write_detections_csv(const std::filesystem::path& path, const std::vector<Detection>& detections) {
    auto os = open_out(path);
    os << "cpi,range_bin,doppler_bin,range_m,vel_mps,power_db,threshold_db\n";
    for (const auto& d : detections) {
        os << d.cpi_index << ',' << d.range_bin << ',' << d.doppler_bin << ',' << format_number(d.range_m) << ','
           << format_number(d.vel_mps) << ',' << format_number(to_db(d.cell_power)) << ','
           << format_number(to_db(d.threshold)) << '\n';
    }
    finish(os, path);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("malformed number '" + s + "' in '" + path.string() + "'");
    }
}

}  // namespace

std::vector<Detection> read_detections_csv(const std::filesystem::path& path) {
    std::istringstream is(read_text_file(path));
    std::string line;
    if (!std::getline(is, line) || line.rfind("cpi,range_bin", 0) != 0) {
        throw IoError("'" + path.string() + "' is not a detections CSV");
    }
    std::vector<Detection> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 7) throw IoError("malformed detection row in '" + path.string() + "'");
        Detection d;
        d.cpi_index = static_cast<int>(parse_double(f[0], path));
        d.range_bin = static_cast<int>(parse_double(f[1], path));
        d.doppler_bin = static_cast<int>(parse_double(f[2], path));
        d.range_m = parse_double(f[3], path);
        d.vel_mps = parse_double(f[4], path);
        d.cell_power = std::pow(10.0, parse_double(f[5], path) / 10.0);
        d.threshold = std::pow(10.0, parse_double(f[6], path) / 10.0);
        out.push_back(d);
    }
    return out;
}

void write_spectrum_csv(const std::filesystem::path& path, const AngleSpectrum& spectrum) {
    auto os = open_out(path);
    os << "# method=" << to_string(spectrum.method) << '\n';
    for (const auto& p : spectrum.peaks) {
        os << "# peak angle_deg=" << format_number(p.angle_deg) << " power_linear=" << format_number(p.power) << '\n';
    }
    os << "angle_deg,power_linear,power_db\n";
    for (std::size_t i = 0; i < spectrum.angles_deg.size(); ++i) {
        os << format_number(spectrum.angles_deg[i]) << ',' << format_number(spectrum.power[i]) << ','
           << format_number(to_db(spectrum.power[i])) << '\n';
    }
    finish(os, path);
}

AngleSpectrum read_spectrum_csv(const std::filesystem::path& path) {
    std::istringstream is(read_text_file(path));
    AngleSpectrum s;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# method=", 0) == 0) {
            const auto m = line.substr(9);
            s.method = m == "music" ? DoaMethod::music : m == "cs" ? DoaMethod::cs : DoaMethod::fft;
        } else if (line.rfind("# peak ", 0) == 0) {
            SpectrumPeak p;
            if (std::sscanf(line.c_str(), "# peak angle_deg=%lf power_linear=%lf", &p.angle_deg, &p.power) == 2) {
                s.peaks.push_back(p);
            }
        } else if (line[0] == '#') {
            continue;
        } else if (!header_seen) {
            if (line.rfind("angle_deg,", 0) != 0) throw IoError("'" + path.string() + "' is not an angle spectrum CSV");
            header_seen = true;
        } else {
            const auto f = split(line, ',');
            if (f.size() != 3) throw IoError("malformed spectrum row in '" + path.string() + "'");
            s.angles_deg.push_back(parse_double(f[0], path));
            s.power.push_back(parse_double(f[1], path));
        }
    }
    if (!header_seen) throw IoError("'" + path.string() + "' is not an angle spectrum CSV");
    return s;
}

void write_range_angle_csv(const std::filesystem::path& path, const Eigen::MatrixXd& map, const Axis& range_axis,
                           const std::vector<double>& grid, int cpi) {
    auto os = open_out(path);
    os << "# cpi=" << cpi << ",n_range=" << map.rows() << ",range_start_m=" << format_number(range_axis.start)
       << ",range_step_m=" << format_number(range_axis.step) << ",n_angle=" << grid.size()
       << ",angle_start_deg=" << format_number(grid.empty() ? 0.0 : grid.front())
       << ",angle_step_deg=" << format_number(grid.size() > 1 ? grid[1] - grid[0] : 0.0) << '\n';
    for (Eigen::Index r = 0; r < map.rows(); ++r) {
        for (Eigen::Index c = 0; c < map.cols(); ++c) {
            if (c) os << ',';
            os << format_number(map(r, c));
        }
        os << '\n';
    }
    finish(os, path);
}

std::string spectrum_to_svg(const AngleSpectrum& spectrum, const std::string& title) {
    constexpr double width = 640, height = 360, left = 60, right = 20, top = 40, bottom = 50;
    constexpr double floor_db = -60.0;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    double peak = 0.0;
    for (double p : spectrum.power) peak = std::max(peak, p);

    auto x_of = [&](double deg) { return left + (deg + 90.0) / 180.0 * plot_w; };
    auto y_of = [&](double db) { return top + (std::clamp(db, floor_db, 0.0) / floor_db) * plot_h; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
       << title << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int deg = -90; deg <= 90; deg += 30) {
        os << "<text x=\"" << x_of(deg) << "\" y=\"" << height - bottom + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << deg << "</text>\n";
    }
    for (int db = 0; db >= floor_db; db -= 20) {
        os << "<text x=\"" << left - 6 << "\" y=\"" << y_of(db) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << db << "</text>\n";
    }
    os << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">angle (deg)</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < spectrum.angles_deg.size(); ++i) {
        const double db = peak > 0 ? to_db(spectrum.power[i] / peak) : floor_db;
        os << format_number(x_of(spectrum.angles_deg[i])) << ',' << format_number(y_of(db)) << ' ';
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

}  // namespace fmcw
