#include <doctest.h>

#include <cstring>
#include <filesystem>

#include <unistd.h>

#include "fmcw/errors.hpp"
#include "fmcw/io.hpp"
#include "fmcw/synth.hpp"
#include "oracles.hpp"
#include "reference.hpp"

using namespace fmcw;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fmcw_io_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

Scenario small() {
    auto s = testing_support::reference_scenario();
    s.radar.n_chirps = 8;
    s.radar.n_cpi = 2;
    return s;
}

template <class T>
T read_le(const std::string& bytes, std::size_t at) {
    T v;
    std::memcpy(&v, bytes.data() + at, sizeof(T));
    return v;
}

}  // namespace

TEST_CASE("cube file layout and round trip") {
    auto s = small();
    auto cube = synthesize(s);
    quantize_to_float(cube);
    const auto path = scratch("cube.bin");
    write_cube_file(path, cube);

    const auto bytes = oracle::read_file(path);
    REQUIRE(bytes.size() == 64 + cube.data.size() * 8);
    CHECK(bytes.substr(0, 8) == "FMCWCUBE");
    CHECK(read_le<std::uint32_t>(bytes, 8) == 1);
    CHECK(read_le<std::uint32_t>(bytes, 12) == 256);
    CHECK(read_le<std::uint32_t>(bytes, 16) == 8);
    CHECK(read_le<std::uint32_t>(bytes, 20) == 8);
    CHECK(read_le<std::uint32_t>(bytes, 24) == 2);
    CHECK(read_le<std::uint32_t>(bytes, 28) == 0);
    CHECK(read_le<double>(bytes, 32) == s.radar.sample_rate());
    CHECK(read_le<double>(bytes, 40) == 10e-6);
    CHECK(read_le<double>(bytes, 48) == 77e9);
    CHECK(read_le<double>(bytes, 56) == 150e6);
    // Payload: float32 pairs, sample fastest.
    CHECK(read_le<float>(bytes, 64) == static_cast<float>(cube.data(0, 0, 0, 0).real()));
    CHECK(read_le<float>(bytes, 68) == static_cast<float>(cube.data(0, 0, 0, 0).imag()));
    CHECK(read_le<float>(bytes, 72) == static_cast<float>(cube.data(1, 0, 0, 0).real()));

    const auto file = read_cube_file(path);
    CHECK(file.data == cube.data);
    const auto back = cube_from_file(file, s);
    CHECK(back.data == cube.data);

    auto other = s;
    other.radar.n_chirps = 16;
    CHECK_THROWS_AS(cube_from_file(file, other), DependencyError);
}

TEST_CASE("corrupt cube files") {
    const auto path = scratch("bad.bin");
    write_text_file(path, "NOTACUBE and some more bytes to pass the header length check.........");
    CHECK_THROWS_AS(read_cube_file(path), IoError);
    CHECK_THROWS_AS(read_cube_file(scratch("missing.bin")), IoError);

    auto cube = synthesize(small());
    const auto good = scratch("trunc.bin");
    write_cube_file(good, cube);
    auto bytes = oracle::read_file(good);
    bytes.resize(bytes.size() - 4);
    write_text_file(good, bytes);
    CHECK_THROWS_AS(read_cube_file(good), IoError);
}

TEST_CASE("detections CSV round trip") {
    std::vector<Detection> d = {{50, 141, 49.965, 9.886, 1234.5, 17.25, 0}, {100, 108, 99.93, -15.21, 99.0, 3.5, 9}};
    const auto path = scratch("det.csv");
    write_detections_csv(path, d);
    CHECK(oracle::read_file(path).rfind("cpi,range_bin,doppler_bin,range_m,vel_mps,power_db,threshold_db\n", 0) == 0);
    const auto back = read_detections_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1].cpi_index == 9);
    CHECK(back[1].range_bin == 100);
    CHECK(back[1].doppler_bin == 108);
    CHECK(back[0].vel_mps == doctest::Approx(9.886));
    CHECK(back[0].cell_power == doctest::Approx(1234.5).epsilon(1e-8));
    write_text_file(path, "something else\n");
    CHECK_THROWS_AS(read_detections_csv(path), IoError);
}

TEST_CASE("spectrum CSV round trip and SVG") {
    AngleSpectrum s;
    s.method = DoaMethod::music;
    s.angles_deg = {-1, 0, 1};
    s.power = {0.5, 2.0, 0.0};
    s.peaks = {{0.0, 2.0}};
    const auto path = scratch("spec.csv");
    write_spectrum_csv(path, s);
    const auto text = oracle::read_file(path);
    CHECK(text.rfind("# method=music\n# peak angle_deg=0 power_linear=2\nangle_deg,power_linear,power_db\n", 0) == 0);
    const auto back = read_spectrum_csv(path);
    CHECK(back.method == DoaMethod::music);
    CHECK(back.angles_deg == s.angles_deg);
    CHECK(back.power == s.power);
    REQUIRE(back.peaks.size() == 1);
    CHECK(back.peaks[0].angle_deg == 0.0);

    const auto svg = spectrum_to_svg(s, "MUSIC");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("range-Doppler CSV and PGM") {
    RangeDopplerMap m;
    m.power = Eigen::MatrixXd::Ones(3, 4);
    m.power(1, 2) = 1e6;
    m.range_axis = {0, 1, 3};
    m.velocity_axis = {-2, 1, 4};
    const auto csv = scratch("rd.csv");
    write_range_doppler_csv(csv, m);
    const auto text = oracle::read_file(csv);
    CHECK(text.rfind("# cpi=0,n_range=3,range_start_m=0,range_step_m=1,n_doppler=4,velocity_start_mps=-2", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);

    const auto pgm = scratch("rd.pgm");
    write_pgm(pgm, m.power);
    const auto bytes = oracle::read_file(pgm);
    const std::string header = "P5\n4 3\n65535\n";
    REQUIRE(bytes.size() == header.size() + 24);
    CHECK(bytes.substr(0, header.size()) == header);
    auto pixel = [&](int r, int c) {
        const auto at = header.size() + 2 * static_cast<std::size_t>(r * 4 + c);
        return (static_cast<unsigned char>(bytes[at]) << 8) | static_cast<unsigned char>(bytes[at + 1]);
    };
    CHECK(pixel(1, 2) == 65535);
    CHECK(pixel(0, 0) == 0);  // 60 dB below the peak
}

TEST_CASE("number format") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-15.0) == "-15");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
    CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x/y.txt", "a"), IoError);
}
