#include <doctest.h>

#include <set>

#include "fmcw/specproc.hpp"
#include "fmcw/synth.hpp"
#include "oracles.hpp"
#include "reference.hpp"

using namespace fmcw;

namespace {

Eigen::Index argmax_row(const Eigen::MatrixXd& m, Eigen::Index row) {
    Eigen::Index c;
    m.row(row).maxCoeff(&c);
    return c;
}

DataCube random_cube(std::size_t ns, std::size_t nk, std::size_t nrx, std::size_t ncpi, std::uint64_t seed) {
    RadarParams r;
    r.n_samples = static_cast<int>(ns);
    r.n_chirps = static_cast<int>(nk);
    r.n_cpi = static_cast<int>(ncpi);
    ArrayGeometry a;
    a.n_rx = static_cast<int>(nrx);
    DataCube cube{ComplexCube({ns, nk, nrx, ncpi}), r, a};
    std::mt19937_64 gen(seed);
    auto v = oracle::random_vector(cube.data.size(), gen);
    std::copy(v.begin(), v.end(), cube.data.data().begin());
    return cube;
}

}  // namespace

TEST_CASE("reference scene peaks at the true range and velocity") {
    auto s = testing_support::reference_scenario();
    s.radar.n_cpi = 1;
    const auto cube = synthesize(s);
    const auto rd = range_doppler(cube, {s.processing.window});
    REQUIRE(rd.maps.size() == 1);
    const auto& m = rd.maps[0];
    CHECK(m.power.rows() == 256);
    CHECK(m.power.cols() == 256);

    const double dv = m.velocity_axis.step;
    CHECK(dv == doctest::Approx(0.76043132).epsilon(1e-7));
    CHECK(m.velocity_axis.value(128) == 0.0);
    CHECK(m.range_axis.step == doctest::Approx(0.99930819).epsilon(1e-7));

    for (const auto& t : s.targets) {
        const auto row = static_cast<Eigen::Index>(std::lround(t.range_m / m.range_axis.step));
        Eigen::Index r, d;
        m.power.block(row - 3, 0, 7, m.power.cols()).maxCoeff(&r, &d);
        r += row - 3;
        CHECK(std::abs(m.range_axis.value(static_cast<int>(r)) - t.range_m) <= m.range_axis.step);
        CHECK(std::abs(m.velocity_axis.value(static_cast<int>(d)) - t.vel_mps) <= dv);
    }
    // Doppler bin offsets from f_D / (PRF / n_chirps): 13.15 and -19.73.
    CHECK(argmax_row(m.power, 50) == 128 + 13);
    CHECK(argmax_row(m.power, 100) == 128 - 20);
}

TEST_CASE("range profile peaks on every channel") {
    auto s = testing_support::reference_scenario();
    s.radar.snr_db.reset();
    s.radar.n_chirps = 2;
    s.radar.n_cpi = 1;
    const auto prof = range_profile(synthesize(s));
    for (int n = 0; n < 8; ++n) {
        std::vector<std::pair<double, int>> mags;
        for (int r = 0; r < 256; ++r) mags.push_back({std::abs(prof.data(r, 0, n, 0)), r});
        std::sort(mags.rbegin(), mags.rend());
        CHECK(std::set<int>{mags[0].second, mags[1].second} == std::set<int>{50, 100});
    }
}

TEST_CASE("static on-grid target: coherent gain and zero-Doppler bin") {
    auto s = testing_support::reference_scenario();
    s.radar.snr_db.reset();
    s.radar.n_chirps = 32;
    s.radar.n_cpi = 1;
    s.targets = {{40 * s.radar.range_resolution(), 0.0, 20.0, 1.5}};
    const auto cube = synthesize(s);
    const auto prof = range_profile(cube);
    // Direct-sum coherent gain: amplitude · n_samples.
    CHECK(std::abs(prof.data(40, 0, 0, 0)) == doctest::Approx(1.5 * 256).epsilon(0.05));

    const auto rd = doppler_process(prof, s.radar);
    Eigen::Index r, d;
    rd.maps[0].power.maxCoeff(&r, &d);
    CHECK(r == 40);
    CHECK(d == 16);
    CHECK(rd.maps[0].velocity_axis.value(static_cast<int>(d)) == 0.0);
}

TEST_CASE("map equals a direct 2-D DFT at 32x32") {
    const auto cube = random_cube(32, 32, 2, 1, 3);
    const auto rd = range_doppler(cube);
    const auto& m = rd.maps[0].power;
    double worst = 0, scale = 0;
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(32, 32);
    for (int n = 0; n < 2; ++n) {
        for (int r = 0; r < 32; ++r) {
            for (int d = 0; d < 32; ++d) {
                // Column d holds Doppler frequency index d - 16 after the shift.
                const int f = (d + 16) % 32;
                long double re = 0, im = 0;
                for (int k = 0; k < 32; ++k) {
                    for (int smp = 0; smp < 32; ++smp) {
                        const long double ang = -2.0L * std::numbers::pi_v<long double> *
                                                (static_cast<long double>((r * smp) % 32) / 32 +
                                                 static_cast<long double>((f * k) % 32) / 32);
                        const auto x = cube.data(smp, k, n, 0);
                        re += x.real() * std::cos(ang) - x.imag() * std::sin(ang);
                        im += x.real() * std::sin(ang) + x.imag() * std::cos(ang);
                    }
                }
                ref(r, d) += static_cast<double>(re * re + im * im);
            }
        }
    }
    for (int r = 0; r < 32; ++r) {
        for (int d = 0; d < 32; ++d) {
            worst = std::max(worst, std::abs(m(r, d) - ref(r, d)));
            scale = std::max(scale, ref(r, d));
        }
    }
    CHECK(worst <= 1e-9 * scale);
    CHECK(m.sum() == doctest::Approx(ref.sum()).epsilon(1e-12));
}

TEST_CASE("zero cube, linearity and padding") {
    auto zero = random_cube(16, 8, 2, 2, 1);
    std::fill(zero.data.data().begin(), zero.data.data().end(), cplx{});
    const auto rz = range_doppler(zero, {Window::hann});
    for (const auto& m : rz.maps) CHECK(m.power.maxCoeff() == 0.0);

    const auto a = random_cube(16, 8, 2, 1, 5);
    const auto b = random_cube(16, 8, 2, 1, 6);
    auto sum = a;
    for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data.data()[i] = 2.0 * a.data.data()[i] - b.data.data()[i];
    const auto ra = range_doppler(a, {Window::hann}).rd;
    const auto rb = range_doppler(b, {Window::hann}).rd;
    const auto rs = range_doppler(sum, {Window::hann}).rd;
    double worst = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        worst = std::max(worst, std::abs(rs.data()[i] - 2.0 * ra.data()[i] + rb.data()[i]));
    }
    CHECK(worst < 1e-12);

    const auto padded = range_doppler(a, {Window::rect, 2, 4});
    CHECK(padded.maps[0].power.rows() == 32);
    CHECK(padded.maps[0].power.cols() == 32);
    CHECK(padded.maps[0].range_axis.step == doctest::Approx(a.radar.range_resolution() / 2));
    CHECK_THROWS_AS(range_doppler(a, {Window::rect, 3, 1}), std::invalid_argument);
}

TEST_CASE("periodic Hann window") {
    const auto w = make_window(Window::hann, 8);
    CHECK(w[0] == 0.0);
    CHECK(w[4] == doctest::Approx(1.0));
    CHECK(w[2] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(w[7]));
    for (double v : make_window(Window::rect, 5)) CHECK(v == 1.0);
}
