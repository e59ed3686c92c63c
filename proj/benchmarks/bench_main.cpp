#include <benchmark/benchmark.h>

#include <random>

#include "fmcw/cfar.hpp"
#include "fmcw/doa.hpp"
#include "fmcw/fft.hpp"
#include "fmcw/specproc.hpp"
#include "fmcw/synth.hpp"

using namespace fmcw;

namespace {

Scenario reference() {
    Scenario s;
    s.radar.snr_db = 20.0;
    s.targets = {{50, 10, -15, 1}, {100, -15, 10, 1}};
    s.processing.window = Window::hann;
    return s;
}

SnapshotSet random_snapshots(int count) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    SnapshotSet s;
    s.snapshots.resize(8, count);
    for (Eigen::Index i = 0; i < s.snapshots.size(); ++i) s.snapshots.data()[i] = {nd(gen), nd(gen)};
    s.snapshots.row(0).array() += 3.0;
    return s;
}

}  // namespace

static void BM_Fft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    FftPlan plan(n);
    std::vector<cplx> x(n, cplx(1.0, 0.5));
    for (auto _ : state) {
        plan.transform(x);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(8, 4096);

static void BM_Synthesize(benchmark::State& state) {
    auto s = reference();
    s.radar.n_cpi = 1;
    for (auto _ : state) benchmark::DoNotOptimize(synthesize(s));
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

static void BM_RangeDoppler(benchmark::State& state) {
    auto s = reference();
    s.radar.n_cpi = 1;
    const auto cube = synthesize(s);
    for (auto _ : state) benchmark::DoNotOptimize(range_doppler(cube, {Window::hann}));
}
BENCHMARK(BM_RangeDoppler)->Unit(benchmark::kMillisecond);

static void BM_CaCfar(benchmark::State& state) {
    std::mt19937_64 gen(2);
    std::exponential_distribution<double> ex;
    RangeDopplerMap m;
    m.power.resize(256, 256);
    for (Eigen::Index i = 0; i < m.power.size(); ++i) m.power.data()[i] = ex(gen);
    m.range_axis = {0, 1, 256};
    m.velocity_axis = {0, 1, 256};
    for (auto _ : state) benchmark::DoNotOptimize(ca_cfar_2d(m, {}));
}
BENCHMARK(BM_CaCfar)->Unit(benchmark::kMillisecond);

static void BM_FftAngle(benchmark::State& state) {
    const auto snap = random_snapshots(static_cast<int>(state.range(0)));
    const ArrayGeometry array;
    for (auto _ : state) benchmark::DoNotOptimize(fft_angle_spectrum(snap, 256, array));
}
BENCHMARK(BM_FftAngle)->Arg(2)->Arg(256);

static void BM_Music(benchmark::State& state) {
    const auto snap = random_snapshots(512);
    const auto grid = make_angle_grid(-90, 90, 0.1);
    const ArrayGeometry array;
    for (auto _ : state) benchmark::DoNotOptimize(music_pseudospectrum(covariance(snap), 2, grid, array));
}
BENCHMARK(BM_Music);

static void BM_HermitianEig(benchmark::State& state) {
    const auto cov = covariance(random_snapshots(64));
    for (auto _ : state) benchmark::DoNotOptimize(hermitian_eig(cov));
}
BENCHMARK(BM_HermitianEig);

static void BM_CsSpectrum(benchmark::State& state) {
    const auto snap = random_snapshots(512);
    const auto dict = build_dictionary(make_angle_grid(-90, 90, 1.0), ArrayGeometry{});
    for (auto _ : state) benchmark::DoNotOptimize(cs_angle_spectrum(snap, dict, {}));
}
BENCHMARK(BM_CsSpectrum)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
