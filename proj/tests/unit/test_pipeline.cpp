#include <doctest.h>

#include <filesystem>
#include <set>

#include <json.hpp>
#include <unistd.h>

#include "fmcw/errors.hpp"
#include "fmcw/io.hpp"
#include "fmcw/pipeline.hpp"
#include "oracles.hpp"
#include "reference.hpp"

using namespace fmcw;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fmcw_pipeline_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunOptions small_run(const fs::path& out, std::vector<Stage> stages) {
    RunOptions o;
    o.scenario_path = testing_support::paper_scenario_path();
    o.out_dir = out;
    o.stages = std::move(stages);
    o.overrides = {"radar.n_cpi=2"};
    return o;
}

std::set<std::string> files_in(const fs::path& dir) {
    std::set<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
    return out;
}

}  // namespace

TEST_CASE("stage names") {
    for (auto s : all_stages()) CHECK(parse_stage(to_string(s)) == s);
    CHECK(parse_stage("doa-music") == Stage::doa_music);
    CHECK_FALSE(parse_stage("bogus").has_value());
    CHECK(all_stages().size() == 7);
}

TEST_CASE("full run writes exactly the manifest's files") {
    const auto out = fresh_dir("all");
    auto opts = small_run(out, all_stages());
    opts.cluster = true;
    const auto m = run(opts);

    std::set<std::string> listed(m.outputs.begin(), m.outputs.end());
    listed.insert("manifest.json");
    CHECK(files_in(out) == listed);
    CHECK(listed.count("cube.bin") == 1);
    CHECK(listed.count("rdmap_cpi00.csv") == 1);
    CHECK(listed.count("rdmap_cpi01.pgm") == 1);
    CHECK(listed.count("detections.csv") == 1);
    CHECK(listed.count("spectrum_fft.csv") == 1);
    CHECK(listed.count("spectrum_music.csv") == 1);
    CHECK(listed.count("spectrum_cs.csv") == 1);
    CHECK(listed.count("range_angle.csv") == 1);
    CHECK(listed.count("range_angle.pgm") == 1);

    const auto dets = read_detections_csv(out / "detections.csv");
    CHECK(dets.size() == 4);  // two clusters in each of the two CPIs

    for (const char* name : {"spectrum_fft.csv", "spectrum_music.csv", "spectrum_cs.csv"}) {
        const auto spec = read_spectrum_csv(out / name);
        REQUIRE(spec.peaks.size() == 2);
        std::vector<double> got{spec.peaks[0].angle_deg, spec.peaks[1].angle_deg};
        std::sort(got.begin(), got.end());
        CHECK_MESSAGE(std::abs(got[0] + 15) <= 1.0, name);
        CHECK_MESSAGE(std::abs(got[1] - 10) <= 1.0, name);
    }

    const auto j = nlohmann::json::parse(oracle::read_file(out / "manifest.json"));
    CHECK(j["tool_version"] == std::string(kToolVersion));
    CHECK(j["scenario_hash"] == content_hash(oracle::read_file(testing_support::paper_scenario_path())));
    CHECK(j["stages"].size() == 7);
    CHECK(j["outputs"].size() == m.outputs.size());
}

TEST_CASE("later stages need a cube") {
    const auto out = fresh_dir("nodeps");
    CHECK_THROWS_AS(run(small_run(out, {Stage::detect})), DependencyError);
    CHECK_THROWS_AS(run(small_run(out, {Stage::doa_music})), DependencyError);
}

TEST_CASE("DOA stages need detections") {
    const auto out = fresh_dir("nodets");
    run(small_run(out, {Stage::simulate}));
    CHECK_THROWS_AS(run(small_run(out, {Stage::doa_fft})), DependencyError);
    run(small_run(out, {Stage::detect}));
    CHECK_NOTHROW(run(small_run(out, {Stage::doa_fft})));
    CHECK(fs::exists(out / "spectrum_fft.csv"));
}

TEST_CASE("cached stages reproduce identical files") {
    const auto a = fresh_dir("cache_a");
    const auto b = fresh_dir("cache_b");
    auto all = small_run(a, all_stages());
    all.cluster = true;
    run(all);
    auto step = small_run(b, {Stage::simulate});
    step.cluster = true;
    run(step);
    for (auto s : {Stage::rdmap, Stage::detect, Stage::doa_fft, Stage::doa_music, Stage::doa_cs, Stage::range_angle}) {
        step.stages = {s};
        run(step);
    }
    for (const auto& name : files_in(a)) {
        if (name == "manifest.json") continue;
        CHECK_MESSAGE(oracle::read_file(a / name) == oracle::read_file(b / name), name);
    }
}

TEST_CASE("a changed seed changes the cube, the same seed does not") {
    const auto a = fresh_dir("seed_a");
    const auto b = fresh_dir("seed_b");
    const auto c = fresh_dir("seed_c");
    auto o = small_run(a, {Stage::simulate});
    o.seed = 5;
    run(o);
    o.out_dir = b;
    run(o);
    o.out_dir = c;
    o.seed = 6;
    run(o);
    CHECK(oracle::read_file(a / "cube.bin") == oracle::read_file(b / "cube.bin"));
    CHECK(oracle::read_file(a / "cube.bin") != oracle::read_file(c / "cube.bin"));
}

TEST_CASE("scenario errors surface with their types") {
    const auto out = fresh_dir("errors");
    auto o = small_run(out, {Stage::simulate});
    o.scenario_path = out / "missing.json";
    CHECK_THROWS_AS(run(o), IoError);

    write_text_file(out / "broken.json", "{ nope");
    o.scenario_path = out / "broken.json";
    CHECK_THROWS_AS(run(o), ParseError);

    o.scenario_path = testing_support::paper_scenario_path();
    o.overrides = {"targets.0.range_m=400"};
    CHECK_THROWS_AS(run(o), ValidationError);
}

TEST_CASE("source count") {
    auto s = testing_support::reference_scenario();
    std::vector<Detection> dets = {{50, 141, 0, 0, 10, 1, 0}, {100, 108, 0, 0, 10, 1, 0}, {50, 141, 0, 0, 10, 1, 1}};
    const ComplexCube prof({256, 4, 8, 2}), rd({256, 256, 8, 2});
    auto in = gather_doa_inputs(prof, rd, dets, s);
    CHECK(in.num_sources == 2);
    CHECK(in.cpi_index == 0);
    CHECK(in.chirp_snapshots.size() == 8);  // two range bins x four chirps
    CHECK(in.cell_snapshots.size() == 2);
    s.doa.num_sources = 3;
    CHECK(gather_doa_inputs(prof, rd, dets, s).num_sources == 3);
    s.doa.num_sources.reset();
    CHECK(gather_doa_inputs(prof, rd, {}, s).num_sources == 1);
}

TEST_CASE("resolution helpers") {
    CHECK(resolution_tolerance({-15, 10}) == 3.0);
    CHECK(resolution_tolerance({0, 5}) == 2.5);
    CHECK(resolution_tolerance({0, 5, 5}) == 2.5);
    const std::vector<SpectrumPeak> peaks = {{0.4, 1}, {0.6, 1}};
    CHECK(resolved_count(peaks, {0, 5}, 2.5) == 1);  // both peaks sit near the same truth
    CHECK(resolved_count({{0.4, 1}, {5.9, 1}}, {0, 5}, 2.5) == 2);
    CHECK(resolved_count({}, {0}, 3) == 0);
}

TEST_CASE("content hash is FNV-1a 64") {
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("compare writes a report ordered by runtime") {
    const auto out = fresh_dir("compare");
    auto o = small_run(out, {});
    const auto reports = compare_methods(o);
    REQUIRE(reports.size() == 3);
    for (std::size_t i = 1; i < reports.size(); ++i) CHECK(reports[i - 1].wall_seconds <= reports[i].wall_seconds);
    for (const auto& r : reports) {
        CHECK(r.n_truth == 2);
        CHECK(r.resolved == 2);
    }
    const auto text = oracle::read_file(out / "compare.csv");
    CHECK(text.rfind("method,wall_seconds,peak_angles_deg,abs_errors_deg,resolved,n_truth\n", 0) == 0);
}

TEST_CASE("compare: close pair separates the methods, single target does not") {
    RunOptions o;
    o.scenario_path = std::string(FMCW_SOURCE_DIR) + "/scenarios/close_pair.json";
    o.out_dir = fresh_dir("compare_close");
    for (const auto& r : compare_methods(o)) {
        if (r.method == DoaMethod::fft) {
            CHECK(r.resolved <= 1);
        } else {
            CHECK(r.resolved == 2);
        }
    }

    o.scenario_path = std::string(FMCW_SOURCE_DIR) + "/scenarios/single_target.json";
    o.out_dir = fresh_dir("compare_single");
    for (const auto& r : compare_methods(o)) {
        REQUIRE(r.abs_errors_deg.size() == 1);
        // Grid resolution: one FFT bin near 27 deg, 0.1 deg MUSIC, 1 deg CS.
        const double step = r.method == DoaMethod::fft ? 180 / oracle::kPi / 128 / std::cos(27 * oracle::kPi / 180)
                            : r.method == DoaMethod::music ? 0.1
                                                            : 1.0;
        CHECK(r.abs_errors_deg[0] <= step);
    }
}

TEST_CASE("helper outputs are added to an existing manifest") {
    const auto out = fresh_dir("record");
    run(small_run(out, {Stage::simulate}));
    record_outputs(out, {"extra.svg", "cube.bin"});
    const auto j = nlohmann::json::parse(oracle::read_file(out / "manifest.json"));
    CHECK(j["outputs"] == nlohmann::json::array({"cube.bin", "extra.svg"}));

    const auto empty = fresh_dir("record_none");
    record_outputs(empty, {"x"});
    CHECK_FALSE(fs::exists(empty / "manifest.json"));

    // compare.csv joins a run's manifest.
    auto o = small_run(out, {});
    compare_methods(o);
    const auto after = nlohmann::json::parse(oracle::read_file(out / "manifest.json"));
    CHECK(std::find(after["outputs"].begin(), after["outputs"].end(), "compare.csv") != after["outputs"].end());
}
