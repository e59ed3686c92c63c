#include "fmcw/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "fmcw/errors.hpp"
#include "fmcw/io.hpp"
#include "fmcw/synth.hpp"

namespace fmcw {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr const char* kCubeFile = "cube.bin";
constexpr const char* kDetectionsFile = "detections.csv";

std::string rd_name(int cpi, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rdmap_cpi%02d.%s", cpi, ext);
    return buf;
}

std::vector<double> distinct_truth_angles(const Scenario& s) {
    std::vector<double> out;
    for (const auto& t : s.targets) {
        if (std::none_of(out.begin(), out.end(), [&](double a) { return a == t.angle_deg; })) out.push_back(t.angle_deg);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::simulate: return "simulate";
        case Stage::rdmap: return "rdmap";
        case Stage::detect: return "detect";
        case Stage::doa_fft: return "doa-fft";
        case Stage::doa_music: return "doa-music";
        case Stage::doa_cs: return "doa-cs";
        case Stage::range_angle: return "range-angle";
    }
    return "simulate";
}

std::optional<Stage> parse_stage(std::string_view name) {
    for (auto s : all_stages()) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::vector<Stage> all_stages() {
    return {Stage::simulate, Stage::rdmap,  Stage::detect,     Stage::doa_fft,
            Stage::doa_music, Stage::doa_cs, Stage::range_angle};
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool_version"] = m.tool_version;
    j["scenario_path"] = m.scenario_path;
    j["scenario_hash"] = m.scenario_hash;
    j["out_dir"] = m.out_dir;
    j["stages"] = m.stages;
    j["outputs"] = m.outputs;
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [stage, secs] : m.timings) t[stage] = secs;
    j["timings_s"] = t;
    return j.dump(2) + "\n";
}

Scenario load_scenario(const RunOptions& options) {
    const std::string text = read_text_file(options.scenario_path);
    auto overrides = options.overrides;
    if (options.seed) overrides.push_back("radar.rng_seed=" + std::to_string(*options.seed));
    Scenario s = parse_scenario(text, overrides);
    require_valid(s);
    return s;
}

void record_outputs(const std::filesystem::path& out_dir, const std::vector<std::string>& names) {
    const auto path = out_dir / "manifest.json";
    if (!std::filesystem::exists(path)) return;
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("'" + path.string() + "' is not a manifest: " + e.what());
    }
    auto& outputs = j["outputs"];
    for (const auto& n : names) {
        if (std::find(outputs.begin(), outputs.end(), n) == outputs.end()) outputs.push_back(n);
    }
    write_text_file(path, j.dump(2) + "\n");
}

DoaInputs gather_doa_inputs(const ComplexCube& profile, const ComplexCube& rd,
                            const std::vector<Detection>& detections, const Scenario& scenario) {
    const auto clusters = cluster_detections(detections);
    DoaInputs in;

    // Snapshots come from one CPI only: the one with the most clusters,
    // earliest on ties.
    std::map<int, int> per_cpi;
    for (const auto& d : clusters) ++per_cpi[d.cpi_index];
    int best = 0;
    for (const auto& [cpi, n] : per_cpi) {
        if (n > best) {
            best = n;
            in.cpi_index = cpi;
        }
    }

    std::vector<SnapshotSet> chirp_sets, cell_sets;
    std::set<int> seen_bins;
    for (const auto& d : clusters) {
        if (d.cpi_index != in.cpi_index) continue;
        cell_sets.push_back(extract_cell_snapshot(rd, d));
        // Doppler-separated clusters in one range bin share their chirp snapshots.
        if (seen_bins.insert(d.range_bin).second) chirp_sets.push_back(extract_snapshots(profile, d));
    }
    in.chirp_snapshots = concat(chirp_sets);
    in.cell_snapshots = concat(cell_sets);
    if (in.chirp_snapshots.size() == 0) {
        in.chirp_snapshots.snapshots.resize(scenario.array.n_rx, 0);
        in.cell_snapshots.snapshots.resize(scenario.array.n_rx, 0);
    }
    in.chirp_snapshots.cpi_index = in.cell_snapshots.cpi_index = in.cpi_index;

    const int d = scenario.doa.num_sources.value_or(std::max(best, 1));
    in.num_sources = std::clamp(d, 1, scenario.array.n_rx - 1);
    return in;
}

namespace {

AngleSpectrum empty_spectrum(DoaMethod method, std::vector<double> grid) {
    AngleSpectrum s;
    s.method = method;
    s.power.assign(grid.size(), 0.0);
    s.angles_deg = std::move(grid);
    return s;
}

}  // namespace

AngleSpectrum estimate_fft(const DoaInputs& in, const Scenario& scenario) {
    return fft_angle_spectrum(in.cell_snapshots, scenario.doa.fft_size, scenario.array,
                              static_cast<std::size_t>(in.num_sources));
}

AngleSpectrum estimate_music(const DoaInputs& in, const Scenario& scenario) {
    const auto grid = make_angle_grid(scenario.doa.grid_min_deg, scenario.doa.grid_max_deg, scenario.doa.music_step_deg);
    if (in.chirp_snapshots.size() == 0) return empty_spectrum(DoaMethod::music, grid);
    return music_pseudospectrum(covariance(in.chirp_snapshots), in.num_sources, grid, scenario.array);
}

AngleSpectrum estimate_cs(const DoaInputs& in, const Scenario& scenario) {
    const auto grid = make_angle_grid(scenario.doa.grid_min_deg, scenario.doa.grid_max_deg, scenario.doa.cs_step_deg);
    const auto dict = build_dictionary(grid, scenario.array);
    return cs_angle_spectrum(in.chirp_snapshots, dict,
                             {scenario.doa.cs_lambda_rel, scenario.doa.cs_max_iter, scenario.doa.cs_tol},
                             static_cast<std::size_t>(in.num_sources));
}

double resolution_tolerance(const std::vector<double>& truth_deg) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < truth_deg.size(); ++i) {
        for (std::size_t j = i + 1; j < truth_deg.size(); ++j) {
            const double d = std::abs(truth_deg[i] - truth_deg[j]);
            if (d > 0) sep = std::min(sep, d);
        }
    }
    return std::min(3.0, sep / 2.0);
}

int resolved_count(const std::vector<SpectrumPeak>& peaks, const std::vector<double>& truth_deg, double tol) {
    // Greedy one-to-one matching on the closest (peak, truth) pairs.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t p = 0; p < peaks.size(); ++p) {
        for (std::size_t t = 0; t < truth_deg.size(); ++t) {
            const double d = std::abs(peaks[p].angle_deg - truth_deg[t]);
            if (d <= tol) pairs.emplace_back(d, p, t);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> peak_used(peaks.size()), truth_used(truth_deg.size());
    int matched = 0;
    for (const auto& [d, p, t] : pairs) {
        if (peak_used[p] || truth_used[t]) continue;
        peak_used[p] = truth_used[t] = true;
        ++matched;
    }
    return matched;
}

namespace {

struct Products {
    Scenario scenario;
    std::optional<DataCube> cube;
    std::optional<RangeProfile> profile;
    std::optional<RangeDopplerResult> rd;
    std::optional<std::vector<Detection>> detections;
};

RangeDopplerOptions rd_options(const Scenario& s) { return {s.processing.window, 1, 1}; }

void ensure_cube(Products& p, const std::filesystem::path& out_dir) {
    if (p.cube) return;
    const auto path = out_dir / kCubeFile;
    if (!std::filesystem::exists(path)) {
        throw DependencyError("stage needs a simulated cube but '" + path.string() + "' does not exist; run 'simulate' first");
    }
    p.cube = cube_from_file(read_cube_file(path), p.scenario);
}

void ensure_spectra(Products& p, const std::filesystem::path& out_dir) {
    ensure_cube(p, out_dir);
    if (!p.profile) p.profile = range_profile(*p.cube, p.scenario.processing.window);
    if (!p.rd) p.rd = doppler_process(*p.profile, p.scenario.radar, rd_options(p.scenario));
}

std::vector<Detection> detect_all(const RangeDopplerResult& rd, const CfarConfig& cfg) {
    std::vector<Detection> all;
    for (const auto& map : rd.maps) {
        auto d = ca_cfar_2d(map, cfg);
        all.insert(all.end(), d.begin(), d.end());
    }
    return all;
}

void ensure_detections(Products& p, const std::filesystem::path& out_dir) {
    if (p.detections) return;
    const auto path = out_dir / kDetectionsFile;
    if (!std::filesystem::exists(path)) {
        throw DependencyError("stage needs detections but '" + path.string() + "' does not exist; run 'detect' first");
    }
    p.detections = read_detections_csv(path);
}

}  // namespace

RunManifest run(const RunOptions& options) {
    const std::string scenario_text = read_text_file(options.scenario_path);
    Products p;
    p.scenario = load_scenario(options);

    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec || !std::filesystem::is_directory(options.out_dir)) {
        throw IoError("cannot create output directory '" + options.out_dir.string() + "'");
    }

    auto stages = options.stages;
    std::sort(stages.begin(), stages.end());
    stages.erase(std::unique(stages.begin(), stages.end()), stages.end());

    RunManifest m;
    m.scenario_path = options.scenario_path.string();
    m.scenario_hash = content_hash(scenario_text);
    m.out_dir = options.out_dir.string();
    const auto& out = options.out_dir;
    auto emit = [&](const std::string& name) { m.outputs.push_back(name); };

    for (Stage stage : stages) {
        const auto start = Clock::now();
        m.stages.emplace_back(to_string(stage));
        switch (stage) {
            case Stage::simulate: {
                DataCube cube = synthesize(p.scenario);
                // Downstream stages see exactly what a cached cube file would give them.
                quantize_to_float(cube);
                write_cube_file(out / kCubeFile, cube);
                emit(kCubeFile);
                p.cube = std::move(cube);
                p.profile.reset();
                p.rd.reset();
                break;
            }
            case Stage::rdmap: {
                ensure_spectra(p, out);
                for (const auto& map : p.rd->maps) {
                    write_range_doppler_csv(out / rd_name(map.cpi_index, "csv"), map);
                    write_pgm(out / rd_name(map.cpi_index, "pgm"), map.power);
                    emit(rd_name(map.cpi_index, "csv"));
                    emit(rd_name(map.cpi_index, "pgm"));
                }
                break;
            }
            case Stage::detect: {
                ensure_spectra(p, out);
                auto dets = detect_all(*p.rd, p.scenario.cfar);
                write_detections_csv(out / kDetectionsFile, options.cluster ? cluster_detections(dets) : dets);
                emit(kDetectionsFile);
                p.detections = std::move(dets);
                break;
            }
            case Stage::doa_fft:
            case Stage::doa_music:
            case Stage::doa_cs: {
                ensure_detections(p, out);
                ensure_spectra(p, out);
                const auto in = gather_doa_inputs(p.profile->data, p.rd->rd, *p.detections, p.scenario);
                const auto spectrum = stage == Stage::doa_fft     ? estimate_fft(in, p.scenario)
                                      : stage == Stage::doa_music ? estimate_music(in, p.scenario)
                                                                  : estimate_cs(in, p.scenario);
                const std::string name = "spectrum_" + std::string(to_string(spectrum.method)) + ".csv";
                write_spectrum_csv(out / name, spectrum);
                emit(name);
                break;
            }
            case Stage::range_angle: {
                ensure_spectra(p, out);
                const auto& doa = p.scenario.doa;
                const auto grid = make_angle_grid(doa.grid_min_deg, doa.grid_max_deg, doa.range_angle_step_deg);
                const int d = std::clamp(doa.num_sources.value_or(1), 1, p.scenario.array.n_rx - 1);
                const auto map = range_angle_map(p.profile->data, 0, d, grid, p.scenario.array);
                write_range_angle_csv(out / "range_angle.csv", map, p.profile->range_axis, grid, 0);
                write_pgm(out / "range_angle.pgm", map);
                emit("range_angle.csv");
                emit("range_angle.pgm");
                break;
            }
        }
        m.timings.emplace_back(to_string(stage), seconds_since(start));
    }

    write_text_file(out / "manifest.json", manifest_to_json(m));
    return m;
}

std::vector<MethodReport> compare_methods(const RunOptions& options) {
    const Scenario scenario = load_scenario(options);
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec || !std::filesystem::is_directory(options.out_dir)) {
        throw IoError("cannot create output directory '" + options.out_dir.string() + "'");
    }

    DataCube cube = synthesize(scenario);
    quantize_to_float(cube);
    const auto profile = range_profile(cube, scenario.processing.window);
    const auto rd = doppler_process(profile, scenario.radar, rd_options(scenario));
    const auto dets = detect_all(rd, scenario.cfar);
    const auto in = gather_doa_inputs(profile.data, rd.rd, dets, scenario);
    const auto truth = distinct_truth_angles(scenario);
    const double tol = resolution_tolerance(truth);

    using Estimator = AngleSpectrum (*)(const DoaInputs&, const Scenario&);
    const std::pair<DoaMethod, Estimator> methods[] = {
        {DoaMethod::fft, &estimate_fft}, {DoaMethod::music, &estimate_music}, {DoaMethod::cs, &estimate_cs}};

    std::vector<MethodReport> reports;
    for (const auto& [method, estimate] : methods) {
        // Best of several repetitions, at least 5 and at least ~20 ms of work.
        double best = std::numeric_limits<double>::infinity();
        double total = 0.0;
        AngleSpectrum spectrum;
        for (int rep = 0; rep < 5 || (total < 0.02 && rep < 1000); ++rep) {
            const auto start = Clock::now();
            spectrum = estimate(in, scenario);
            const double dt = seconds_since(start);
            best = std::min(best, dt);
            total += dt;
        }
        MethodReport r;
        r.method = method;
        r.wall_seconds = best;
        r.n_truth = static_cast<int>(truth.size());
        for (const auto& pk : spectrum.peaks) r.peak_angles_deg.push_back(pk.angle_deg);
        for (double t : truth) {
            double err = std::numeric_limits<double>::infinity();
            for (double a : r.peak_angles_deg) err = std::min(err, std::abs(a - t));
            r.abs_errors_deg.push_back(err);
        }
        r.resolved = resolved_count(spectrum.peaks, truth, tol);
        reports.push_back(std::move(r));
    }
    std::stable_sort(reports.begin(), reports.end(),
                     [](const MethodReport& a, const MethodReport& b) { return a.wall_seconds < b.wall_seconds; });

    std::string csv = "method,wall_seconds,peak_angles_deg,abs_errors_deg,resolved,n_truth\n";
    auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ';';
            s += format_number(v[i]);
        }
        return s;
    };
    for (const auto& r : reports) {
        csv += std::string(to_string(r.method)) + ',' + format_number(r.wall_seconds) + ',' + join(r.peak_angles_deg) + ',' +
               join(r.abs_errors_deg) + ',' + std::to_string(r.resolved) + ',' + std::to_string(r.n_truth) + '\n';
    }
    write_text_file(options.out_dir / "compare.csv", csv);
    record_outputs(options.out_dir, {"compare.csv"});
    return reports;
}

}  // namespace fmcw
