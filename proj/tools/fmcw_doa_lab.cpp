// fmcw-doa-lab: simulate an FMCW scene and run range-Doppler, CFAR and DOA
// stages, writing every intermediate product to an output directory.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fmcw/errors.hpp"
#include "fmcw/io.hpp"
#include "fmcw/pipeline.hpp"
#include "fmcw/scene.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kValidation = 3, kDependency = 4, kIo = 5 };

int plot_spectra(const fs::path& dir) {
    std::vector<std::string> written;
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("spectrum_", 0) == 0 && entry.path().extension() == ".csv") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    for (const auto& in : inputs) {
        const auto spectrum = fmcw::read_spectrum_csv(in);
        auto out = in;
        out.replace_extension(".svg");
        fmcw::write_text_file(out, fmcw::spectrum_to_svg(spectrum, std::string(fmcw::to_string(spectrum.method)) +
                                                                      " angle spectrum"));
        std::cout << out.string() << '\n';
        written.push_back(out.filename().string());
    }
    fmcw::record_outputs(dir, written);
    if (written.empty()) std::cerr << "no spectrum_*.csv files in " << dir << '\n';
    return kOk;
}

int validate_only(const fmcw::RunOptions& opts) {
    const auto text = fmcw::read_text_file(opts.scenario_path);
    auto overrides = opts.overrides;
    if (opts.seed) overrides.push_back("radar.rng_seed=" + std::to_string(*opts.seed));
    const auto scenario = fmcw::parse_scenario(text, overrides);
    const auto violations = fmcw::validate(scenario);
    for (const auto& v : violations) {
        std::cout << (v.severity == fmcw::Severity::error ? "error: " : "warning: ") << v.field << ": " << v.message << '\n';
    }
    const auto& r = scenario.radar;
    std::cout << "R_max = " << fmcw::format_number(r.max_range()) << " m, v_max = " << fmcw::format_number(r.max_velocity())
              << " m/s, range bin = " << fmcw::format_number(r.range_resolution())
              << " m, velocity bin = " << fmcw::format_number(r.velocity_resolution()) << " m/s\n";
    return fmcw::has_errors(violations) ? kValidation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMCW radar simulation, range-Doppler/CFAR detection and DOA estimation"};
    app.set_version_flag("--version", std::string(fmcw::kToolVersion));

    std::string command;
    std::string scenario_path, out_dir;
    std::vector<std::string> overrides;
    bool cluster = false;
    std::uint64_t seed = 0;

    std::string stage_help = "stage to run: all, compare, validate, plot, or one of";
    for (auto s : fmcw::all_stages()) stage_help += " " + std::string(fmcw::to_string(s));
    app.add_option("command", command, stage_help)->required();
    std::string scenario_pos, out_pos;
    app.add_option("scenario_file", scenario_pos, "scenario JSON (positional form of --scenario)");
    app.add_option("out_dir", out_pos, "output directory (positional form of --out)");
    app.add_option("--scenario", scenario_path, "scenario JSON file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--set", overrides, "override a scenario value, e.g. --set radar.snr_db=10")->take_all();
    app.add_flag("--cluster", cluster, "merge 8-connected CFAR detections in detections.csv");
    auto* seed_opt = app.add_option("--seed", seed, "noise RNG seed (replaces radar.rng_seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    if (scenario_path.empty()) scenario_path = scenario_pos;
    if (out_dir.empty()) out_dir = out_pos;

    fmcw::RunOptions opts;
    opts.scenario_path = scenario_path;
    opts.out_dir = out_dir;
    opts.overrides = overrides;
    opts.cluster = cluster;
    if (*seed_opt) opts.seed = seed;

    try {
        if (command == "plot") {
            if (out_dir.empty()) throw CLI::RequiredError("--out");
            return plot_spectra(out_dir);
        }
        if (scenario_path.empty()) throw CLI::RequiredError("--scenario");
        if (command == "validate") return validate_only(opts);
        if (out_dir.empty()) throw CLI::RequiredError("--out");

        if (command == "compare") {
            const auto reports = fmcw::compare_methods(opts);
            std::printf("%-6s %12s  %s\n", "method", "wall_s", "peaks_deg");
            for (const auto& r : reports) {
                std::string peaks;
                for (double a : r.peak_angles_deg) peaks += fmcw::format_number(a) + " ";
                std::printf("%-6s %12.6g  %s(resolved %d/%d)\n", std::string(fmcw::to_string(r.method)).c_str(),
                            r.wall_seconds, peaks.c_str(), r.resolved, r.n_truth);
            }
            return kOk;
        }

        if (command == "all") {
            opts.stages = fmcw::all_stages();
        } else if (auto stage = fmcw::parse_stage(command)) {
            opts.stages = {*stage};
        } else {
            std::cerr << "unknown command '" << command << "'\n";
            return kUsage;
        }
        const auto manifest = fmcw::run(opts);
        for (const auto& f : manifest.outputs) std::cout << (fs::path(manifest.out_dir) / f).string() << '\n';
        return kOk;
    } catch (const CLI::Error& e) {
        std::cerr << "error: missing option " << e.what() << '\n';
        return kUsage;
    } catch (const fmcw::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const fmcw::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        for (const auto& m : e.messages()) std::cerr << "  " << m << '\n';
        return kValidation;
    } catch (const fmcw::DependencyError& e) {
        std::cerr << "dependency error: " << e.what() << '\n';
        return kDependency;
    } catch (const fmcw::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    }
}
