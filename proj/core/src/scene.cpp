#include "fmcw/scene.hpp"

#include <cmath>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fmcw/errors.hpp"

namespace fmcw {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ParseError("unknown key '" + where + item.key() + "'");
        }
    }
}

const json& require_object(const json& parent, const char* key, const std::string& where) {
    auto it = parent.find(key);
    if (it == parent.end()) throw ParseError("missing required key '" + where + key + "'");
    if (!it->is_object()) throw ParseError("type mismatch: '" + where + key + "' must be an object");
    return *it;
}

double get_number(const json& obj, const char* key, const std::string& where, std::optional<double> fallback = {}) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw ParseError("missing required key '" + where + key + "'");
    }
    if (!it->is_number()) throw ParseError("type mismatch: '" + where + key + "' must be a number");
    return it->get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, const std::string& where,
                         std::optional<std::int64_t> fallback = {}) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        throw ParseError("missing required key '" + where + key + "'");
    }
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_float()) {
        const double v = it->get<double>();
        if (std::floor(v) == v && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
    }
    throw ParseError("type mismatch: '" + where + key + "' must be an integer");
}

int get_int(const json& obj, const char* key, const std::string& where, std::optional<int> fallback = {}) {
    const auto v = get_integer(obj, key, where, fallback ? std::optional<std::int64_t>(*fallback) : std::nullopt);
    if (v < INT32_MIN || v > INT32_MAX) throw ParseError("value out of range for '" + where + key + "'");
    return static_cast<int>(v);
}

RadarParams decode_radar(const json& j) {
    const std::string w = "radar.";
    reject_unknown_keys(j, w, {"fc", "B", "T", "n_samples", "n_chirps", "n_cpi", "snr_db", "rng_seed"});
    RadarParams r;
    r.fc = get_number(j, "fc", w);
    r.bandwidth = get_number(j, "B", w);
    r.chirp_period = get_number(j, "T", w);
    r.n_samples = get_int(j, "n_samples", w);
    r.n_chirps = get_int(j, "n_chirps", w);
    r.n_cpi = get_int(j, "n_cpi", w);
    if (auto it = j.find("snr_db"); it != j.end() && !it->is_null()) r.snr_db = get_number(j, "snr_db", w);
    if (auto it = j.find("rng_seed"); it != j.end()) {
        if (it->is_number_unsigned()) {
            r.rng_seed = it->get<std::uint64_t>();
        } else {
            const auto v = get_integer(j, "rng_seed", w);
            if (v < 0) throw ParseError("type mismatch: 'radar.rng_seed' must be a non-negative integer");
            r.rng_seed = static_cast<std::uint64_t>(v);
        }
    }
    return r;
}

ArrayGeometry decode_array(const json& j) {
    const std::string w = "array.";
    reject_unknown_keys(j, w, {"n_rx", "rx_spacing_wl", "tx_offset_wl"});
    ArrayGeometry a;
    a.n_rx = get_int(j, "n_rx", w);
    a.rx_spacing_wl = get_number(j, "rx_spacing_wl", w, a.rx_spacing_wl);
    a.tx_offset_wl = get_number(j, "tx_offset_wl", w, a.tx_offset_wl);
    return a;
}

Target decode_target(const json& j, std::size_t index) {
    const std::string w = "targets[" + std::to_string(index) + "].";
    if (!j.is_object()) throw ParseError("type mismatch: 'targets[" + std::to_string(index) + "]' must be an object");
    reject_unknown_keys(j, w, {"range_m", "vel_mps", "angle_deg", "amplitude"});
    Target t;
    t.range_m = get_number(j, "range_m", w);
    t.vel_mps = get_number(j, "vel_mps", w);
    t.angle_deg = get_number(j, "angle_deg", w);
    t.amplitude = get_number(j, "amplitude", w, 1.0);
    return t;
}

CfarConfig decode_cfar(const json& j) {
    const std::string w = "cfar.";
    reject_unknown_keys(j, w, {"guard_half", "train_half", "pfa", "edge_policy"});
    CfarConfig c;
    c.guard_half = get_int(j, "guard_half", w, c.guard_half);
    c.train_half = get_int(j, "train_half", w, c.train_half);
    c.pfa = get_number(j, "pfa", w, c.pfa);
    if (auto it = j.find("edge_policy"); it != j.end()) {
        if (!it->is_string()) throw ParseError("type mismatch: 'cfar.edge_policy' must be a string");
        if (it->get<std::string>() != "skip") throw ParseError("unsupported cfar.edge_policy '" + it->get<std::string>() + "'");
    }
    return c;
}

DoaConfig decode_doa(const json& j) {
    const std::string w = "doa.";
    reject_unknown_keys(j, w,
                        {"grid_min_deg", "grid_max_deg", "music_step_deg", "cs_step_deg", "range_angle_step_deg",
                         "fft_size", "num_sources", "cs_lambda_rel", "cs_max_iter", "cs_tol"});
    DoaConfig d;
    d.grid_min_deg = get_number(j, "grid_min_deg", w, d.grid_min_deg);
    d.grid_max_deg = get_number(j, "grid_max_deg", w, d.grid_max_deg);
    d.music_step_deg = get_number(j, "music_step_deg", w, d.music_step_deg);
    d.cs_step_deg = get_number(j, "cs_step_deg", w, d.cs_step_deg);
    d.range_angle_step_deg = get_number(j, "range_angle_step_deg", w, d.range_angle_step_deg);
    d.fft_size = get_int(j, "fft_size", w, d.fft_size);
    if (auto it = j.find("num_sources"); it != j.end() && !it->is_null()) d.num_sources = get_int(j, "num_sources", w);
    d.cs_lambda_rel = get_number(j, "cs_lambda_rel", w, d.cs_lambda_rel);
    d.cs_max_iter = get_int(j, "cs_max_iter", w, d.cs_max_iter);
    d.cs_tol = get_number(j, "cs_tol", w, d.cs_tol);
    return d;
}

ProcessingConfig decode_processing(const json& j) {
    reject_unknown_keys(j, "processing.", {"window"});
    ProcessingConfig p;
    if (auto it = j.find("window"); it != j.end()) {
        if (!it->is_string()) throw ParseError("type mismatch: 'processing.window' must be a string");
        const auto name = it->get<std::string>();
        if (name == "rect") p.window = Window::rect;
        else if (name == "hann") p.window = Window::hann;
        else throw ParseError("unsupported processing.window '" + name + "'");
    }
    return p;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("malformed override '" + assignment + "' (expected key=value)");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ParseError("malformed override path '" + path + "'");
        const bool last = dot == std::string::npos;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (const std::exception&) {
                throw ParseError("override path '" + path + "' indexes an array with '" + part + "'");
            }
            if (idx >= node->size()) throw ParseError("override path '" + path + "' index out of range");
            node = &(*node)[idx];
        } else {
            // Missing intermediate sections are created on the way down.
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ParseError("override path '" + path + "' descends into a scalar");
            node = &(*node)[part];
        }
        if (last) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("syntax error: ") + e.what(), e.byte);
    }
    if (!doc.is_object()) throw ParseError("scenario document must be a JSON object");
    for (const auto& o : overrides) apply_override(doc, o);

    reject_unknown_keys(doc, "", {"radar", "array", "targets", "cfar", "doa", "processing"});

    Scenario s;
    s.radar = decode_radar(require_object(doc, "radar", ""));
    s.array = decode_array(require_object(doc, "array", ""));

    auto tg = doc.find("targets");
    if (tg == doc.end() || tg->is_null()) throw ParseError("missing targets");
    if (!tg->is_array()) throw ParseError("type mismatch: 'targets' must be an array");
    if (tg->empty()) throw ParseError("missing targets");
    for (std::size_t i = 0; i < tg->size(); ++i) s.targets.push_back(decode_target((*tg)[i], i));

    if (doc.contains("cfar")) s.cfar = decode_cfar(require_object(doc, "cfar", ""));
    if (doc.contains("doa")) s.doa = decode_doa(require_object(doc, "doa", ""));
    if (doc.contains("processing")) s.processing = decode_processing(require_object(doc, "processing", ""));
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    json doc;
    json radar = {{"fc", s.radar.fc},
                  {"B", s.radar.bandwidth},
                  {"T", s.radar.chirp_period},
                  {"n_samples", s.radar.n_samples},
                  {"n_chirps", s.radar.n_chirps},
                  {"n_cpi", s.radar.n_cpi},
                  {"rng_seed", s.radar.rng_seed}};
    if (s.radar.snr_db) radar["snr_db"] = *s.radar.snr_db;
    doc["radar"] = radar;
    doc["array"] = {{"n_rx", s.array.n_rx}, {"rx_spacing_wl", s.array.rx_spacing_wl}, {"tx_offset_wl", s.array.tx_offset_wl}};
    json targets = json::array();
    for (const auto& t : s.targets) {
        targets.push_back({{"range_m", t.range_m}, {"vel_mps", t.vel_mps}, {"angle_deg", t.angle_deg}, {"amplitude", t.amplitude}});
    }
    doc["targets"] = targets;
    doc["cfar"] = {{"guard_half", s.cfar.guard_half},
                   {"train_half", s.cfar.train_half},
                   {"pfa", s.cfar.pfa},
                   {"edge_policy", "skip"}};
    json doa = {{"grid_min_deg", s.doa.grid_min_deg},
                {"grid_max_deg", s.doa.grid_max_deg},
                {"music_step_deg", s.doa.music_step_deg},
                {"cs_step_deg", s.doa.cs_step_deg},
                {"range_angle_step_deg", s.doa.range_angle_step_deg},
                {"fft_size", s.doa.fft_size},
                {"cs_lambda_rel", s.doa.cs_lambda_rel},
                {"cs_max_iter", s.doa.cs_max_iter},
                {"cs_tol", s.doa.cs_tol}};
    if (s.doa.num_sources) doa["num_sources"] = *s.doa.num_sources;
    doc["doa"] = doa;
    doc["processing"] = {{"window", std::string(to_string(s.processing.window))}};
    return doc.dump(2);
}

std::string_view to_string(Window w) {
    switch (w) {
        case Window::rect: return "rect";
        case Window::hann: return "hann";
    }
    return "rect";
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::vector<Violation> validate(const Scenario& s) {
    std::vector<Violation> out;
    auto error = [&](std::string field, std::string msg, std::optional<double> bound = {}) {
        out.push_back({std::move(field), std::move(msg), bound, Severity::error});
    };

    const auto& r = s.radar;
    if (!(r.fc > 0) || !std::isfinite(r.fc)) error("radar.fc", "carrier frequency must be positive", 0.0);
    if (!(r.bandwidth > 0) || !std::isfinite(r.bandwidth)) error("radar.B", "bandwidth must be positive", 0.0);
    if (!(r.chirp_period > 0) || !std::isfinite(r.chirp_period)) error("radar.T", "chirp period must be positive", 0.0);
    if (r.n_samples < 2 || !is_power_of_two(r.n_samples)) error("radar.n_samples", "must be a power of two >= 2", 2.0);
    if (r.n_chirps < 2 || !is_power_of_two(r.n_chirps)) error("radar.n_chirps", "must be a power of two >= 2", 2.0);
    if (r.n_cpi < 1) error("radar.n_cpi", "must be >= 1", 1.0);
    if (r.snr_db && !std::isfinite(*r.snr_db)) error("radar.snr_db", "must be finite");

    const auto& a = s.array;
    if (a.n_rx < 2) error("array.n_rx", "need at least two receivers", 2.0);
    if (!(a.rx_spacing_wl > 0) || !std::isfinite(a.rx_spacing_wl)) {
        error("array.rx_spacing_wl", "spacing must be positive", 0.0);
    } else if (a.rx_spacing_wl > 0.5) {
        out.push_back({"array.rx_spacing_wl", "spacing above half a wavelength makes DOA ambiguous over +/-90 deg", 0.5,
                       Severity::warning});
    }
    if (!std::isfinite(a.tx_offset_wl)) error("array.tx_offset_wl", "must be finite");

    if (s.targets.empty()) error("targets", "missing targets");

    const bool radar_ok = !has_errors(out);
    const double r_max = radar_ok ? r.max_range() : 0.0;
    const double v_max = radar_ok ? r.max_velocity() : 0.0;
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
        const auto& t = s.targets[i];
        const std::string w = "targets[" + std::to_string(i) + "].";
        if (radar_ok) {
            if (!(t.range_m > 0 && t.range_m < r_max)) {
                error(w + "range_m", "range " + fmt(t.range_m) + " m outside (0, R_max = " + fmt(r_max) + " m)", r_max);
            }
            if (!(std::abs(t.vel_mps) < v_max)) {
                error(w + "vel_mps", "|velocity| " + fmt(std::abs(t.vel_mps)) + " m/s not below v_max = " + fmt(v_max) + " m/s",
                      v_max);
            }
        }
        if (!(t.angle_deg > -90.0 && t.angle_deg < 90.0)) error(w + "angle_deg", "angle must lie in (-90, 90) deg", 90.0);
        if (!(t.amplitude >= 0) || !std::isfinite(t.amplitude)) error(w + "amplitude", "amplitude must be finite and >= 0", 0.0);
    }

    const auto& c = s.cfar;
    if (!(c.guard_half >= 0)) error("cfar.guard_half", "must be >= 0", 0.0);
    if (!(c.train_half > c.guard_half)) error("cfar.train_half", "must exceed guard_half", double(c.guard_half));
    if (!(c.pfa > 0 && c.pfa < 1)) error("cfar.pfa", "must lie in (0, 1)");

    const auto& d = s.doa;
    if (!(d.grid_min_deg >= -90 && d.grid_max_deg <= 90 && d.grid_min_deg < d.grid_max_deg)) {
        error("doa.grid_min_deg", "angle grid must satisfy -90 <= min < max <= 90");
    }
    if (!(d.music_step_deg > 0)) error("doa.music_step_deg", "must be positive", 0.0);
    if (!(d.cs_step_deg > 0)) error("doa.cs_step_deg", "must be positive", 0.0);
    if (!(d.range_angle_step_deg > 0)) error("doa.range_angle_step_deg", "must be positive", 0.0);
    if (!is_power_of_two(d.fft_size) || d.fft_size < a.n_rx) error("doa.fft_size", "must be a power of two >= n_rx", a.n_rx);
    if (d.num_sources && (*d.num_sources < 1 || *d.num_sources >= a.n_rx)) {
        error("doa.num_sources", "must satisfy 1 <= D < n_rx", a.n_rx);
    }
    if (!(d.cs_lambda_rel > 0)) error("doa.cs_lambda_rel", "must be positive", 0.0);
    if (d.cs_max_iter < 1) error("doa.cs_max_iter", "must be >= 1", 1.0);
    if (!(d.cs_tol >= 0)) error("doa.cs_tol", "must be >= 0", 0.0);
    return out;
}

bool has_errors(const std::vector<Violation>& violations) {
    for (const auto& v : violations) {
        if (v.severity == Severity::error) return true;
    }
    return false;
}

void require_valid(const Scenario& scenario) {
    const auto violations = validate(scenario);
    if (!has_errors(violations)) return;
    std::vector<std::string> msgs;
    for (const auto& v : violations) {
        if (v.severity == Severity::error) msgs.push_back(v.field + ": " + v.message);
    }
    throw ValidationError("scenario failed validation (" + std::to_string(msgs.size()) + " violations)", std::move(msgs));
}

}  // namespace fmcw
