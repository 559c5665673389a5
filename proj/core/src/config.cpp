// SPDX-License-Identifier: Apache-2.0
//
// p6d: passive 6DMA-assisted multiuser uplink simulator
// Copyright (C) 2026 The p6d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "p6d/config.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace p6d {

namespace {

using json = nlohmann::json;

// Maps JSON pointers to the 1-based line where the key (or array element)
// appears. Runs over text that nlohmann already accepted.
class LineIndex {
public:
    explicit LineIndex(std::string_view text) { scan(text); }

    int line(const std::string& pointer) const {
        std::string p = pointer;
        while (true) {
            if (auto it = lines_.find(p); it != lines_.end()) return it->second;
            if (p.empty()) return 1;
            p.erase(p.rfind('/'));
        }
    }

private:
    struct Frame {
        bool object = false;
        bool expect_key = true;
        std::string key;
        int index = 0;
        std::string base;
    };

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }

    std::string value_pointer(const std::vector<Frame>& stack) const {
        if (stack.empty()) return "";
        const Frame& f = stack.back();
        return f.base + "/" + (f.object ? escape(f.key) : std::to_string(f.index));
    }

    void scan(std::string_view text) {
        std::vector<Frame> stack;
        int line = 1;
        std::size_t i = 0;
        auto record = [&](const std::string& ptr) { lines_.emplace(ptr, line); };
        while (i < text.size()) {
            const char c = text[i];
            if (c == '\n') {
                ++line;
                ++i;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == ':') {
                ++i;
            } else if (c == '{' || c == '[') {
                const std::string ptr = value_pointer(stack);
                record(ptr);
                Frame f;
                f.object = c == '{';
                f.base = ptr;
                stack.push_back(f);
                ++i;
            } else if (c == '}' || c == ']') {
                if (!stack.empty()) stack.pop_back();
                ++i;
            } else if (c == ',') {
                if (!stack.empty()) {
                    if (stack.back().object) stack.back().expect_key = true;
                    else ++stack.back().index;
                }
                ++i;
            } else if (c == '"') {
                std::string s;
                ++i;
                while (i < text.size() && text[i] != '"') {
                    if (text[i] == '\\' && i + 1 < text.size()) {
                        s += text[i + 1]; // escapes only need to keep keys distinct
                        i += 2;
                    } else {
                        s += text[i++];
                    }
                }
                ++i;
                if (!stack.empty() && stack.back().object && stack.back().expect_key) {
                    stack.back().key = s;
                    stack.back().expect_key = false;
                }
                record(value_pointer(stack));
            } else {
                record(value_pointer(stack));
                while (i < text.size() && std::string_view(",]}\n \t\r").find(text[i]) == std::string_view::npos) ++i;
            }
        }
    }

    std::map<std::string, int> lines_;
};

// Typed access to one JSON object with location-aware errors.
class Section {
public:
    Section(const json& node, std::string pointer, const LineIndex& lines)
        : node_(node), pointer_(std::move(pointer)), lines_(lines) {
        if (!node_.is_object()) fail(pointer_, "expected an object");
    }

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
        throw ConfigError((ptr.empty() ? std::string("<root>") : ptr) + ": " + msg, lines_.line(ptr));
    }

    std::string at(const std::string& key) const { return pointer_ + "/" + key; }
    bool has(const std::string& key) const { return node_.contains(key); }
    const json& raw(const std::string& key) const { return node_.at(key); }

    void allow_only(std::initializer_list<const char*> keys) const {
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, _] : node_.items())
            if (!allowed.count(k)) fail(at(k), "unknown key '" + k + "'");
    }

    Section child(const std::string& key) const { return Section(node_.at(key), at(key), lines_); }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        return v.get<double>();
    }

    double positive(const std::string& key, double fallback) const {
        const double v = number(key, fallback);
        if (!(v > 0.0)) fail(at(key), "must be positive");
        return v;
    }

    int integer(const std::string& key, int fallback, int min_value) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        const auto i = v.get<long long>();
        if (i < min_value) fail(at(key), "must be at least " + std::to_string(min_value));
        if (i > 1000000) fail(at(key), "unreasonably large");
        return static_cast<int>(i);
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) fail(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_string()) fail(at(key), "expected a string");
        return v.get<std::string>();
    }

    AngleRange range(const std::string& key, AngleRange fallback) const {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            fail(at(key), "expected [lo, hi]");
        AngleRange r{v[0].get<double>(), v[1].get<double>()};
        if (r.lo > r.hi) fail(at(key), "lo must not exceed hi");
        return r;
    }

    const json& node() const { return node_; }
    const std::string& pointer() const { return pointer_; }

private:
    const json& node_;
    std::string pointer_;
    const LineIndex& lines_;
};

void read_scenario(const Section& s, ScenarioParams& p) {
    s.allow_only({"bs_antennas", "users", "wavelength_m", "paths_per_user", "bs_paths", "los_variance",
                  "nlos_variance", "bs_los_variance", "bs_nlos_variance", "noise_power_dbm", "d_min_m",
                  "site_region", "user_elevation_rad", "user_azimuth_rad", "bs_arrival_rad", "bs_elevation_rad",
                  "bs_azimuth_rad"});
    p.bs_antennas = s.integer("bs_antennas", p.bs_antennas, 1);
    p.users = s.integer("users", p.users, 1);
    p.wavelength = s.positive("wavelength_m", p.wavelength);
    p.paths_per_user = s.integer("paths_per_user", p.paths_per_user, 1);
    p.bs_paths = s.integer("bs_paths", p.bs_paths, 1);
    p.los_variance = s.positive("los_variance", p.los_variance);
    p.nlos_variance = s.positive("nlos_variance", p.nlos_variance);
    p.bs_los_variance = s.positive("bs_los_variance", p.bs_los_variance);
    p.bs_nlos_variance = s.positive("bs_nlos_variance", p.bs_nlos_variance);
    p.noise_dbm = s.number("noise_power_dbm", p.noise_dbm);
    if (s.has("d_min_m")) {
        const double d = s.number("d_min_m", 0.0);
        if (d < 0.0) s.fail(s.at("d_min_m"), "must be non-negative");
        p.d_min = d;
    }
    p.user_elevation = s.range("user_elevation_rad", p.user_elevation);
    p.user_azimuth = s.range("user_azimuth_rad", p.user_azimuth);
    p.bs_arrival = s.range("bs_arrival_rad", p.bs_arrival);
    p.bs_elevation = s.range("bs_elevation_rad", p.bs_elevation);
    p.bs_azimuth = s.range("bs_azimuth_rad", p.bs_azimuth);
    if (s.has("site_region")) {
        const Section r = s.child("site_region");
        r.allow_only({"center_m", "side_m"});
        if (r.has("center_m")) {
            const json& c = r.raw("center_m");
            if (!c.is_array() || c.size() != 3 || !c[0].is_number() || !c[1].is_number() || !c[2].is_number())
                r.fail(r.at("center_m"), "expected [x, y, z]");
            p.region.center = Vec3(c[0].get<double>(), c[1].get<double>(), c[2].get<double>());
        }
        p.region.side = r.positive("side_m", p.region.side);
    }
}

void read_optimizer(const Section& s, OptimizerConfig& o) {
    s.allow_only({"outer_iterations", "inner_iterations", "tolerance_bps_hz", "early_stop", "armijo",
                  "position_xi_wavelengths", "rotation_xi_rad", "position_box_m", "rotation_box_rad",
                  "literal_distance_row"});
    o.outer_iterations = s.integer("outer_iterations", o.outer_iterations, 0);
    o.inner_iterations = s.integer("inner_iterations", o.inner_iterations, 1);
    o.tolerance = s.number("tolerance_bps_hz", o.tolerance);
    if (o.tolerance < 0.0) s.fail(s.at("tolerance_bps_hz"), "must be non-negative");
    o.early_stop = s.boolean("early_stop", o.early_stop);
    o.position_xi_wavelengths = s.positive("position_xi_wavelengths", o.position_xi_wavelengths);
    o.rotation_xi = s.positive("rotation_xi_rad", o.rotation_xi);
    o.position_box = s.positive("position_box_m", o.position_box);
    o.rotation_box = s.positive("rotation_box_rad", o.rotation_box);
    o.literal_distance_row = s.boolean("literal_distance_row", o.literal_distance_row);
    if (s.has("armijo")) {
        const Section a = s.child("armijo");
        a.allow_only({"c1", "backtrack", "max_backtracks", "initial_step"});
        o.step.sufficient_decrease = a.number("c1", o.step.sufficient_decrease);
        if (!(o.step.sufficient_decrease > 0.0 && o.step.sufficient_decrease < 1.0)) a.fail(a.at("c1"), "must lie in (0, 1)");
        o.step.backtrack = a.number("backtrack", o.step.backtrack);
        if (!(o.step.backtrack > 0.0 && o.step.backtrack < 1.0)) a.fail(a.at("backtrack"), "must lie in (0, 1)");
        o.step.max_backtracks = a.integer("max_backtracks", o.step.max_backtracks, 0);
        o.step.initial_step = a.number("initial_step", o.step.initial_step);
        if (!(o.step.initial_step > 0.0 && o.step.initial_step <= 1.0)) a.fail(a.at("initial_step"), "must lie in (0, 1]");
    }
}

} // namespace

void ExperimentConfig::validate() const {
    scenario.validate();
    optimizer.validate();
    if (schemes.empty()) throw ConfigError("scheme list must not be empty");
    if (patterns.empty()) throw ConfigError("pattern list must not be empty");
    if (powers_dbm.empty()) throw ConfigError("power sweep must not be empty");
    if (seeds.empty()) throw ConfigError("seed list must not be empty");
    const int budget = schemes.front().total_elements();
    for (const auto& s : schemes) {
        if (s.surfaces < 1 || s.elements_x < 1 || s.elements_y < 1) throw ConfigError("scheme sizes must be positive");
        if (s.scheme != Scheme::distributed && s.surfaces != 1)
            throw ConfigError(std::string(to_string(s.scheme)) + " uses exactly one surface");
        if (s.total_elements() != budget)
            throw ConfigError("all schemes must share the same total number of reflecting elements");
    }
}

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        int line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte ? e.byte - 1 : 0, json_text.size()); ++i)
            if (json_text[i] == '\n') ++line;
        throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
    }
    const LineIndex lines(json_text);
    const Section top(root, "", lines);
    top.allow_only({"schema_version", "scenario", "optimizer", "schemes", "patterns", "powers_dbm", "seeds",
                    "init_facing", "warm_start", "output_dir"});

    if (!top.has("schema_version")) top.fail("", "missing schema_version");
    if (top.integer("schema_version", 0, 0) != kConfigSchemaVersion)
        top.fail("/schema_version", "unsupported schema version (expected " + std::to_string(kConfigSchemaVersion) + ")");

    ExperimentConfig cfg;
    if (top.has("scenario")) read_scenario(top.child("scenario"), cfg.scenario);
    if (top.has("optimizer")) read_optimizer(top.child("optimizer"), cfg.optimizer);

    for (const char* key : {"schemes", "patterns", "powers_dbm", "seeds"})
        if (!top.has(key)) top.fail("", std::string("missing required key '") + key + "'");

    const json& schemes = top.raw("schemes");
    if (!schemes.is_array() || schemes.empty()) top.fail("/schemes", "expected a non-empty array");
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const Section s(schemes[i], "/schemes/" + std::to_string(i), lines);
        s.allow_only({"name", "surfaces", "elements_x", "elements_y"});
        SchemeSpec spec;
        try {
            spec.scheme = scheme_from_string(s.string("name", ""));
        } catch (const std::invalid_argument& e) {
            s.fail(s.at("name"), e.what());
        }
        spec.surfaces = s.integer("surfaces", spec.scheme == Scheme::distributed ? 4 : 1, 1);
        const int side = spec.scheme == Scheme::distributed ? 2 : 4;
        spec.elements_x = s.integer("elements_x", side, 1);
        spec.elements_y = s.integer("elements_y", side, 1);
        cfg.schemes.push_back(spec);
    }

    const json& patterns = top.raw("patterns");
    if (!patterns.is_array() || patterns.empty()) top.fail("/patterns", "expected a non-empty array");
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const std::string ptr = "/patterns/" + std::to_string(i);
        if (!patterns[i].is_string()) top.fail(ptr, "expected a pattern name");
        try {
            cfg.patterns.push_back(pattern_from_string(patterns[i].get<std::string>()));
        } catch (const std::invalid_argument& e) {
            top.fail(ptr, e.what());
        }
    }

    const json& powers = top.raw("powers_dbm");
    if (!powers.is_array() || powers.empty()) top.fail("/powers_dbm", "expected a non-empty array");
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (!powers[i].is_number()) top.fail("/powers_dbm/" + std::to_string(i), "expected a number");
        cfg.powers_dbm.push_back(powers[i].get<double>());
    }

    const json& seeds = top.raw("seeds");
    if (seeds.is_array()) {
        if (seeds.empty()) top.fail("/seeds", "expected at least one seed");
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            if (!seeds[i].is_number_unsigned()) top.fail("/seeds/" + std::to_string(i), "expected a non-negative integer");
            cfg.seeds.push_back(seeds[i].get<std::uint64_t>());
        }
    } else if (seeds.is_object()) {
        const Section s = top.child("seeds");
        s.allow_only({"first", "count"});
        const int first = s.integer("first", 1, 0);
        const int count = s.integer("count", 1, 1);
        for (int i = 0; i < count; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(first + i));
    } else {
        top.fail("/seeds", "expected an array of seeds or {\"first\": n, \"count\": m}");
    }

    const std::string facing = top.string("init_facing", "scenario");
    if (facing == "scenario") cfg.init_facing = InitFacing::scenario;
    else if (facing == "prior") cfg.init_facing = InitFacing::prior;
    else top.fail("/init_facing", "expected \"scenario\" or \"prior\"");

    cfg.warm_start = top.boolean("warm_start", cfg.warm_start);
    cfg.output_dir = top.string("output_dir", cfg.output_dir);

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        if (e.line() > 0) throw;
        // cross-field errors point at the list that carries the conflict
        const std::string msg = e.what();
        const char* ptr = msg.find("scheme") != std::string::npos || msg.find("element") != std::string::npos
                              ? "/schemes"
                              : "/scenario";
        throw ConfigError(msg, lines.line(ptr));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), lines.line("/optimizer"));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentConfig default_experiment() {
    ExperimentConfig cfg;
    cfg.schemes = {{Scheme::distributed, 4, 2, 2}, {Scheme::centralized, 1, 4, 4}, {Scheme::fixed_irs, 1, 4, 4}};
    cfg.patterns = {PatternKind::directive, PatternKind::isotropic};
    cfg.powers_dbm = {5.0, 10.0, 15.0};
    for (std::uint64_t s = 1; s <= 50; ++s) cfg.seeds.push_back(s);
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    using ojson = nlohmann::ordered_json;
    const auto& p = cfg.scenario;
    const auto range = [](const AngleRange& r) { return ojson::array({r.lo, r.hi}); };
    ojson sc = {
        {"bs_antennas", p.bs_antennas},
        {"users", p.users},
        {"wavelength_m", p.wavelength},
        {"paths_per_user", p.paths_per_user},
        {"bs_paths", p.bs_paths},
        {"los_variance", p.los_variance},
        {"nlos_variance", p.nlos_variance},
        {"bs_los_variance", p.bs_los_variance},
        {"bs_nlos_variance", p.bs_nlos_variance},
        {"noise_power_dbm", p.noise_dbm},
        {"d_min_m", p.min_distance()},
        {"site_region", {{"center_m", {p.region.center.x(), p.region.center.y(), p.region.center.z()}},
                         {"side_m", p.region.side}}},
        {"user_elevation_rad", range(p.user_elevation)},
        {"user_azimuth_rad", range(p.user_azimuth)},
        {"bs_arrival_rad", range(p.bs_arrival)},
        {"bs_elevation_rad", range(p.bs_elevation)},
        {"bs_azimuth_rad", range(p.bs_azimuth)},
    };
    const auto& o = cfg.optimizer;
    ojson opt = {
        {"outer_iterations", o.outer_iterations},
        {"inner_iterations", o.inner_iterations},
        {"tolerance_bps_hz", o.tolerance},
        {"early_stop", o.early_stop},
        {"armijo", {{"c1", o.step.sufficient_decrease}, {"backtrack", o.step.backtrack},
                    {"max_backtracks", o.step.max_backtracks}, {"initial_step", o.step.initial_step}}},
        {"position_xi_wavelengths", o.position_xi_wavelengths},
        {"rotation_xi_rad", o.rotation_xi},
        {"position_box_m", o.position_box},
        {"rotation_box_rad", o.rotation_box},
        {"literal_distance_row", o.literal_distance_row},
    };
    ojson schemes = ojson::array();
    for (const auto& s : cfg.schemes)
        schemes.push_back({{"name", std::string(to_string(s.scheme))}, {"surfaces", s.surfaces},
                           {"elements_x", s.elements_x}, {"elements_y", s.elements_y}});
    ojson patterns = ojson::array();
    for (auto k : cfg.patterns) patterns.push_back(std::string(to_string(k)));
    ojson root = {
        {"schema_version", kConfigSchemaVersion},
        {"scenario", sc},
        {"optimizer", opt},
        {"schemes", schemes},
        {"patterns", patterns},
        {"powers_dbm", cfg.powers_dbm},
        {"seeds", cfg.seeds},
        {"init_facing", cfg.init_facing == InitFacing::scenario ? "scenario" : "prior"},
        {"warm_start", cfg.warm_start},
        {"output_dir", cfg.output_dir},
    };
    return root.dump(2) + "\n";
}

} // namespace p6d
