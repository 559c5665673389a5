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

#include "p6d/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef P6D_VERSION
#define P6D_VERSION "unknown"
#endif

namespace p6d {

namespace {

const char* kResultsHeader = "kind,scheme,pattern,power_dbm,seed,sum_rate_bps_hz,outer_iters,feasible";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_field(const std::string& s, int line, const char* what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(std::string("bad ") + what + " field '" + s + "'", line);
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[128];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

std::vector<SurfacePose> initial_poses_for(const SchemeSpec& scheme, const ScenarioParams& params,
                                           const Scenario& scenario, std::uint64_t seed, InitFacing facing) {
    ScenarioParams p = params;
    p.surfaces = scheme.surfaces;
    p.elements_x = scheme.elements_x;
    p.elements_y = scheme.elements_y;
    if (scheme.scheme == Scheme::fixed_irs) return {fixed_irs_pose(p)};
    const Vec3 axis = facing == InitFacing::scenario ? scenario_facing(scenario) : default_facing(p);
    return init_poses(p, seed, axis);
}

std::pair<int, int> tile_grid(int surfaces) {
    int tx = 1;
    for (int d = 1; d * d <= surfaces; ++d)
        if (surfaces % d == 0) tx = d;
    return {tx, surfaces / tx};
}

namespace {

struct SchemeRun {
    RunResult run;
    double seconds = 0.0;
};

SchemeRun run_scheme(const ExperimentConfig& config, const SchemeSpec& scheme, PatternKind pattern, double power_dbm,
                     std::uint64_t seed) {
    ScenarioParams params = config.scenario;
    params.surfaces = scheme.surfaces;
    params.elements_x = scheme.elements_x;
    params.elements_y = scheme.elements_y;
    params.power_dbm = power_dbm;

    SystemSetup setup;
    setup.scenario = generate_scenario(params, seed);
    setup.model = SurfaceModel{params.layout(), RadiationPattern::make(pattern, params.wavelength)};
    setup.region = params.region;
    setup.d_min = params.min_distance();

    OptimizerConfig opt = config.optimizer;
    opt.scheme = scheme.scheme;

    SchemeRun best;
    best.run = ao_optimize(setup, initial_poses_for(scheme, params, setup.scenario, seed, config.init_facing),
                           random_phases(scheme.total_elements(), seed), opt);
    best.seconds = best.run.seconds;
    if (!config.warm_start || scheme.scheme == Scheme::fixed_irs) return best;

    std::vector<SurfacePose> poses;
    CVec theta;
    if (scheme.scheme == Scheme::centralized) {
        const SchemeSpec fixed{Scheme::fixed_irs, 1, scheme.elements_x, scheme.elements_y};
        const SchemeRun base = run_scheme(config, fixed, pattern, power_dbm, seed);
        best.seconds += base.seconds;
        poses = base.run.poses;
        theta = base.run.theta;
    } else {
        const auto [tx, ty] = tile_grid(scheme.surfaces);
        const SchemeSpec whole{Scheme::centralized, 1, tx * scheme.elements_x, ty * scheme.elements_y};
        const SchemeRun base = run_scheme(config, whole, pattern, power_dbm, seed);
        best.seconds += base.seconds;
        poses = tile_surface(base.run.poses.front(), tx, ty, scheme.elements_x, scheme.elements_y,
                             params.layout().pitch());
        if (!feasibility_check(poses, params.region, setup.d_min).feasible()) return best;
        theta = tile_phases(base.run.theta, tx, ty, scheme.elements_x, scheme.elements_y);
    }
    RunResult warm = ao_optimize(setup, std::move(poses), std::move(theta), opt);
    best.seconds += warm.seconds;
    if (warm.sum_rate > best.run.sum_rate) best.run = std::move(warm);
    return best;
}

} // namespace

CellResult run_cell(const ExperimentConfig& config, const SchemeSpec& scheme, PatternKind pattern, double power_dbm,
                    std::uint64_t seed) {
    const SchemeRun r = run_scheme(config, scheme, pattern, power_dbm, seed);
    CellResult cell;
    cell.scheme = scheme.scheme;
    cell.pattern = pattern;
    cell.power_dbm = power_dbm;
    cell.seed = seed;
    cell.sum_rate = r.run.sum_rate;
    cell.outer_iterations = r.run.outer_iterations;
    cell.feasible = r.run.feasibility.feasible();
    cell.runtime_s = r.seconds;
    return cell;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs, const ProgressFn& progress) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    struct Task {
        const SchemeSpec* scheme;
        PatternKind pattern;
        double power;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const auto& s : config.schemes)
        for (auto pat : config.patterns)
            for (double pw : config.powers_dbm)
                for (auto seed : config.seeds) tasks.push_back({&s, pat, pw, seed});

    ExperimentResult result;
    result.cells.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex err_mutex;
    std::exception_ptr error;
    std::mutex progress_mutex;

    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            {
                std::lock_guard lock(err_mutex);
                if (error) return;
            }
            try {
                const Task& t = tasks[i];
                result.cells[i] = run_cell(config, *t.scheme, t.pattern, t.power, t.seed);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!error) error = std::current_exception();
                return;
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(d, tasks.size());
            }
        }
    };

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    result.aggregates = aggregate(result.cells);
    result.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells) {
    std::vector<AggregateRow> rows;
    std::vector<std::vector<const CellResult*>> members;
    for (const auto& c : cells) {
        std::size_t i = 0;
        for (; i < rows.size(); ++i)
            if (rows[i].scheme == c.scheme && rows[i].pattern == c.pattern && rows[i].power_dbm == c.power_dbm) break;
        if (i == rows.size()) {
            rows.push_back({c.scheme, c.pattern, c.power_dbm, 0, 0.0, 0.0, 0.0});
            members.emplace_back();
        }
        members[i].push_back(&c);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& m = members[i];
        double sum = 0.0, iters = 0.0;
        for (const auto* c : m) {
            sum += c->sum_rate;
            iters += c->outer_iterations;
        }
        const double n = static_cast<double>(m.size());
        rows[i].seeds = static_cast<int>(m.size());
        rows[i].mean = sum / n;
        rows[i].mean_outer_iterations = iters / n;
        double ss = 0.0;
        for (const auto* c : m) ss += (c->sum_rate - rows[i].mean) * (c->sum_rate - rows[i].mean);
        rows[i].stddev = m.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    return rows;
}

std::string results_csv(const std::vector<CellResult>& cells) {
    std::string out = std::string(kResultsHeader) + "\n";
    for (const auto& c : cells) {
        out += "cell,";
        out += to_string(c.scheme);
        out += ',';
        out += to_string(c.pattern);
        out += ',' + format_number(c.power_dbm) + ',' + std::to_string(c.seed) + ',' + format_fixed(c.sum_rate, 9) +
               ',' + std::to_string(c.outer_iterations) + ',' + (c.feasible ? "1" : "0") + "\n";
    }
    return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out = "kind,scheme,pattern,power_dbm,seeds,mean_sum_rate_bps_hz,std_sum_rate_bps_hz,mean_outer_iters\n";
    for (const auto& r : rows) {
        out += "aggregate,";
        out += to_string(r.scheme);
        out += ',';
        out += to_string(r.pattern);
        out += ',' + format_number(r.power_dbm) + ',' + std::to_string(r.seeds) + ',' + format_fixed(r.mean, 9) + ',' +
               format_fixed(r.stddev, 9) + ',' + format_fixed(r.mean_outer_iterations, 3) + "\n";
    }
    return out;
}

std::string timings_csv(const std::vector<CellResult>& cells) {
    std::string out = "scheme,pattern,power_dbm,seed,runtime_s\n";
    for (const auto& c : cells) {
        out += to_string(c.scheme);
        out += ',';
        out += to_string(c.pattern);
        out += ',' + format_number(c.power_dbm) + ',' + std::to_string(c.seed) + ',' + format_fixed(c.runtime_s, 6) +
               "\n";
    }
    return out;
}

std::string metadata_json(const ExperimentConfig& config, const ExperimentResult& result) {
    using ojson = nlohmann::ordered_json;
    int infeasible = 0;
    for (const auto& c : result.cells) infeasible += c.feasible ? 0 : 1;
    ojson meta = {
        {"tool", "p6d"},
        {"version", P6D_VERSION},
        {"config", ojson::parse(config_to_json(config))},
        {"model", {
            {"rotation_convention", "R = Rz(z) * Ry(y) * Rx(x), local outward normal +x"},
            {"element_grid", "elements_x along local y, elements_y along local z, half-wavelength pitch"},
            {"site_region", "axis-aligned cube"},
            {"min_distance", "Euclidean |q_b - q_j| >= d_min"},
            {"distance_linearization", config.optimizer.literal_distance_row ? "literal (dimensionless)"
                                                                            : "inner approximation d_min*|q_prev-q_j|"},
            {"fixed_irs_pose", "region center, normal bisecting the mean reversed DOA and DOD of the angle ranges"},
            {"initial_poses", config.init_facing == InitFacing::scenario
                                  ? "sphere cap around the scenario bisector, radial normals"
                                  : "sphere cap around the angle-range bisector, radial normals"},
            {"initial_phases", "uniform random per seed"},
            {"warm_start", config.warm_start ? "best of the sampled start and the tiled optimum of the next simpler scheme"
                                             : "sampled start only"},
            {"gradient", "central differences"},
            {"isotropic_pattern", "half-space: constant on the front side, zero behind"},
        }},
        {"cells", result.cells.size()},
        {"infeasible_cells", infeasible},
        {"runtime_s", result.runtime_s},
    };
    return meta.dump(2) + "\n";
}

void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result) {
    std::filesystem::create_directories(dir);
    write_file(dir / "results.csv", results_csv(result.cells));
    write_file(dir / "aggregate.csv", aggregate_csv(result.aggregates));
    write_file(dir / "timings.csv", timings_csv(result.cells));
    write_file(dir / "metadata.json", metadata_json(config, result));
}

std::vector<CellResult> parse_results_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader)
        throw ConfigError("unexpected results header (expected '" + std::string(kResultsHeader) + "')", 1);
    std::vector<CellResult> cells;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) throw ConfigError("expected 8 fields", lineno);
        if (f[0] != "cell") throw ConfigError("unknown row kind '" + f[0] + "'", lineno);
        CellResult c;
        try {
            c.scheme = scheme_from_string(f[1]);
            c.pattern = pattern_from_string(f[2]);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), lineno);
        }
        c.power_dbm = parse_field<double>(f[3], lineno, "power_dbm");
        c.seed = parse_field<std::uint64_t>(f[4], lineno, "seed");
        c.sum_rate = parse_field<double>(f[5], lineno, "sum_rate_bps_hz");
        c.outer_iterations = parse_field<int>(f[6], lineno, "outer_iters");
        c.feasible = parse_field<int>(f[7], lineno, "feasible") != 0;
        cells.push_back(c);
    }
    return cells;
}

std::vector<CellResult> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_results_csv(ss.str());
}

std::vector<GapRow> summarize(const std::vector<CellResult>& cells) {
    struct Bucket {
        Scheme scheme;
        double power;
        std::map<std::uint64_t, double> directive;
        std::map<std::uint64_t, double> isotropic;
    };
    std::vector<Bucket> buckets;
    for (const auto& c : cells) {
        auto it = std::find_if(buckets.begin(), buckets.end(),
                               [&](const Bucket& b) { return b.scheme == c.scheme && b.power == c.power_dbm; });
        if (it == buckets.end()) {
            buckets.push_back({c.scheme, c.power_dbm, {}, {}});
            it = std::prev(buckets.end());
        }
        (c.pattern == PatternKind::directive ? it->directive : it->isotropic)[c.seed] = c.sum_rate;
    }
    if (buckets.empty()) throw ConfigError("no result rows to summarize");

    const auto mean = [](const std::map<std::uint64_t, double>& m) {
        double s = 0.0;
        for (const auto& [_, v] : m) s += v;
        return s / static_cast<double>(m.size());
    };

    std::vector<GapRow> rows;
    for (const auto& b : buckets) {
        if (b.directive.empty() || b.isotropic.empty())
            throw ConfigError("scheme " + std::string(to_string(b.scheme)) + " at " + format_number(b.power) +
                              " dBm lacks " + (b.directive.empty() ? "directive" : "isotropic") + " results");
        GapRow r;
        r.scheme = b.scheme;
        r.power_dbm = b.power;
        r.directive_mean = mean(b.directive);
        r.isotropic_mean = mean(b.isotropic);
        r.gap = r.isotropic_mean - r.directive_mean;
        int positive = 0;
        for (const auto& [seed, dir] : b.directive) {
            if (auto it = b.isotropic.find(seed); it != b.isotropic.end()) {
                ++r.paired_seeds;
                positive += it->second - dir > 0.0 ? 1 : 0;
            }
        }
        r.positive_fraction = r.paired_seeds ? static_cast<double>(positive) / r.paired_seeds : 0.0;
        rows.push_back(r);
    }
    return rows;
}

std::string gaps_csv(const std::vector<GapRow>& rows) {
    std::string out = "scheme,power_dbm,directive_mean_bps_hz,isotropic_mean_bps_hz,gap_bps_hz,paired_seeds,positive_fraction\n";
    for (const auto& r : rows) {
        out += to_string(r.scheme);
        out += ',' + format_number(r.power_dbm) + ',' + format_fixed(r.directive_mean, 9) + ',' +
               format_fixed(r.isotropic_mean, 9) + ',' + format_fixed(r.gap, 9) + ',' + std::to_string(r.paired_seeds) +
               ',' + format_fixed(r.positive_fraction, 4) + "\n";
    }
    return out;
}

} // namespace p6d
