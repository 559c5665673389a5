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

#pragma once

#include "p6d/config.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace p6d {

struct CellResult {
    Scheme scheme = Scheme::distributed;
    PatternKind pattern = PatternKind::directive;
    double power_dbm = 0.0;
    std::uint64_t seed = 0;
    double sum_rate = 0.0; // bps/Hz
    int outer_iterations = 0;
    bool feasible = true;
    double runtime_s = 0.0;
};

struct AggregateRow {
    Scheme scheme = Scheme::distributed;
    PatternKind pattern = PatternKind::directive;
    double power_dbm = 0.0;
    int seeds = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation
    double mean_outer_iterations = 0.0;
};

struct ExperimentResult {
    std::vector<CellResult> cells; // config order: scheme, pattern, power, seed
    std::vector<AggregateRow> aggregates;
    double runtime_s = 0.0;
};

// Initial poses and phases the runner uses for one (scheme, scenario, seed).
std::vector<SurfacePose> initial_poses_for(const SchemeSpec& scheme, const ScenarioParams& params,
                                           const Scenario& scenario, std::uint64_t seed, InitFacing facing);

// Tiles (tiles_x, tiles_y) with tiles_x * tiles_y == surfaces and the two
// factors as close as possible, tiles_x <= tiles_y.
std::pair<int, int> tile_grid(int surfaces);

// Runs a single (scheme, pattern, power, seed) cell.
CellResult run_cell(const ExperimentConfig& config, const SchemeSpec& scheme, PatternKind pattern, double power_dbm,
                    std::uint64_t seed);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Every cell of the sweep; `jobs` worker threads, results kept in config order.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1, const ProgressFn& progress = {});

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells);

// results.csv: one row per cell, fully deterministic for a given config.
std::string results_csv(const std::vector<CellResult>& cells);
// aggregate.csv: mean/std per (scheme, pattern, power).
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
// timings.csv: wall-clock seconds per cell (not deterministic).
std::string timings_csv(const std::vector<CellResult>& cells);
std::string metadata_json(const ExperimentConfig& config, const ExperimentResult& result);

// Writes the four files above into `dir` (created if needed).
void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& config, const ExperimentResult& result);

std::vector<CellResult> parse_results_csv(const std::string& text);
std::vector<CellResult> read_results_csv(const std::filesystem::path& path);

struct GapRow {
    Scheme scheme = Scheme::distributed;
    double power_dbm = 0.0;
    double directive_mean = 0.0;
    double isotropic_mean = 0.0;
    double gap = 0.0;           // isotropic - directive, bps/Hz
    int paired_seeds = 0;
    double positive_fraction = 0.0; // share of seeds whose own gap is > 0
};

// Isotropic-minus-directive mean-rate gaps per (scheme, power). Throws
// ConfigError if a (scheme, power) lacks either pattern.
std::vector<GapRow> summarize(const std::vector<CellResult>& cells);
std::string gaps_csv(const std::vector<GapRow>& rows);

// Locale-independent shortest round-trip rendering.
std::string format_number(double value);
std::string format_fixed(double value, int decimals);

} // namespace p6d
