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

#include "p6d/optimizer.hpp"
#include "p6d/scenario.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace p6d {

inline constexpr int kConfigSchemaVersion = 1;

struct SchemeSpec {
    Scheme scheme = Scheme::distributed;
    int surfaces = 4;
    int elements_x = 2;
    int elements_y = 2;

    int total_elements() const { return surfaces * elements_x * elements_y; }
};

// How 6DMA surfaces are initialized before optimization.
enum class InitFacing {
    scenario, // cap axis from the drawn paths of each scenario
    prior     // cap axis from the configured angle ranges only
};

struct ExperimentConfig {
    ScenarioParams scenario;
    OptimizerConfig optimizer;
    std::vector<SchemeSpec> schemes;
    std::vector<PatternKind> patterns;
    std::vector<double> powers_dbm;
    std::vector<std::uint64_t> seeds;
    InitFacing init_facing = InitFacing::scenario;
    // Also start each 6DMA scheme from the optimum of the next simpler
    // scheme (fixed-irs -> centralized -> distributed) and keep the better run.
    bool warm_start = true;
    std::string output_dir = "results";

    // Cross-field checks (non-empty lists, equal element budgets, ...).
    void validate() const;
};

// Parses and validates a JSON experiment configuration. Errors are thrown as
// ConfigError carrying the 1-based line of the offending key or token.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

// Defaults used by the bundled experiment (all three schemes, directive
// and isotropic patterns, 5/10/15 dBm, 50 seeds).
ExperimentConfig default_experiment();

// Canonical JSON rendering of a configuration (round-trips through parse_config).
std::string config_to_json(const ExperimentConfig& config);

} // namespace p6d
