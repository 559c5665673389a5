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

// Experiment runner: power sweeps across schemes and radiation patterns.
//
//   p6d run --config <file> [--out <dir>] [--jobs <n>]
//   p6d summarize --in <results.csv>
//   p6d validate --config <file>
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include "p6d/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

int run(const std::string& config_path, const std::string& out, int jobs, bool quiet) {
    const p6d::ExperimentConfig cfg = p6d::load_config(config_path);
    const std::filesystem::path dir = out.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(out);
    p6d::ProgressFn progress;
    if (!quiet)
        progress = [](std::size_t done, std::size_t total) {
            std::cerr << "\r[" << done << "/" << total << "] cells" << std::flush;
            if (done == total) std::cerr << "\n";
        };
    const p6d::ExperimentResult result = p6d::run_experiment(cfg, jobs, progress);
    p6d::write_outputs(dir, cfg, result);
    std::cout << p6d::aggregate_csv(result.aggregates);
    std::cerr << "wrote " << (dir / "results.csv").string() << " (" << result.cells.size() << " cells, "
              << p6d::format_fixed(result.runtime_s, 1) << " s)\n";
    return kOk;
}

int summarize(const std::string& in) {
    const auto cells = p6d::read_results_csv(in);
    std::cout << p6d::gaps_csv(p6d::summarize(cells));
    return kOk;
}

int validate(const std::string& config_path) {
    const p6d::ExperimentConfig cfg = p6d::load_config(config_path);
    std::size_t cells = cfg.schemes.size() * cfg.patterns.size() * cfg.powers_dbm.size() * cfg.seeds.size();
    std::cout << config_path << ": ok (" << cells << " cells)\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Passive 6DMA-assisted uplink: sum-rate optimization experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_path;
    int jobs = 1;
    bool quiet = false;

    auto* run_cmd = app.add_subcommand("run", "Run a power sweep and write CSV/JSON results");
    run_cmd->add_option("--config", config_path, "Experiment configuration (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir in the config)");
    run_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_flag("-q,--quiet", quiet, "No progress output");

    auto* sum_cmd = app.add_subcommand("summarize", "Isotropic-minus-directive gaps per scheme and power");
    sum_cmd->add_option("--in", in_path, "results.csv written by 'run'")->required();

    auto* val_cmd = app.add_subcommand("validate", "Check a configuration file");
    val_cmd->add_option("--config", config_path, "Experiment configuration (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run_cmd) return run(config_path, out_dir, jobs, quiet);
        if (*sum_cmd) return summarize(in_path);
        if (*val_cmd) return validate(config_path);
    } catch (const p6d::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kOk;
}
