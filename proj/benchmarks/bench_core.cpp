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

#include <benchmark/benchmark.h>

namespace {

using namespace p6d;

struct Fixture {
    ScenarioParams params;
    SystemSetup setup;
    std::vector<SurfacePose> poses;
    CVec theta;

    explicit Fixture(PatternKind pattern = PatternKind::directive) {
        params.power_dbm = 15.0;
        setup.scenario = generate_scenario(params, 1);
        setup.model = SurfaceModel{params.layout(), RadiationPattern::make(pattern, params.wavelength)};
        setup.region = params.region;
        setup.d_min = params.min_distance();
        poses = init_poses(params, 1, scenario_facing(setup.scenario));
        theta = random_phases(params.surfaces * params.elements_x * params.elements_y, 1);
    }
};

void BM_Synthesize(benchmark::State& state) {
    const Fixture fx;
    for (auto _ : state) benchmark::DoNotOptimize(synthesize(fx.setup.scenario, fx.poses, fx.setup.model));
}
BENCHMARK(BM_Synthesize);

void BM_SumRate(benchmark::State& state) {
    const Fixture fx;
    const AoState st = make_state(fx.setup, fx.poses, fx.theta);
    for (auto _ : state) benchmark::DoNotOptimize(state_sum_rate(fx.setup, st));
}
BENCHMARK(BM_SumRate);

void BM_PhaseSweep(benchmark::State& state) {
    const Fixture fx;
    AoState st = make_state(fx.setup, fx.poses, fx.theta);
    for (auto _ : state) phase_sweep(st, fx.setup);
}
BENCHMARK(BM_PhaseSweep);

void BM_PositionStep(benchmark::State& state) {
    const Fixture fx;
    AoState st = make_state(fx.setup, fx.poses, fx.theta);
    const OptimizerConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(position_step(0, st, fx.setup, cfg));
}
BENCHMARK(BM_PositionStep);

void BM_LpSolve(benchmark::State& state) {
    LinearProgram lp;
    lp.objective = Vec3(0.3, -0.7, 0.2);
    for (int i = 0; i < static_cast<int>(state.range(0)); ++i)
        lp.add_row(Vec3(std::cos(i), std::sin(i), 0.1 * i), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(lp_solve(lp));
}
BENCHMARK(BM_LpSolve)->Arg(1)->Arg(4)->Arg(10);

void BM_AoRun(benchmark::State& state) {
    const Fixture fx(static_cast<PatternKind>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(ao_optimize(fx.setup, fx.poses, fx.theta, OptimizerConfig{}));
}
BENCHMARK(BM_AoRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
