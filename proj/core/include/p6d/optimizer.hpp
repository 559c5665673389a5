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

#include "p6d/channel.hpp"
#include "p6d/numerics.hpp"

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace p6d {

enum class Scheme { distributed, centralized, fixed_irs };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

// Everything fixed during one optimization run.
struct SystemSetup {
    Scenario scenario;
    SurfaceModel model;
    SiteRegion region;
    double d_min = 0.0; // m
};

struct OptimizerConfig {
    int outer_iterations = 20;            // T1
    int inner_iterations = 2;             // T2
    StepRule step;
    double position_xi_wavelengths = 1e-4; // finite-difference step, in lambda
    double rotation_xi = 1e-5;            // rad
    double position_box = 1.0;            // |d|_inf bound, m
    double rotation_box = 1.0;            // |delta|_inf bound, rad
    double tolerance = 1e-4;              // bps/Hz per outer iteration
    bool early_stop = true;
    // Use the distance linearization exactly as typeset (dimensionless left
    // side) instead of the inner approximation.
    bool literal_distance_row = false;
    Scheme scheme = Scheme::distributed;

    void validate() const;
};

// Mutable optimization variables plus the channels they induce.
struct AoState {
    std::vector<SurfacePose> poses;
    CVec theta;
    CMat W;
    ChannelRealization channels;

    CMat effective() const { return channels.effective(theta); }
};

AoState make_state(const SystemSetup& setup, std::vector<SurfacePose> poses, CVec theta);

// Sum rate of the state's (W, theta, poses).
double state_sum_rate(const SystemSetup& setup, const AoState& state);

// W = (H P H^H + sigma^2 I)^{-1} H
CMat mmse_beamformer(const CMat& H, const RVec& powers, double noise_power);

// Affine inner approximation of |q - q_j| >= d_min around q_prev,
// as a row a^T q <= b over the new position q.
LpRow linearized_min_distance(const Vec3& q_prev, const Vec3& q_j, double d_min, bool literal = false);

// Central-difference sum-rate gradient w.r.t. q_b or u_b (W, theta fixed).
Vec3 position_gradient(int b, const AoState& state, const SystemSetup& setup, double xi);
Vec3 rotation_gradient(int b, const AoState& state, const SystemSetup& setup, double xi);

struct StepReport {
    double step = 0.0;
    double before = 0.0;
    double after = 0.0;
    Vec3 direction = Vec3::Zero();
};

// One feasible-gradient step on q_b (resp. u_b); updates the state in place.
StepReport position_step(int b, AoState& state, const SystemSetup& setup, const OptimizerConfig& config);
StepReport rotation_step(int b, AoState& state, const SystemSetup& setup, const OptimizerConfig& config);

struct FpAuxiliaries {
    RVec alpha;
    CVec epsilon;
};

// U is (NB x NB) Hermitian PSD, v holds the row covector of the linear term.
struct FpQuadratic {
    CMat U;
    CVec v;
};

// A_k = V diag(g_k), one M x NB matrix per user.
std::vector<CMat> cascade_matrices(const ChannelRealization& channels);

FpAuxiliaries fp_auxiliaries(const CVec& theta, const ChannelRealization& channels, const CMat& W,
                             const RVec& powers, double noise_power);
FpQuadratic fp_quadratic(const ChannelRealization& channels, const CMat& W, const RVec& powers,
                         const FpAuxiliaries& aux);

// theta^H U theta - 2 Re(v^T theta)
double fp_objective(const FpQuadratic& q, const CVec& theta);

// Closed-form minimizer of the surrogate over theta_j alone on the unit circle.
cplx phase_coordinate_update(int j, const FpQuadratic& q, const CVec& theta);

// Refresh (alpha, epsilon) and sweep every coordinate once.
void phase_sweep(AoState& state, const SystemSetup& setup);

struct AoHooks {
    // After every accepted change of the poses.
    std::function<void(std::span<const SurfacePose>)> on_poses;
    // After every coordinate update: index, surrogate, theta before and after.
    std::function<void(int, const FpQuadratic&, const CVec&, const CVec&)> on_phase;
    // After each block: name, sum rate before, sum rate after.
    std::function<void(std::string_view, double, double)> on_block;
};

struct RunResult {
    CMat W;
    CVec theta;
    std::vector<SurfacePose> poses;
    std::vector<double> trace; // trace[0] is the initial point
    double sum_rate = 0.0;     // after the final W update
    int outer_iterations = 0;
    FeasibilityReport feasibility;
    double seconds = 0.0;
};

// Alternating optimization: W, then T2 sweeps of position, rotation and
// phase blocks per outer iteration, then a final W update.
RunResult ao_optimize(const SystemSetup& setup, std::vector<SurfacePose> initial_poses, CVec initial_theta,
                      const OptimizerConfig& config, const AoHooks* hooks = nullptr);

} // namespace p6d
