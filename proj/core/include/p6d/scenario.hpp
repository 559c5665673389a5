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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace p6d {

double dbm_to_watts(double dbm);

struct AngleRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Simulation environment plus the surface budget of one scheme.
struct ScenarioParams {
    int bs_antennas = 6;
    int users = 6;
    int surfaces = 4;
    int elements_x = 2;
    int elements_y = 2;
    double wavelength = 0.125;   // m
    int paths_per_user = 2;
    int bs_paths = 6;
    double los_variance = 4e-6;  // user-side LoS gain variance
    double nlos_variance = 1e-6;
    double bs_los_variance = 4e-6;
    double bs_nlos_variance = 1e-6;
    AngleRange user_elevation{0.0, kPi / 2};
    AngleRange user_azimuth{kPi, 1.5 * kPi};
    AngleRange bs_arrival{0.0, kPi / 2};
    AngleRange bs_elevation{kPi / 2, kPi};
    AngleRange bs_azimuth{-kPi / 2, 0.0};
    double power_dbm = 15.0;
    double noise_dbm = -80.0;
    std::optional<double> d_min;  // m; defaults to (sqrt(2)/2 + 1/10) lambda
    SiteRegion region;

    double min_distance() const;
    LocalLayout layout() const { return LocalLayout::upa(elements_x, elements_y, wavelength); }
    void validate() const;
};

// Counter-based random stream: every (seed, tag, a, b) names an independent
// substream, so adding users or surfaces never shifts other draws.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0);

    std::uint64_t next();
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double uniform(const AngleRange& r) { return uniform(r.lo, r.hi); }
    double normal();
    cplx complex_normal(double variance);  // CN(0, variance)

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed);

// Outward normal the surfaces should start from: the normalized sum of the
// mean reversed user-DOA and BS-DOD directions of the configured ranges.
Vec3 default_facing(const ScenarioParams& params);

// Same rule evaluated on the drawn paths of a scenario.
Vec3 scenario_facing(const Scenario& scenario);

// Rejection-sampled feasible poses on a sphere around the region center,
// radially oriented within a cap around `facing`. Deterministic per seed.
std::vector<SurfacePose> init_poses(const ScenarioParams& params, std::uint64_t seed,
                                    std::optional<Vec3> facing = std::nullopt);

// Fixed-IRS baseline: one surface at the region center whose normal is
// default_facing(params), tilted if needed so that it does not face the
// reference point. Depends on the configured ranges only, never on a draw.
SurfacePose fixed_irs_pose(const ScenarioParams& params);

// Cuts one surface into tiles_x * tiles_y equal sub-surfaces of
// tile_nx * tile_ny elements each. Tile b = ty * tiles_x + tx keeps the parent
// rotation and sits where its elements were, so every element position is
// unchanged.
std::vector<SurfacePose> tile_surface(const SurfacePose& pose, int tiles_x, int tiles_y, int tile_nx, int tile_ny,
                                      double pitch);

// Reorders parent reflection coefficients into the tiled element order used by
// tile_surface.
CVec tile_phases(const CVec& theta, int tiles_x, int tiles_y, int tile_nx, int tile_ny);

// Unit-modulus reflection coefficients with uniform random phases.
CVec random_phases(int count, std::uint64_t seed);

} // namespace p6d
