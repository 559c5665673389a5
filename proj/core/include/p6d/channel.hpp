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

#include "p6d/geometry.hpp"
#include "p6d/radiation.hpp"

#include <span>
#include <vector>

namespace p6d {

// One user -> surface propagation path. Angles are w.r.t. the global
// reference point and shared by every surface (far field).
struct UserPath {
    cplx gain;
    double elevation = 0.0;
    double azimuth = 0.0;
    Vec3 direction() const { return direction_vector(elevation, azimuth); }
};

// One surface -> BS path: departure angles at the surfaces plus the ULA AoA.
struct BsPath {
    cplx gain;
    double elevation = 0.0;
    double azimuth = 0.0;
    double arrival = 0.0; // BS ULA angle psi
    Vec3 direction() const { return direction_vector(elevation, azimuth); }
};

// Random propagation environment; independent of how many surfaces exist.
struct Scenario {
    double wavelength = 0.125;
    int bs_antennas = 1;
    std::vector<std::vector<UserPath>> user_paths; // [k][l]
    std::vector<BsPath> bs_paths;
    RVec powers;                                   // W, one per user
    double noise_power = 1e-11;                    // W

    int num_users() const { return static_cast<int>(user_paths.size()); }
    void validate() const;
};

// Surface-side configuration shared by every surface of one scheme.
struct SurfaceModel {
    LocalLayout layout;
    RadiationPattern pattern;

    int elements() const { return layout.size(); }
};

// Channels of a single surface: V is M x N, G is N x K (column k is g_k).
struct SurfaceChannels {
    CMat V;
    CMat G;
};

// Per-surface blocks plus their stacked forms: V = [V_1 ... V_B] (M x NB)
// and G = [G_1; ...; G_B] (NB x K).
class ChannelRealization {
public:
    ChannelRealization() = default;
    explicit ChannelRealization(std::vector<SurfaceChannels> blocks);

    int surfaces() const { return static_cast<int>(blocks_.size()); }
    int elements_per_surface() const { return blocks_.empty() ? 0 : static_cast<int>(blocks_.front().V.cols()); }
    const std::vector<SurfaceChannels>& blocks() const { return blocks_; }
    const CMat& V() const { return v_; }
    const CMat& G() const { return g_; }

    void replace_surface(int b, SurfaceChannels block);

    // H = V diag(theta) G, M x K.
    CMat effective(const CVec& theta) const;

private:
    std::vector<SurfaceChannels> blocks_;
    CMat v_;
    CMat g_;
};

// exp(j 2pi/lambda d^T r_n) over the elements of a posed surface.
CVec array_response_incident(const SurfacePose& pose, const LocalLayout& layout, const Vec3& doa, double wavelength);
CVec array_response_departure(const SurfacePose& pose, const LocalLayout& layout, const Vec3& dod, double wavelength);

// Half-wavelength ULA response: entry m is exp(j pi m cos psi).
CVec bs_steering(double psi, int antennas);

CVec user_to_surface_channel(const Scenario& scenario, int k, const SurfacePose& pose, const SurfaceModel& model);
CMat surface_to_bs_channel(const Scenario& scenario, const SurfacePose& pose, const SurfaceModel& model);
SurfaceChannels surface_channels(const Scenario& scenario, const SurfacePose& pose, const SurfaceModel& model);
ChannelRealization synthesize(const Scenario& scenario, std::span<const SurfacePose> poses, const SurfaceModel& model);

// V diag(theta) g for one surface.
CVec cascaded_channel(const CMat& V, const CVec& theta, const CVec& g);

// Stacks the blocks and returns h_k for every user as the columns of H.
CMat effective_channel(const ChannelRealization& channels, const CVec& theta);

// Per-user SINR with linear receivers W (M x K). Throws on an all-zero w_k.
RVec sinr(const CMat& W, const CMat& H, const RVec& powers, double noise_power);

// As sinr(), but a zero receive vector yields gamma_k = 0 instead of throwing.
RVec sinr_or_zero(const CMat& W, const CMat& H, const RVec& powers, double noise_power);

double sum_rate(const RVec& sinr_values);

} // namespace p6d
