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

#include "p6d/types.hpp"

#include <span>
#include <vector>

namespace p6d {

// Position (meters) and Euler rotation (radians) of one surface in the
// global frame. Rotations are applied as R = Rz(z) * Ry(y) * Rx(x).
struct SurfacePose {
    Vec3 position = Vec3::Zero();
    Vec3 rotation = Vec3::Zero();

    // Same pose with every rotation angle wrapped into [0, 2*pi).
    SurfacePose normalized() const;
};

// Axis-aligned cube that every surface center must stay inside.
struct SiteRegion {
    Vec3 center{1.5, 0.0, 0.0};
    double side = 1.0;

    void validate() const;
    // Signed distance to the nearest face; negative outside.
    double margin(const Vec3& q) const;
    bool contains(const Vec3& q, double slack = 0.0) const { return margin(q) >= -slack; }
};

// Uniform planar array on the local y-z plane, outward normal along local +x.
class LocalLayout {
public:
    LocalLayout() = default;
    LocalLayout(int nx, int ny, double pitch);

    // nx * ny grid at half-wavelength pitch, centered at the local origin.
    static LocalLayout upa(int nx, int ny, double wavelength);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int size() const noexcept { return static_cast<int>(offsets_.size()); }
    double pitch() const noexcept { return pitch_; }
    const std::vector<Vec3>& offsets() const noexcept { return offsets_; }
    const Vec3& offset(int n) const;

    static Vec3 normal() { return Vec3::UnitX(); }

private:
    int nx_ = 0;
    int ny_ = 0;
    double pitch_ = 0.0;
    std::vector<Vec3> offsets_;
};

Mat3 rotation_matrix(const Vec3& angles);

// d n(u) / d u for n(u) = R(u) * (1,0,0); columns follow (x, y, z) angles.
Mat3 normal_jacobian(const Vec3& angles);

Vec3 surface_normal(const SurfacePose& pose);

// Global position of element n (0-based): q + R(u) * offset_n.
Vec3 element_position(const SurfacePose& pose, const LocalLayout& layout, int n);

// Unit vector (sin e cos a, sin e sin a, cos e).
Vec3 direction_vector(double elevation, double azimuth);

// Rotation angles whose outward normal equals `normal` (normalized inside),
// with `roll` applied about the local normal axis first.
Vec3 rotation_towards(const Vec3& normal, double roll = 0.0);

struct ConstraintCheck {
    bool pass = true;
    // Worst (smallest) signed slack; +inf when the constraint is vacuous.
    double margin = 0.0;
};

struct FeasibilityReport {
    ConstraintCheck in_region;          // q_b inside the site cube
    ConstraintCheck min_distance;       // |q_b - q_j| >= d_min
    ConstraintCheck no_mutual_reflection; // n_b . (q_j - q_b) <= 0
    ConstraintCheck faces_away;         // n_b . q_b >= 0

    bool feasible() const {
        return in_region.pass && min_distance.pass && no_mutual_reflection.pass && faces_away.pass;
    }
    double worst_margin() const;
};

FeasibilityReport feasibility_check(std::span<const SurfacePose> poses, const SiteRegion& region,
                                    double d_min, double slack = 1e-9);

} // namespace p6d
