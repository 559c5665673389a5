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

#include "p6d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace p6d {

namespace {

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative number can round up to exactly 2*pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

} // namespace

SurfacePose SurfacePose::normalized() const {
    SurfacePose out = *this;
    for (int i = 0; i < 3; ++i) out.rotation[i] = wrap_angle(rotation[i]);
    return out;
}

void SiteRegion::validate() const {
    if (!(side > 0.0) || !std::isfinite(side))
        throw std::invalid_argument("site region side must be positive");
    if (!center.allFinite())
        throw std::invalid_argument("site region center must be finite");
}

double SiteRegion::margin(const Vec3& q) const {
    return 0.5 * side - (q - center).cwiseAbs().maxCoeff();
}

LocalLayout::LocalLayout(int nx, int ny, double pitch) : nx_(nx), ny_(ny), pitch_(pitch) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("layout needs at least one element per axis");
    if (!(pitch > 0.0)) throw std::invalid_argument("layout pitch must be positive");
    offsets_.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    const double cy = 0.5 * (nx - 1);
    const double cz = 0.5 * (ny - 1);
    for (int iz = 0; iz < ny; ++iz)
        for (int iy = 0; iy < nx; ++iy)
            offsets_.emplace_back(0.0, (iy - cy) * pitch, (iz - cz) * pitch);
}

LocalLayout LocalLayout::upa(int nx, int ny, double wavelength) {
    return LocalLayout(nx, ny, 0.5 * wavelength);
}

const Vec3& LocalLayout::offset(int n) const {
    if (n < 0 || n >= size()) throw std::out_of_range("element index out of range");
    return offsets_[static_cast<std::size_t>(n)];
}

Mat3 rotation_matrix(const Vec3& angles) {
    if (!angles.allFinite()) throw std::invalid_argument("rotation angles must be finite");
    const double cx = std::cos(angles.x()), sx = std::sin(angles.x());
    const double cy = std::cos(angles.y()), sy = std::sin(angles.y());
    const double cz = std::cos(angles.z()), sz = std::sin(angles.z());
    Mat3 rx, ry, rz;
    rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
    ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
    rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
    return rz * ry * rx;
}

Mat3 normal_jacobian(const Vec3& angles) {
    if (!angles.allFinite()) throw std::invalid_argument("rotation angles must be finite");
    const double cy = std::cos(angles.y()), sy = std::sin(angles.y());
    const double cz = std::cos(angles.z()), sz = std::sin(angles.z());
    // n = (cz cy, sz cy, -sy); roll about the local normal leaves it fixed
    Mat3 j;
    j.col(0).setZero();
    j.col(1) << -cz * sy, -sz * sy, -cy;
    j.col(2) << -sz * cy, cz * cy, 0.0;
    return j;
}

Vec3 surface_normal(const SurfacePose& pose) {
    return rotation_matrix(pose.rotation) * LocalLayout::normal();
}

Vec3 element_position(const SurfacePose& pose, const LocalLayout& layout, int n) {
    return pose.position + rotation_matrix(pose.rotation) * layout.offset(n);
}

Vec3 direction_vector(double elevation, double azimuth) {
    const double se = std::sin(elevation);
    return {se * std::cos(azimuth), se * std::sin(azimuth), std::cos(elevation)};
}

Vec3 rotation_towards(const Vec3& normal, double roll) {
    const double len = normal.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("normal must be a nonzero finite vector");
    const Vec3 n = normal / len;
    const double pitch = std::asin(std::clamp(-n.z(), -1.0, 1.0));
    const double yaw = std::atan2(n.y(), n.x());
    SurfacePose p;
    p.rotation = Vec3(roll, pitch, yaw);
    return p.normalized().rotation;
}

double FeasibilityReport::worst_margin() const {
    return std::min({in_region.margin, min_distance.margin, no_mutual_reflection.margin, faces_away.margin});
}

FeasibilityReport feasibility_check(std::span<const SurfacePose> poses, const SiteRegion& region,
                                    double d_min, double slack) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    FeasibilityReport r;
    r.in_region.margin = inf;
    r.min_distance.margin = inf;
    r.no_mutual_reflection.margin = inf;
    r.faces_away.margin = inf;

    std::vector<Vec3> normals;
    normals.reserve(poses.size());
    for (const auto& p : poses) normals.push_back(surface_normal(p));

    for (std::size_t b = 0; b < poses.size(); ++b) {
        const Vec3& qb = poses[b].position;
        r.in_region.margin = std::min(r.in_region.margin, region.margin(qb));
        r.faces_away.margin = std::min(r.faces_away.margin, normals[b].dot(qb));
        for (std::size_t j = 0; j < poses.size(); ++j) {
            if (j == b) continue;
            const Vec3& qj = poses[j].position;
            if (j > b) r.min_distance.margin = std::min(r.min_distance.margin, (qb - qj).norm() - d_min);
            r.no_mutual_reflection.margin = std::min(r.no_mutual_reflection.margin, -normals[b].dot(qj - qb));
        }
    }
    for (ConstraintCheck* c : {&r.in_region, &r.min_distance, &r.no_mutual_reflection, &r.faces_away})
        c->pass = c->margin >= -slack;
    return r;
}

} // namespace p6d
