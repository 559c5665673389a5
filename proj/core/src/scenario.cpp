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

#include "p6d/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace p6d {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kUserTag = 1;
constexpr std::uint64_t kBsTag = 2;
constexpr std::uint64_t kPoseTag = 3;
constexpr std::uint64_t kPhaseTag = 4;

constexpr int kMaxPlacementAttempts = 10000;
constexpr double kCapHalfAngle = kPi / 4;
constexpr double kRadiusFraction = 0.4; // of the cube side
constexpr double kJitter = 0.05;        // rad, yaw/pitch perturbation

void require_range(const AngleRange& r, const char* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
        throw ConfigError(std::string("invalid angle range for ") + name);
}

Vec3 mean_reversed_direction(const AngleRange& elev, const AngleRange& azim) {
    constexpr int kGrid = 64;
    Vec3 acc = Vec3::Zero();
    for (int i = 0; i < kGrid; ++i) {
        const double e = elev.lo + (i + 0.5) * (elev.hi - elev.lo) / kGrid;
        for (int j = 0; j < kGrid; ++j) {
            const double a = azim.lo + (j + 0.5) * (azim.hi - azim.lo) / kGrid;
            acc -= direction_vector(e, a);
        }
    }
    return acc / (kGrid * kGrid);
}

Vec3 normalized_or(const Vec3& v, const Vec3& fallback) {
    const double n = v.norm();
    return n > 1e-12 ? Vec3(v / n) : fallback;
}

Vec3 bisector(const Vec3& arrival, const Vec3& departure) {
    const Vec3 a = normalized_or(arrival, Vec3::UnitX());
    const Vec3 d = normalized_or(departure, Vec3::UnitX());
    return normalized_or(a + d, a);
}

} // namespace

double dbm_to_watts(double dbm) {
    if (!std::isfinite(dbm)) throw std::invalid_argument("dbm_to_watts: non-finite input");
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double ScenarioParams::min_distance() const {
    return d_min ? *d_min : (std::sqrt(2.0) / 2.0 + 0.1) * wavelength;
}

void ScenarioParams::validate() const {
    if (bs_antennas < 1 || users < 1 || surfaces < 1 || elements_x < 1 || elements_y < 1 || paths_per_user < 1 ||
        bs_paths < 1)
        throw ConfigError("all counts must be at least 1");
    if (!(wavelength > 0.0)) throw ConfigError("wavelength must be positive");
    if (!(los_variance > 0.0 && nlos_variance > 0.0 && bs_los_variance > 0.0 && bs_nlos_variance > 0.0))
        throw ConfigError("gain variances must be positive");
    require_range(user_elevation, "user elevation");
    require_range(user_azimuth, "user azimuth");
    require_range(bs_arrival, "BS arrival");
    require_range(bs_elevation, "BS elevation");
    require_range(bs_azimuth, "BS azimuth");
    if (!std::isfinite(power_dbm) || !std::isfinite(noise_dbm)) throw ConfigError("powers must be finite");
    if (!(min_distance() >= 0.0)) throw ConfigError("d_min must be non-negative");
    try {
        region.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = splitmix(seed);
    k = splitmix(k ^ (tag * 0xd1b54a32d192ed03ULL));
    k = splitmix(k ^ (a * 0xaef17502108ef2d9ULL));
    key_ = splitmix(k ^ (b * 0xf58a5ec1e6e3a1c5ULL));
}

std::uint64_t RandomStream::next() {
    return splitmix(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
}

double RandomStream::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double RandomStream::normal() {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

cplx RandomStream::complex_normal(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed) {
    params.validate();
    Scenario sc;
    sc.wavelength = params.wavelength;
    sc.bs_antennas = params.bs_antennas;
    sc.user_paths.resize(static_cast<std::size_t>(params.users));
    for (int k = 0; k < params.users; ++k) {
        auto& paths = sc.user_paths[static_cast<std::size_t>(k)];
        for (int l = 0; l < params.paths_per_user; ++l) {
            RandomStream rs(seed, kUserTag, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l));
            UserPath p;
            p.gain = rs.complex_normal(l == 0 ? params.los_variance : params.nlos_variance);
            p.elevation = rs.uniform(params.user_elevation);
            p.azimuth = rs.uniform(params.user_azimuth);
            paths.push_back(p);
        }
    }
    for (int p = 0; p < params.bs_paths; ++p) {
        RandomStream rs(seed, kBsTag, static_cast<std::uint64_t>(p));
        BsPath path;
        path.gain = rs.complex_normal(p == 0 ? params.bs_los_variance : params.bs_nlos_variance);
        path.elevation = rs.uniform(params.bs_elevation);
        path.azimuth = rs.uniform(params.bs_azimuth);
        path.arrival = rs.uniform(params.bs_arrival);
        sc.bs_paths.push_back(path);
    }
    sc.powers = RVec::Constant(params.users, dbm_to_watts(params.power_dbm));
    sc.noise_power = dbm_to_watts(params.noise_dbm);
    return sc;
}

Vec3 default_facing(const ScenarioParams& params) {
    return bisector(mean_reversed_direction(params.user_elevation, params.user_azimuth),
                    mean_reversed_direction(params.bs_elevation, params.bs_azimuth));
}

Vec3 scenario_facing(const Scenario& scenario) {
    Vec3 arrival = Vec3::Zero();
    for (const auto& paths : scenario.user_paths)
        for (const auto& p : paths) arrival -= p.direction();
    Vec3 departure = Vec3::Zero();
    for (const auto& p : scenario.bs_paths) departure -= p.direction();
    return bisector(arrival, departure);
}

std::vector<SurfacePose> init_poses(const ScenarioParams& params, std::uint64_t seed, std::optional<Vec3> facing) {
    params.validate();
    const SiteRegion& region = params.region;
    const double d_min = params.min_distance();
    const double radius = kRadiusFraction * region.side;
    const Vec3 axis = normalized_or(facing ? *facing : default_facing(params), Vec3::UnitX());

    // orthonormal frame around the cap axis
    const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = axis.cross(helper).normalized();
    const Vec3 e2 = axis.cross(e1);
    const double cos_cap = std::cos(kCapHalfAngle);

    std::vector<SurfacePose> poses;
    for (int b = 0; b < params.surfaces; ++b) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            RandomStream rs(seed, kPoseTag, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(attempt));
            const double ct = rs.uniform(cos_cap, 1.0);
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            const double phi = rs.uniform(0.0, kTwoPi);
            const Vec3 m = ct * axis + st * (std::cos(phi) * e1 + std::sin(phi) * e2);
            SurfacePose pose;
            pose.position = region.center + radius * m;
            pose.rotation = rotation_towards(m, rs.uniform(0.0, kTwoPi));

            poses.push_back(pose);
            if (!feasibility_check(poses, region, d_min, 0.0).feasible()) {
                poses.pop_back();
                continue;
            }
            SurfacePose jittered = pose;
            jittered.rotation.y() += rs.uniform(-kJitter, kJitter);
            jittered.rotation.z() += rs.uniform(-kJitter, kJitter);
            poses.back() = jittered.normalized();
            if (!feasibility_check(poses, region, d_min, 0.0).feasible()) poses.back() = pose;
            placed = true;
        }
        if (!placed)
            throw ConfigError("could not place " + std::to_string(params.surfaces) +
                              " surfaces in the site region at the required spacing");
    }
    return poses;
}

SurfacePose fixed_irs_pose(const ScenarioParams& params) {
    params.validate();
    const SiteRegion& region = params.region;
    Vec3 n = default_facing(params);
    const double cn = region.center.norm();
    if (cn > 0.0) {
        const Vec3 c = region.center / cn;
        if (n.dot(c) < 0.0) n = normalized_or(n - n.dot(c) * c, c);
    }
    SurfacePose pose;
    pose.position = region.center;
    pose.rotation = rotation_towards(n);
    return pose;
}

std::vector<SurfacePose> tile_surface(const SurfacePose& pose, int tiles_x, int tiles_y, int tile_nx, int tile_ny,
                                      double pitch) {
    if (tiles_x < 1 || tiles_y < 1 || tile_nx < 1 || tile_ny < 1)
        throw std::invalid_argument("tile_surface: counts must be positive");
    if (!(pitch > 0.0)) throw std::invalid_argument("tile_surface: pitch must be positive");
    const Mat3 R = rotation_matrix(pose.rotation);
    std::vector<SurfacePose> tiles;
    tiles.reserve(static_cast<std::size_t>(tiles_x * tiles_y));
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            const Vec3 local(0.0, (tx - 0.5 * (tiles_x - 1)) * tile_nx * pitch,
                             (ty - 0.5 * (tiles_y - 1)) * tile_ny * pitch);
            SurfacePose t = pose;
            t.position = pose.position + R * local;
            tiles.push_back(t);
        }
    }
    return tiles;
}

CVec tile_phases(const CVec& theta, int tiles_x, int tiles_y, int tile_nx, int tile_ny) {
    if (tiles_x < 1 || tiles_y < 1 || tile_nx < 1 || tile_ny < 1)
        throw std::invalid_argument("tile_phases: counts must be positive");
    const int nx = tiles_x * tile_nx;
    const int per_tile = tile_nx * tile_ny;
    if (theta.size() != nx * tiles_y * tile_ny) throw std::invalid_argument("tile_phases: size mismatch");
    CVec out(theta.size());
    for (Eigen::Index n = 0; n < theta.size(); ++n) {
        const int iy = static_cast<int>(n) % nx;
        const int iz = static_cast<int>(n) / nx;
        const int b = (iz / tile_ny) * tiles_x + iy / tile_nx;
        out[b * per_tile + (iz % tile_ny) * tile_nx + iy % tile_nx] = theta[n];
    }
    return out;
}

CVec random_phases(int count, std::uint64_t seed) {
    RandomStream rs(seed, kPhaseTag);
    CVec theta(count);
    for (int i = 0; i < count; ++i) theta[i] = std::polar(1.0, rs.uniform(0.0, kTwoPi));
    return theta;
}

} // namespace p6d
