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

#include "p6d/radiation.hpp"

#include <cmath>
#include <string>

namespace p6d {

namespace {
constexpr double kUnitTolerance = 1e-9;

void require_unit(const Vec3& v, const char* what) {
    if (!v.allFinite() || std::abs(v.norm() - 1.0) > kUnitTolerance)
        throw std::invalid_argument(std::string(what) + " must be a unit vector");
}
} // namespace

std::string_view to_string(PatternKind kind) {
    return kind == PatternKind::directive ? "directive" : "isotropic";
}

PatternKind pattern_from_string(std::string_view name) {
    if (name == "directive") return PatternKind::directive;
    if (name == "isotropic") return PatternKind::isotropic;
    throw std::invalid_argument("unknown radiation pattern '" + std::string(name) + "'");
}

RadiationPattern RadiationPattern::make(PatternKind kind, double wavelength) {
    RadiationPattern p{kind, 0.25 * wavelength * wavelength, wavelength};
    p.validate();
    return p;
}

void RadiationPattern::validate() const {
    if (!(element_area > 0.0) || !std::isfinite(element_area))
        throw std::invalid_argument("element area must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        throw std::invalid_argument("wavelength must be positive");
}

double RadiationPattern::peak_directive_gain() const {
    return element_area * 4.0 * kPi / (wavelength * wavelength);
}

double RadiationPattern::gain(const Vec3& normal, const Vec3& direction) const {
    require_unit(direction, "propagation direction");
    const double cosine = -normal.dot(direction);
    if (!(cosine > 0.0)) return 0.0;
    const double aperture = wavelength * wavelength / (4.0 * kPi);
    const double factor = kind == PatternKind::directive ? cosine : 2.0;
    return element_area * factor / aperture;
}

double incident_gain(const RadiationPattern& pattern, const SurfacePose& pose, const Vec3& doa) {
    return pattern.gain(surface_normal(pose), doa);
}

double reflective_gain(const RadiationPattern& pattern, const SurfacePose& pose, const Vec3& dod) {
    return pattern.gain(surface_normal(pose), dod);
}

} // namespace p6d
