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

#include <string_view>

namespace p6d {

enum class PatternKind { directive, isotropic };

std::string_view to_string(PatternKind kind);
PatternKind pattern_from_string(std::string_view name);

// Per-element radiation pattern. `isotropic` is the half-space variant:
// constant gain on the front side, zero behind the surface.
struct RadiationPattern {
    PatternKind kind = PatternKind::directive;
    double element_area = 0.0; // m^2
    double wavelength = 0.0;   // m

    // Element area defaults to (lambda/2)^2.
    static RadiationPattern make(PatternKind kind, double wavelength);

    void validate() const;
    double peak_directive_gain() const;

    // Gain for a wave travelling along `direction` onto a surface with outward
    // normal `normal`. Both must be unit vectors.
    double gain(const Vec3& normal, const Vec3& direction) const;
};

double incident_gain(const RadiationPattern& pattern, const SurfacePose& pose, const Vec3& doa);
double reflective_gain(const RadiationPattern& pattern, const SurfacePose& pose, const Vec3& dod);

} // namespace p6d
