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
#include "test_support.hpp"

#include <doctest.h>

using namespace p6d;

namespace {
constexpr double kLambda = 0.125;
}

TEST_CASE("directive gain: normal incidence gives pi for A = (lambda/2)^2") {
    const auto pat = RadiationPattern::make(PatternKind::directive, kLambda);
    test::Gen g(21);
    for (int i = 0; i < 50; ++i) {
        const SurfacePose p = g.pose();
        const Vec3 n = surface_normal(p);
        CHECK(std::abs(incident_gain(pat, p, -n) - kPi) < 1e-12);
        CHECK(std::abs(reflective_gain(pat, p, -n) - kPi) < 1e-12);
    }
}

TEST_CASE("directive gain is zero behind and on the boundary") {
    const auto pat = RadiationPattern::make(PatternKind::directive, kLambda);
    const SurfacePose p; // normal +x
    CHECK(incident_gain(pat, p, Vec3::UnitX()) == 0.0);
    CHECK(incident_gain(pat, p, Vec3(0.6, 0.8, 0.0)) == 0.0);
    CHECK(reflective_gain(pat, p, Vec3::UnitY()) == 0.0); // grazing
    CHECK(reflective_gain(pat, p, Vec3::UnitZ()) == 0.0);
}

TEST_CASE("isotropic gain is 2 pi on the front side and 0 behind") {
    const auto pat = RadiationPattern::make(PatternKind::isotropic, kLambda);
    const auto dir = RadiationPattern::make(PatternKind::directive, kLambda);
    const SurfacePose p;
    test::Gen g(22);
    for (int i = 0; i < 200; ++i) {
        const Vec3 f = g.unit();
        const double gi = incident_gain(pat, p, f);
        if (-f.x() > 0.0) {
            CHECK(std::abs(gi - 2.0 * kPi) < 1e-12);
            CHECK(std::abs(gi - 2.0 * incident_gain(dir, p, -surface_normal(p))) < 1e-12);
        } else {
            CHECK(gi == 0.0);
        }
    }
}

TEST_CASE("directive gain: bounded by 4 pi A / lambda^2 and monotone in the cosine") {
    const auto pat = RadiationPattern::make(PatternKind::directive, kLambda);
    const SurfacePose p;
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double c = i / 100.0;
        const Vec3 f(-c, -std::sqrt(1.0 - c * c), 0.0);
        const double gain = incident_gain(pat, p, f);
        CHECK(gain >= prev);
        CHECK(gain <= pat.peak_directive_gain() + 1e-12);
        prev = gain;
    }
}

TEST_CASE("directive gain is maximized by facing the arrival direction (rotation grid)") {
    const auto pat = RadiationPattern::make(PatternKind::directive, kLambda);
    const Vec3 f = direction_vector(0.9, 3.6);
    double best = -1.0;
    Vec3 best_normal;
    constexpr int kSteps = 180;
    for (int i = 0; i < kSteps; ++i) {
        for (int j = 0; j < kSteps; ++j) {
            SurfacePose p;
            p.rotation = Vec3(0.0, -kPi / 2 + kPi * i / (kSteps - 1), kTwoPi * j / kSteps);
            const double gain = incident_gain(pat, p, f);
            if (gain > best) {
                best = gain;
                best_normal = surface_normal(p);
            }
        }
    }
    CHECK(best_normal.dot(-f) > std::cos(2.0 * kPi / 180.0));
    CHECK(best <= kPi + 1e-12);
    CHECK(best > 0.99 * kPi);
}

TEST_CASE("radiation pattern errors") {
    const auto pat = RadiationPattern::make(PatternKind::directive, kLambda);
    CHECK_THROWS_AS(incident_gain(pat, SurfacePose{}, Vec3(1.0, 1.0, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(RadiationPattern::make(PatternKind::directive, 0.0), std::invalid_argument);
    RadiationPattern bad{PatternKind::directive, -1.0, kLambda};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(pattern_from_string("isotropic") == PatternKind::isotropic);
    CHECK_THROWS_AS(pattern_from_string("omni"), std::invalid_argument);
}
