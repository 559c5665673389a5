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
#include "test_support.hpp"

#include <doctest.h>

using namespace p6d;

TEST_CASE("rotation_matrix: identity and quarter turn") {
    CHECK(rotation_matrix(Vec3::Zero()).isApprox(Mat3::Identity(), 0.0));
    const Vec3 y = rotation_matrix(Vec3(0, 0, kPi / 2)) * Vec3::UnitX();
    CHECK((y - Vec3::UnitY()).norm() < 1e-15);
}

TEST_CASE("rotation_matrix: orthonormal with det +1 on 1000 random triples") {
    test::Gen g(11);
    for (int i = 0; i < 1000; ++i) {
        const Mat3 r = rotation_matrix(g.vec3(0.0, kTwoPi));
        CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
    }
}

TEST_CASE("rotation_matrix: composition order is z after y after x") {
    // rotating (0,0,1) by x then y must differ from y then x; pin the order
    const double a = 0.3, b = 0.7, c = 1.1;
    const Eigen::AngleAxisd rx(a, Vec3::UnitX()), ry(b, Vec3::UnitY()), rz(c, Vec3::UnitZ());
    const Mat3 expected = (rz * ry * rx).toRotationMatrix();
    CHECK((rotation_matrix(Vec3(a, b, c)) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rotation_matrix rejects non-finite angles") {
    CHECK_THROWS_AS(rotation_matrix(Vec3(std::nan(""), 0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(rotation_matrix(Vec3(0, INFINITY, 0)), std::invalid_argument);
}

TEST_CASE("surface_normal") {
    CHECK((surface_normal(SurfacePose{}) - Vec3::UnitX()).norm() < 1e-15);
    SurfacePose half;
    half.rotation = Vec3(0, 0, kPi);
    CHECK((surface_normal(half) + Vec3::UnitX()).norm() < 1e-15);
    test::Gen g(12);
    for (int i = 0; i < 200; ++i) CHECK(std::abs(surface_normal(g.pose()).norm() - 1.0) < 1e-12);
}

TEST_CASE("normal_jacobian matches finite differences of the normal") {
    test::Gen g(13);
    for (int i = 0; i < 100; ++i) {
        const Vec3 u = g.vec3(0.0, kTwoPi);
        const Mat3 j = normal_jacobian(u);
        for (int c = 0; c < 3; ++c) {
            const double h = 1e-6;
            SurfacePose a, b;
            a.rotation = u + h * Vec3::Unit(c);
            b.rotation = u - h * Vec3::Unit(c);
            const Vec3 fd = (surface_normal(a) - surface_normal(b)) / (2 * h);
            CHECK((fd - j.col(c)).norm() < 1e-8);
        }
    }
}

TEST_CASE("rotation_towards reproduces the requested normal") {
    test::Gen g(14);
    for (int i = 0; i < 200; ++i) {
        const Vec3 n = g.unit();
        SurfacePose p;
        p.rotation = rotation_towards(n, g.uniform(0.0, kTwoPi));
        CHECK((surface_normal(p) - n).norm() < 1e-12);
        CHECK((p.rotation.array() >= 0.0).all());
        CHECK((p.rotation.array() < kTwoPi).all());
    }
}

TEST_CASE("normalized wraps angles into [0, 2pi)") {
    SurfacePose p;
    p.rotation = Vec3(-0.5, 7.0, -1e-18);
    const SurfacePose n = p.normalized();
    CHECK(n.rotation.x() == doctest::Approx(kTwoPi - 0.5));
    CHECK(n.rotation.y() == doctest::Approx(7.0 - kTwoPi));
    CHECK(n.rotation.z() >= 0.0);
    CHECK(n.rotation.z() < kTwoPi);
}

TEST_CASE("layout: N = nx * ny, centered, half-wavelength pitch on the y-z plane") {
    const LocalLayout l = LocalLayout::upa(4, 3, 0.125);
    CHECK(l.size() == 12);
    Vec3 mean = Vec3::Zero();
    for (const auto& o : l.offsets()) {
        mean += o;
        CHECK(o.x() == 0.0);
    }
    CHECK((mean / 12.0).norm() < 1e-15);
    CHECK((l.offset(1) - l.offset(0)).norm() == doctest::Approx(0.0625));
    CHECK_THROWS_AS(l.offset(12), std::out_of_range);
    CHECK_THROWS_AS(l.offset(-1), std::out_of_range);
    CHECK_THROWS_AS(LocalLayout(0, 2, 0.1), std::invalid_argument);
}

TEST_CASE("element_position") {
    const LocalLayout l = LocalLayout::upa(2, 2, 0.125);
    for (int n = 0; n < l.size(); ++n) CHECK((element_position(SurfacePose{}, l, n) - l.offset(n)).norm() == 0.0);

    const LocalLayout single = LocalLayout::upa(1, 1, 0.125);
    SurfacePose p;
    p.position = Vec3(0.3, -0.2, 0.9);
    p.rotation = Vec3(1.0, 2.0, 3.0);
    CHECK((element_position(p, single, 0) - p.position).norm() == 0.0);

    // hand-expanded R(u) r + q
    test::Gen g(15);
    for (int i = 0; i < 100; ++i) {
        const SurfacePose q = g.pose();
        const auto [a, b, c] = std::tuple(q.rotation.x(), q.rotation.y(), q.rotation.z());
        const Vec3 r = l.offset(i % 4);
        const Vec3 rx(r.x(), std::cos(a) * r.y() - std::sin(a) * r.z(), std::sin(a) * r.y() + std::cos(a) * r.z());
        const Vec3 ry(std::cos(b) * rx.x() + std::sin(b) * rx.z(), rx.y(), -std::sin(b) * rx.x() + std::cos(b) * rx.z());
        const Vec3 rz(std::cos(c) * ry.x() - std::sin(c) * ry.y(), std::sin(c) * ry.x() + std::cos(c) * ry.y(), ry.z());
        CHECK((element_position(q, l, i % 4) - (rz + q.position)).norm() < 1e-12);
    }
}

TEST_CASE("element distances are rotation invariant") {
    const LocalLayout l = LocalLayout::upa(3, 2, 0.125);
    test::Gen g(16);
    for (int i = 0; i < 200; ++i) {
        const SurfacePose p = g.pose();
        const int n = g.integer(0, 5), m = g.integer(0, 5);
        const double d = (element_position(p, l, n) - element_position(p, l, m)).norm();
        CHECK(std::abs(d - (l.offset(n) - l.offset(m)).norm()) < 1e-12);
    }
}

TEST_CASE("direction_vector") {
    CHECK((direction_vector(0.0, 1.234) - Vec3::UnitZ()).norm() < 1e-15);
    CHECK((direction_vector(kPi / 2, 0.0) - Vec3::UnitX()).norm() < 1e-15);
    test::Gen g(17);
    for (int i = 0; i < 500; ++i)
        CHECK(std::abs(direction_vector(g.uniform(-10, 10), g.uniform(-10, 10)).norm() - 1.0) < 1e-12);
}

TEST_CASE("feasibility_check: constructed violations and passes") {
    const SiteRegion region;
    const double d_min = 0.2;

    SUBCASE("too close") {
        std::vector<SurfacePose> poses(2);
        poses[0].position = Vec3(1.5, 0.0, 0.0);
        poses[1].position = Vec3(1.5, 0.0, 0.1);
        const auto r = feasibility_check(poses, region, d_min);
        CHECK_FALSE(r.min_distance.pass);
        CHECK(r.min_distance.margin == doctest::Approx(-0.1));
        CHECK_FALSE(r.feasible());
    }
    SUBCASE("single surface facing away from the origin") {
        std::vector<SurfacePose> poses(1);
        poses[0].position = Vec3(1.0, 0.0, 0.0);
        const auto r = feasibility_check(poses, region, d_min);
        CHECK(r.min_distance.pass);
        CHECK(r.no_mutual_reflection.pass);
        CHECK(std::isinf(r.min_distance.margin));
        CHECK(r.faces_away.pass);
        CHECK(r.faces_away.margin == doctest::Approx(1.0));
        CHECK(r.in_region.pass);
        CHECK(r.in_region.margin == doctest::Approx(0.0));
    }
    SUBCASE("facing the reference point") {
        std::vector<SurfacePose> poses(1);
        poses[0].position = Vec3(1.0, 0.0, 0.0);
        poses[0].rotation = Vec3(0.0, 0.0, kPi);
        const auto r = feasibility_check(poses, region, d_min);
        CHECK_FALSE(r.faces_away.pass);
        CHECK(r.faces_away.margin == doctest::Approx(-1.0));
    }
    SUBCASE("outside the cube") {
        std::vector<SurfacePose> poses(1);
        poses[0].position = Vec3(2.2, 0.0, 0.0);
        const auto r = feasibility_check(poses, region, d_min);
        CHECK_FALSE(r.in_region.pass);
        CHECK(r.in_region.margin == doctest::Approx(-0.2));
    }
    SUBCASE("mutual reflection") {
        std::vector<SurfacePose> poses(2);
        poses[0].position = Vec3(1.5, 0.0, 0.0);
        poses[1].position = Vec3(1.8, 0.0, 0.0); // in front of surface 0
        const auto r = feasibility_check(poses, region, d_min);
        CHECK_FALSE(r.no_mutual_reflection.pass);
        CHECK(r.no_mutual_reflection.margin == doctest::Approx(-0.3));
    }
}

TEST_CASE("feasibility_check: distance criterion symmetric under pose swap") {
    test::Gen g(18);
    const SiteRegion region;
    for (int i = 0; i < 100; ++i) {
        std::vector<SurfacePose> poses{g.pose(), g.pose(), g.pose()};
        const auto a = feasibility_check(poses, region, 0.5);
        std::swap(poses[0], poses[2]);
        const auto b = feasibility_check(poses, region, 0.5);
        CHECK(a.min_distance.pass == b.min_distance.pass);
        CHECK(a.min_distance.margin == b.min_distance.margin);
    }
}
