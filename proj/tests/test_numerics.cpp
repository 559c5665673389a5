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

#include "p6d/numerics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace p6d;

namespace {

LinearProgram random_lp(test::Gen& g, bool origin_feasible) {
    LinearProgram lp;
    lp.objective = g.vec3(-1.0, 1.0);
    const int rows = g.integer(0, 6);
    for (int r = 0; r < rows; ++r) {
        const Vec3 a = g.vec3(-1.0, 1.0);
        lp.add_row(a, origin_feasible ? g.uniform(0.0, 1.0) : g.uniform(-1.0, 1.0));
    }
    if (g.integer(0, 3) == 0) {
        const double half = g.uniform(0.1, 1.0);
        lp.lower = Vec3::Constant(-half);
        lp.upper = Vec3::Constant(half);
    }
    return lp;
}

} // namespace

TEST_CASE("hermitian_solve") {
    test::Gen g(50);
    const CMat B = g.cmat(4, 3);
    CHECK((hermitian_solve(CMat::Identity(4, 4), B) - B).norm() == 0.0);
    const CMat X = hermitian_solve(2.0 * CMat::Identity(3, 3), CMat::Identity(3, 3));
    CHECK((X - 0.5 * CMat::Identity(3, 3)).norm() < 1e-15);

    for (int trial = 0; trial < 100; ++trial) {
        const int m = g.integer(1, 8);
        const CMat R = g.cmat(m, m);
        const CMat A = R * R.adjoint() + 0.1 * CMat::Identity(m, m);
        const CMat rhs = g.cmat(m, g.integer(1, 4));
        const CMat sol = hermitian_solve(A, rhs);
        CHECK((A * sol - rhs).norm() <= 1e-9 * rhs.norm());
    }

    CMat indefinite = CMat::Identity(2, 2);
    indefinite(1, 1) = -1.0;
    CHECK_THROWS_AS(hermitian_solve(indefinite, B.topRows(2)), NumericalFailure);
    CMat skew = CMat::Identity(2, 2);
    skew(0, 1) = cplx(0.5, 0.0);
    CHECK_THROWS_AS(hermitian_solve(skew, B.topRows(2)), NumericalFailure);
    CHECK_THROWS_AS(hermitian_solve(CMat::Zero(2, 2), B.topRows(2)), NumericalFailure);
    CHECK_THROWS_AS(hermitian_solve(CMat::Identity(3, 3), B), std::invalid_argument);
}

TEST_CASE("lp_solve examples") {
    SUBCASE("single effective coordinate, no rows") {
        LinearProgram lp;
        lp.objective = Vec3(-1.0, 0.0, 0.0);
        const LpResult r = lp_solve(lp);
        REQUIRE(r.ok());
        CHECK(r.x[0] == doctest::Approx(1.0));
        CHECK(r.value == doctest::Approx(-1.0));
    }
    SUBCASE("one lower-bounding row") {
        LinearProgram lp;
        lp.objective = Vec3(1.0, 0.0, 0.0);
        lp.add_row(Vec3(-1.0, 0.0, 0.0), -0.5);
        const LpResult r = lp_solve(lp);
        REQUIRE(r.ok());
        CHECK(r.x[0] == doctest::Approx(0.5));
    }
    SUBCASE("contradictory rows are infeasible") {
        LinearProgram lp;
        lp.objective = Vec3(0.0, 1.0, 0.0);
        lp.add_row(Vec3(1.0, 0.0, 0.0), 0.2);
        lp.add_row(Vec3(-1.0, 0.0, 0.0), -0.5);
        CHECK(lp_solve(lp).status == LpStatus::infeasible);
    }
    SUBCASE("zero objective returns a feasible vertex") {
        LinearProgram lp;
        const LpResult r = lp_solve(lp);
        REQUIRE(r.ok());
        CHECK(r.value == 0.0);
        CHECK(lp.max_violation(r.x) <= 1e-9);
    }
    SUBCASE("inverted bounds are rejected") {
        LinearProgram lp;
        lp.lower[2] = 2.0;
        CHECK_THROWS_AS(lp_solve(lp), std::invalid_argument);
    }
}

TEST_CASE("lp_solve matches the extended-precision vertex oracle") {
    test::Gen g(51);
    int infeasible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const LinearProgram lp = random_lp(g, trial % 4 != 0);
        const LpResult r = lp_solve(lp);
        const auto oracle = test::vertex_oracle(lp);
        REQUIRE(r.ok() == oracle.has_value());
        if (!r.ok()) {
            ++infeasible;
            continue;
        }
        CHECK(std::abs(r.value - static_cast<double>(*oracle)) <= 1e-9 * (1.0 + std::abs(r.value)));
        CHECK(lp.max_violation(r.x) <= 1e-9);
        CHECK(std::abs(lp.objective.dot(r.x) - r.value) <= 1e-12);
        // no sampled feasible point beats the reported optimum
        for (int s = 0; s < 50; ++s) {
            const Vec3 p = lp.lower + (g.vec3(0.0, 1.0).array() * (lp.upper - lp.lower).array()).matrix();
            if (lp.max_violation(p) <= 0.0) CHECK(lp.objective.dot(p) >= r.value - 1e-12);
        }
    }
    CHECK(infeasible > 0);
}

TEST_CASE("finite_diff_gradient") {
    const ScalarField3 sq = [](const Vec3& x) { return x.squaredNorm(); };
    CHECK((finite_diff_gradient(sq, Vec3(1, 2, 3), 1e-5) - Vec3(2, 4, 6)).norm() < 1e-6);
    const ScalarField3 constant = [](const Vec3&) { return 4.2; };
    CHECK(finite_diff_gradient(constant, Vec3(0.3, -1, 7), 1e-4).isZero(0.0));
    const Vec3 c(0.5, -2.0, 3.25);
    const ScalarField3 linear = [&](const Vec3& x) { return c.dot(x); };
    CHECK((finite_diff_gradient(linear, Vec3(0.1, 0.2, 0.3), 1e-4) - c).norm() < 1e-10);

    test::Gen g(52);
    const ScalarField3 smooth = [](const Vec3& x) { return std::sin(x[0]) * std::exp(0.3 * x[1]) + x[2] * x[2] * x[0]; };
    for (int i = 0; i < 100; ++i) {
        const Vec3 x = g.vec3(-2.0, 2.0);
        const Vec3 exact(std::cos(x[0]) * std::exp(0.3 * x[1]) + x[2] * x[2], 0.3 * std::sin(x[0]) * std::exp(0.3 * x[1]),
                         2.0 * x[2] * x[0]);
        const Vec3 fd = finite_diff_gradient(smooth, x, 1e-5);
        CHECK((fd - exact).norm() <= 1e-5 * std::max(1.0, exact.norm()));
    }

    const ScalarField3 blowup = [](const Vec3& x) { return x[0] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0; };
    CHECK_THROWS_AS(finite_diff_gradient(blowup, Vec3::Zero(), 1e-3), NumericalFailure);
    CHECK_THROWS_AS(finite_diff_gradient(sq, Vec3::Zero(), 0.0), std::invalid_argument);
}

TEST_CASE("armijo_step") {
    const StepRule rule;
    SUBCASE("linear increase accepts the full step") {
        const Vec3 c(1.0, 2.0, 0.0);
        const ScalarField3 f = [&](const Vec3& x) { return c.dot(x); };
        const StepResult r = armijo_step(f, Vec3::Zero(), 0.0, c, Vec3(1.0, 0.0, 0.0), rule);
        CHECK(r.step == 1.0);
        CHECK(r.point == Vec3(1.0, 0.0, 0.0));
    }
    SUBCASE("zero direction leaves the point unchanged") {
        const ScalarField3 f = [](const Vec3& x) { return x.sum(); };
        const Vec3 x(0.2, 0.3, 0.4);
        const StepResult r = armijo_step(f, x, f(x), Vec3::Ones(), Vec3::Zero(), rule);
        CHECK(r.point == x);
        CHECK(r.value == f(x));
    }
    SUBCASE("concave quadratic backtracks to a strict increase") {
        const ScalarField3 f = [](const Vec3& x) { return -x.squaredNorm(); };
        const Vec3 x(1.0, 0.0, 0.0);
        const Vec3 grad(-2.0, 0.0, 0.0);
        const StepResult r = armijo_step(f, x, f(x), grad, Vec3(-1.0, 0.0, 0.0), rule);
        CHECK(r.step > 0.0);
        CHECK(r.value > f(x));
        // the full step lands on f = 0 > -1 and passes
        CHECK(r.step == 1.0);
        StepRule longer = rule;
        const StepResult r2 = armijo_step(f, x, f(x), grad, Vec3(-4.0, 0.0, 0.0), longer);
        CHECK(r2.step == 0.25);
        CHECK(r2.value == doctest::Approx(0.0));
    }
    SUBCASE("descent direction stalls") {
        const ScalarField3 f = [](const Vec3& x) { return x[0]; };
        const StepResult r = armijo_step(f, Vec3::Zero(), 0.0, Vec3(1, 0, 0), Vec3(-1, 0, 0), rule);
        CHECK(r.step == 0.0);
        CHECK(r.point == Vec3::Zero());
    }
    SUBCASE("admissibility rejects long steps") {
        const ScalarField3 f = [](const Vec3& x) { return x[0]; };
        const auto inside = [](const Vec3& x) { return x[0] <= 0.3; };
        const StepResult r = armijo_step(f, Vec3::Zero(), 0.0, Vec3(1, 0, 0), Vec3(1, 0, 0), rule, inside);
        CHECK(r.step == 0.25);
    }
    SUBCASE("never decreases the objective") {
        test::Gen g(53);
        const ScalarField3 f = [](const Vec3& x) { return std::sin(3.0 * x[0]) + std::cos(2.0 * x[1] - x[2]); };
        for (int i = 0; i < 500; ++i) {
            const Vec3 x = g.vec3(-3.0, 3.0);
            const Vec3 grad = finite_diff_gradient(f, x, 1e-6);
            const Vec3 d = g.vec3(-1.0, 1.0);
            const StepResult r = armijo_step(f, x, f(x), grad, d, rule);
            CHECK(r.value >= f(x));
        }
    }
    SUBCASE("rule validation") {
        StepRule bad;
        bad.sufficient_decrease = 1.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = StepRule{};
        bad.backtrack = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        CHECK_NOTHROW(StepRule{}.validate());
    }
}
