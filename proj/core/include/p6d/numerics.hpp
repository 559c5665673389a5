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

#include <functional>
#include <optional>
#include <vector>

namespace p6d {

// Solves A X = B for Hermitian positive-definite A (Cholesky).
// Throws NumericalFailure when A is not numerically PD.
CMat hermitian_solve(const CMat& A, const CMat& B);

// a^T d <= b
struct LpRow {
    Vec3 a = Vec3::Zero();
    double b = 0.0;
};

// minimize c^T d  s.t.  rows, lower <= d <= upper.
struct LinearProgram {
    Vec3 objective = Vec3::Zero();
    std::vector<LpRow> rows;
    Vec3 lower = Vec3::Constant(-1.0);
    Vec3 upper = Vec3::Constant(1.0);

    void add_row(const Vec3& a, double b) { rows.push_back({a, b}); }
    // Largest violation of any row or bound at d (<= 0 means feasible).
    double max_violation(const Vec3& d) const;
};

enum class LpStatus { optimal, infeasible };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vec3 x = Vec3::Zero();
    double value = 0.0;

    bool ok() const { return status == LpStatus::optimal; }
};

// Exact vertex enumeration over all 3-row active sets (bounds included).
LpResult lp_solve(const LinearProgram& lp);

using ScalarField3 = std::function<double(const Vec3&)>;

// Central differences with step xi along each axis.
Vec3 finite_diff_gradient(const ScalarField3& f, const Vec3& x, double xi);

struct StepRule {
    double sufficient_decrease = 1e-4; // c1
    double backtrack = 0.5;
    int max_backtracks = 30;
    double initial_step = 1.0;

    void validate() const;
};

struct StepResult {
    double step = 0.0; // 0 signals a stall
    Vec3 point = Vec3::Zero();
    double value = 0.0;
};

// Backtracking Armijo search for an ascent step: accepts the largest
// step = initial * backtrack^m with f(x + step d) >= fx + c1 step grad^T d.
// `admissible`, when set, must also hold at the trial point.
StepResult armijo_step(const ScalarField3& f, const Vec3& x, double fx, const Vec3& grad, const Vec3& d,
                       const StepRule& rule, const std::function<bool(const Vec3&)>& admissible = {});

} // namespace p6d
