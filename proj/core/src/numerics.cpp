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

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace p6d {

CMat hermitian_solve(const CMat& A, const CMat& B) {
    if (A.rows() != A.cols() || A.rows() != B.rows())
        throw std::invalid_argument("hermitian_solve: dimension mismatch");
    if (!A.allFinite() || !B.allFinite()) throw NumericalFailure("hermitian_solve: non-finite input");
    const double scale = std::max(A.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalFailure("hermitian_solve: matrix is not Hermitian");
    Eigen::LLT<CMat> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalFailure("hermitian_solve: matrix is not positive definite");
    CMat X = llt.solve(B);
    const double bnorm = B.norm();
    if (bnorm > 0.0 && (A * X - B).norm() > 1e-9 * bnorm)
        throw NumericalFailure("hermitian_solve: residual too large (ill-conditioned system)");
    return X;
}

double LinearProgram::max_violation(const Vec3& d) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) worst = std::max(worst, r.a.dot(d) - r.b);
    worst = std::max(worst, (lower - d).maxCoeff());
    worst = std::max(worst, (d - upper).maxCoeff());
    return worst;
}

LpResult lp_solve(const LinearProgram& lp) {
    if ((lp.lower.array() > lp.upper.array()).any()) throw std::invalid_argument("lp_solve: lower bound above upper");

    std::vector<LpRow> all = lp.rows;
    for (int i = 0; i < 3; ++i) {
        all.push_back({Vec3::Unit(i), lp.upper[i]});
        all.push_back({-Vec3::Unit(i), -lp.lower[i]});
    }
    // Per-row feasibility tolerance relative to the row's own scale.
    std::vector<double> tol(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) tol[i] = 1e-10 * (1.0 + std::abs(all[i].b) + all[i].a.lpNorm<1>());

    LpResult best;
    best.value = std::numeric_limits<double>::infinity();
    const std::size_t m = all.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                Mat3 a;
                a.row(0) = all[i].a.transpose();
                a.row(1) = all[j].a.transpose();
                a.row(2) = all[k].a.transpose();
                const double det = a.determinant();
                const double scale = all[i].a.norm() * all[j].a.norm() * all[k].a.norm();
                if (!(std::abs(det) > 1e-12 * scale)) continue;
                const Vec3 x = a.partialPivLu().solve(Vec3(all[i].b, all[j].b, all[k].b));
                if (!x.allFinite()) continue;
                bool feasible = true;
                for (std::size_t r = 0; r < m && feasible; ++r)
                    feasible = all[r].a.dot(x) - all[r].b <= tol[r];
                if (!feasible) continue;
                const double value = lp.objective.dot(x);
                if (value < best.value) {
                    best.value = value;
                    best.x = x;
                    best.status = LpStatus::optimal;
                }
            }
        }
    }
    if (!best.ok()) best.value = 0.0;
    return best;
}

Vec3 finite_diff_gradient(const ScalarField3& f, const Vec3& x, double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("finite_diff_gradient: step must be positive");
    Vec3 g;
    for (int j = 0; j < 3; ++j) {
        const Vec3 e = Vec3::Unit(j) * xi;
        const double hi = f(x + e);
        const double lo = f(x - e);
        if (!std::isfinite(hi) || !std::isfinite(lo))
            throw NumericalFailure("finite_diff_gradient: non-finite function value");
        g[j] = (hi - lo) / (2.0 * xi);
    }
    return g;
}

void StepRule::validate() const {
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
        throw std::invalid_argument("step rule: c1 must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw std::invalid_argument("step rule: backtrack factor must lie in (0, 1)");
    if (max_backtracks < 0) throw std::invalid_argument("step rule: max backtracks must be non-negative");
    if (!(initial_step > 0.0 && initial_step <= 1.0)) throw std::invalid_argument("step rule: initial step must lie in (0, 1]");
}

StepResult armijo_step(const ScalarField3& f, const Vec3& x, double fx, const Vec3& grad, const Vec3& d,
                       const StepRule& rule, const std::function<bool(const Vec3&)>& admissible) {
    StepResult stalled{0.0, x, fx};
    const double slope = grad.dot(d);
    if (!(slope > 0.0) || d.isZero(0.0)) return stalled;

    double step = rule.initial_step;
    for (int m = 0; m <= rule.max_backtracks; ++m, step *= rule.backtrack) {
        const Vec3 trial = x + step * d;
        if (admissible && !admissible(trial)) continue;
        const double value = f(trial);
        if (std::isfinite(value) && value >= fx + rule.sufficient_decrease * step * slope)
            return {step, trial, value};
    }
    return stalled;
}

} // namespace p6d
