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

#include "p6d/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace p6d {

namespace {

constexpr double kAcceptSlack = 1e-10;

// Sum rate as a function of surface b's pose, everything else frozen.
class SurfaceObjective {
public:
    SurfaceObjective(int b, const AoState& state, const SystemSetup& setup)
        : b_(b), setup_(setup), W_(state.W), poses_(state.poses) {
        const int n = setup.model.elements();
        theta_b_ = state.theta.segment(b * n, n);
        const auto& blk = state.channels.blocks()[static_cast<std::size_t>(b)];
        h_rest_ = state.effective() - blk.V * theta_b_.asDiagonal() * blk.G;
    }

    double operator()(const SurfacePose& pose) const {
        const SurfaceChannels blk = surface_channels(setup_.scenario, pose, setup_.model);
        const CMat H = h_rest_ + blk.V * theta_b_.asDiagonal() * blk.G;
        return sum_rate(sinr_or_zero(W_, H, setup_.scenario.powers, setup_.scenario.noise_power));
    }

    SurfacePose with_position(const Vec3& q) const {
        SurfacePose p = poses_[static_cast<std::size_t>(b_)];
        p.position = q;
        return p;
    }
    SurfacePose with_rotation(const Vec3& u) const {
        SurfacePose p = poses_[static_cast<std::size_t>(b_)];
        p.rotation = u;
        return p;
    }

    bool feasible_with(const SurfacePose& pose) const {
        std::vector<SurfacePose> trial = poses_;
        trial[static_cast<std::size_t>(b_)] = pose;
        return feasibility_check(trial, setup_.region, setup_.d_min, kAcceptSlack).feasible();
    }

private:
    int b_;
    const SystemSetup& setup_;
    const CMat& W_;
    const std::vector<SurfacePose>& poses_;
    CVec theta_b_;
    CMat h_rest_;
};

void check_surface_index(int b, const AoState& state) {
    if (b < 0 || b >= static_cast<int>(state.poses.size())) throw std::out_of_range("surface index out of range");
}

void commit_pose(int b, AoState& state, const SystemSetup& setup, const SurfacePose& pose) {
    state.poses[static_cast<std::size_t>(b)] = pose;
    state.channels.replace_surface(b, surface_channels(setup.scenario, pose, setup.model));
}

void phase_sweep_impl(AoState& state, const SystemSetup& setup, const AoHooks* hooks) {
    const auto& sc = setup.scenario;
    const FpAuxiliaries aux = fp_auxiliaries(state.theta, state.channels, state.W, sc.powers, sc.noise_power);
    const FpQuadratic quad = fp_quadratic(state.channels, state.W, sc.powers, aux);
    for (int j = 0; j < state.theta.size(); ++j) {
        const cplx updated = phase_coordinate_update(j, quad, state.theta);
        if (hooks && hooks->on_phase) {
            const CVec before = state.theta;
            state.theta[j] = updated;
            hooks->on_phase(j, quad, before, state.theta);
        } else {
            state.theta[j] = updated;
        }
    }
}

} // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::distributed: return "distributed-6dma";
    case Scheme::centralized: return "centralized-6dma";
    case Scheme::fixed_irs: return "fixed-irs";
    }
    return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "distributed-6dma") return Scheme::distributed;
    if (name == "centralized-6dma") return Scheme::centralized;
    if (name == "fixed-irs") return Scheme::fixed_irs;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
    if (outer_iterations < 0) throw std::invalid_argument("outer iterations must be non-negative");
    if (inner_iterations < 1) throw std::invalid_argument("inner iterations must be at least 1");
    step.validate();
    if (!(position_xi_wavelengths > 0.0) || !(rotation_xi > 0.0))
        throw std::invalid_argument("finite-difference steps must be positive");
    if (!(position_box > 0.0) || !(rotation_box > 0.0)) throw std::invalid_argument("direction boxes must be positive");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
}

AoState make_state(const SystemSetup& setup, std::vector<SurfacePose> poses, CVec theta) {
    AoState s;
    s.channels = synthesize(setup.scenario, poses, setup.model);
    if (theta.size() != s.channels.V().cols())
        throw std::invalid_argument("theta must hold one coefficient per element of every surface");
    s.poses = std::move(poses);
    s.theta = std::move(theta);
    s.W = mmse_beamformer(s.effective(), setup.scenario.powers, setup.scenario.noise_power);
    return s;
}

double state_sum_rate(const SystemSetup& setup, const AoState& state) {
    return sum_rate(sinr_or_zero(state.W, state.effective(), setup.scenario.powers, setup.scenario.noise_power));
}

CMat mmse_beamformer(const CMat& H, const RVec& powers, double noise_power) {
    if (powers.size() != H.cols()) throw std::invalid_argument("mmse_beamformer: one power per column of H");
    if (!(noise_power > 0.0)) throw std::invalid_argument("mmse_beamformer: noise power must be positive");
    if (!H.allFinite()) throw NumericalFailure("mmse_beamformer: non-finite channel");
    CMat A = H * powers.cast<cplx>().asDiagonal() * H.adjoint();
    A.diagonal().array() += noise_power;
    // symmetrize away rounding before the Cholesky factorization
    A = 0.5 * (A + A.adjoint()).eval();
    return hermitian_solve(A, H);
}

LpRow linearized_min_distance(const Vec3& q_prev, const Vec3& q_j, double d_min, bool literal) {
    const Vec3 delta = q_prev - q_j;
    const double dist = delta.norm();
    if (!(dist > 0.0)) throw NumericalFailure("linearized_min_distance: coincident surface centers");
    // delta^T (q - q_j) >= rhs   <=>   -delta^T q <= -rhs - delta^T q_j
    const double rhs = literal ? d_min * dist * dist : d_min * dist;
    return {-delta, -rhs - delta.dot(q_j)};
}

Vec3 position_gradient(int b, const AoState& state, const SystemSetup& setup, double xi) {
    check_surface_index(b, state);
    const SurfaceObjective obj(b, state, setup);
    return finite_diff_gradient([&](const Vec3& q) { return obj(obj.with_position(q)); },
                                state.poses[static_cast<std::size_t>(b)].position, xi);
}

Vec3 rotation_gradient(int b, const AoState& state, const SystemSetup& setup, double xi) {
    check_surface_index(b, state);
    const SurfaceObjective obj(b, state, setup);
    return finite_diff_gradient([&](const Vec3& u) { return obj(obj.with_rotation(u)); },
                                state.poses[static_cast<std::size_t>(b)].rotation, xi);
}

StepReport position_step(int b, AoState& state, const SystemSetup& setup, const OptimizerConfig& config) {
    check_surface_index(b, state);
    const SurfaceObjective obj(b, state, setup);
    const auto f = [&](const Vec3& q) { return obj(obj.with_position(q)); };
    const SurfacePose& pose = state.poses[static_cast<std::size_t>(b)];
    const Vec3 q = pose.position;
    const Vec3 nb = surface_normal(pose);

    StepReport rep;
    rep.before = f(q);
    const Vec3 grad = finite_diff_gradient(f, q, config.position_xi_wavelengths * setup.scenario.wavelength);

    LinearProgram lp;
    lp.objective = -grad;
    const Vec3 half = Vec3::Constant(0.5 * setup.region.side);
    lp.lower = (setup.region.center - half - q).cwiseMax(-config.position_box).cwiseMin(0.0);
    lp.upper = (setup.region.center + half - q).cwiseMin(config.position_box).cwiseMax(0.0);
    for (int j = 0; j < static_cast<int>(state.poses.size()); ++j) {
        if (j == b) continue;
        const SurfacePose& other = state.poses[static_cast<std::size_t>(j)];
        const Vec3& qj = other.position;
        // rows over q become rows over d = q - q_prev
        const LpRow dist = linearized_min_distance(q, qj, setup.d_min, config.literal_distance_row);
        lp.add_row(dist.a, dist.b - dist.a.dot(q));
        lp.add_row(-nb, nb.dot(q - qj));
        const Vec3 nj = surface_normal(other);
        lp.add_row(nj, nj.dot(qj - q));
    }
    lp.add_row(-nb, nb.dot(q));

    const LpResult dir = lp_solve(lp);
    if (!dir.ok()) throw std::logic_error("position_step: feasible-direction LP infeasible at a feasible pose");
    rep.direction = dir.x;

    const StepResult step = armijo_step(f, q, rep.before, grad, dir.x, config.step,
                                        [&](const Vec3& trial) { return obj.feasible_with(obj.with_position(trial)); });
    rep.step = step.step;
    rep.after = step.value;
    if (step.step > 0.0) commit_pose(b, state, setup, obj.with_position(step.point));
    return rep;
}

StepReport rotation_step(int b, AoState& state, const SystemSetup& setup, const OptimizerConfig& config) {
    check_surface_index(b, state);
    const SurfaceObjective obj(b, state, setup);
    const auto f = [&](const Vec3& u) { return obj(obj.with_rotation(u)); };
    const SurfacePose& pose = state.poses[static_cast<std::size_t>(b)];
    const Vec3 u = pose.rotation;
    const Vec3& qb = pose.position;
    const Vec3 nb = surface_normal(pose);
    const Mat3 jac = normal_jacobian(u);

    StepReport rep;
    rep.before = f(u);
    const Vec3 grad = finite_diff_gradient(f, u, config.rotation_xi);

    // n(u + delta) ~ n(u) + J delta
    LinearProgram lp;
    lp.objective = -grad;
    lp.lower = Vec3::Constant(-config.rotation_box);
    lp.upper = Vec3::Constant(config.rotation_box);
    for (int j = 0; j < static_cast<int>(state.poses.size()); ++j) {
        if (j == b) continue;
        const Vec3 diff = state.poses[static_cast<std::size_t>(j)].position - qb;
        lp.add_row(jac.transpose() * diff, -nb.dot(diff));
    }
    lp.add_row(-(jac.transpose() * qb), nb.dot(qb));

    const LpResult dir = lp_solve(lp);
    if (!dir.ok()) throw std::logic_error("rotation_step: feasible-direction LP infeasible at a feasible pose");
    rep.direction = dir.x;

    const StepResult step = armijo_step(f, u, rep.before, grad, dir.x, config.step,
                                        [&](const Vec3& trial) { return obj.feasible_with(obj.with_rotation(trial)); });
    rep.step = step.step;
    rep.after = step.value;
    if (step.step > 0.0) commit_pose(b, state, setup, obj.with_rotation(step.point).normalized());
    return rep;
}

std::vector<CMat> cascade_matrices(const ChannelRealization& channels) {
    std::vector<CMat> a;
    a.reserve(static_cast<std::size_t>(channels.G().cols()));
    for (Eigen::Index k = 0; k < channels.G().cols(); ++k) a.push_back(channels.V() * channels.G().col(k).asDiagonal());
    return a;
}

FpAuxiliaries fp_auxiliaries(const CVec& theta, const ChannelRealization& channels, const CMat& W,
                             const RVec& powers, double noise_power) {
    const CMat H = channels.effective(theta);
    FpAuxiliaries aux;
    aux.alpha = sinr_or_zero(W, H, powers, noise_power);
    const Eigen::Index K = H.cols();
    aux.epsilon = CVec::Zero(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        // w_k^H A_j theta is w_k^H h_j
        const Eigen::RowVectorXcd proj = W.col(k).adjoint() * H;
        double den = noise_power * W.col(k).squaredNorm();
        for (Eigen::Index j = 0; j < K; ++j) den += powers[j] * std::norm(proj[j]);
        if (den > 0.0) aux.epsilon[k] = std::sqrt((1.0 + aux.alpha[k]) * powers[k]) * proj[k] / den;
    }
    return aux;
}

FpQuadratic fp_quadratic(const ChannelRealization& channels, const CMat& W, const RVec& powers,
                         const FpAuxiliaries& aux) {
    const std::vector<CMat> A = cascade_matrices(channels);
    const Eigen::Index K = W.cols();
    const Eigen::Index nb = channels.V().cols();
    if (static_cast<Eigen::Index>(A.size()) != K || aux.alpha.size() != K || aux.epsilon.size() != K ||
        powers.size() != K)
        throw std::invalid_argument("fp_quadratic: dimension mismatch");
    FpQuadratic q{CMat::Zero(nb, nb), CVec::Zero(nb)};
    for (Eigen::Index k = 0; k < K; ++k) {
        const double eps2 = std::norm(aux.epsilon[k]);
        for (Eigen::Index j = 0; j < K; ++j) {
            const Eigen::RowVectorXcd r = W.col(k).adjoint() * A[static_cast<std::size_t>(j)];
            if (eps2 > 0.0) q.U.noalias() += (eps2 * powers[j]) * (r.adjoint() * r);
            if (j == k)
                q.v += (std::sqrt((1.0 + aux.alpha[k]) * powers[k]) * std::conj(aux.epsilon[k])) * r.transpose();
        }
    }
    return q;
}

double fp_objective(const FpQuadratic& q, const CVec& theta) {
    const cplx quad = theta.dot(q.U * theta); // theta^H U theta
    const cplx lin = q.v.transpose() * theta;
    return quad.real() - 2.0 * lin.real();
}

cplx phase_coordinate_update(int j, const FpQuadratic& q, const CVec& theta) {
    if (j < 0 || j >= theta.size()) throw std::out_of_range("phase index out of range");
    // sum_{i != j} conj(theta_i) U(i, j)
    const cplx coupling = theta.dot(q.U.col(j)) - std::conj(theta[j]) * q.U(j, j);
    const cplx c = q.v[j] - coupling;
    if (c == cplx(0.0, 0.0)) return theta[j];
    return std::polar(1.0, -std::arg(c));
}

void phase_sweep(AoState& state, const SystemSetup& setup) {
    phase_sweep_impl(state, setup, nullptr);
}

RunResult ao_optimize(const SystemSetup& setup, std::vector<SurfacePose> initial_poses, CVec initial_theta,
                      const OptimizerConfig& config, const AoHooks* hooks) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    setup.scenario.validate();
    if (initial_poses.empty()) throw std::invalid_argument("ao_optimize: need at least one surface");
    if (config.scheme != Scheme::distributed && initial_poses.size() != 1)
        throw std::invalid_argument("ao_optimize: centralized and fixed schemes use a single surface");
    if (!feasibility_check(initial_poses, setup.region, setup.d_min).feasible())
        throw std::invalid_argument("ao_optimize: initial poses are infeasible");
    for (const cplx& t : initial_theta)
        if (!(std::abs(std::abs(t) - 1.0) <= 1e-9))
            throw std::invalid_argument("ao_optimize: reflection coefficients must have unit modulus");

    AoState state = make_state(setup, std::move(initial_poses), std::move(initial_theta));
    const auto& sc = setup.scenario;
    const int surfaces = static_cast<int>(state.poses.size());

    const auto block = [&](std::string_view name, double before) {
        const double after = state_sum_rate(setup, state);
        if (hooks && hooks->on_block) hooks->on_block(name, before, after);
        return after;
    };

    RunResult res;
    res.trace.push_back(state_sum_rate(setup, state));
    for (int t = 1; t <= config.outer_iterations; ++t) {
        double current = state_sum_rate(setup, state);
        state.W = mmse_beamformer(state.effective(), sc.powers, sc.noise_power);
        current = block("beamforming", current);
        for (int i = 0; i < config.inner_iterations; ++i) {
            if (config.scheme != Scheme::fixed_irs) {
                for (int b = 0; b < surfaces; ++b) {
                    if (position_step(b, state, setup, config).step > 0.0 && hooks && hooks->on_poses)
                        hooks->on_poses(state.poses);
                }
                current = block("position", current);
                for (int b = 0; b < surfaces; ++b) {
                    if (rotation_step(b, state, setup, config).step > 0.0 && hooks && hooks->on_poses)
                        hooks->on_poses(state.poses);
                }
                current = block("rotation", current);
            }
            phase_sweep_impl(state, setup, hooks);
            current = block("reflection", current);
        }
        res.trace.push_back(current);
        res.outer_iterations = t;
        if (config.early_stop && current - res.trace[res.trace.size() - 2] < config.tolerance) break;
    }
    state.W = mmse_beamformer(state.effective(), sc.powers, sc.noise_power);

    res.sum_rate = state_sum_rate(setup, state);
    res.feasibility = feasibility_check(state.poses, setup.region, setup.d_min);
    res.W = std::move(state.W);
    res.theta = std::move(state.theta);
    res.poses = std::move(state.poses);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

} // namespace p6d
