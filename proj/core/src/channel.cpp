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

#include "p6d/channel.hpp"

#include <cmath>
#include <string>

namespace p6d {

namespace {

constexpr cplx kJ{0.0, 1.0};

void require_unit(const Vec3& v, const char* what) {
    if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(what) + " must be a unit vector");
}

// Element positions in the global frame, one per column.
Eigen::Matrix3Xd element_positions(const SurfacePose& pose, const LocalLayout& layout) {
    const Mat3 r = rotation_matrix(pose.rotation);
    Eigen::Matrix3Xd pos(3, layout.size());
    for (int n = 0; n < layout.size(); ++n) pos.col(n) = pose.position + r * layout.offset(n);
    return pos;
}

CVec response(const Eigen::Matrix3Xd& positions, const Vec3& dir, double wavelength) {
    const double k0 = kTwoPi / wavelength;
    CVec out(positions.cols());
    for (Eigen::Index n = 0; n < positions.cols(); ++n)
        out[n] = std::exp(kJ * (k0 * dir.dot(positions.col(n))));
    return out;
}

RVec sinr_impl(const CMat& W, const CMat& H, const RVec& powers, double noise_power, bool allow_zero) {
    const Eigen::Index K = H.cols();
    if (W.rows() != H.rows() || W.cols() != K || powers.size() != K)
        throw std::invalid_argument("sinr: dimension mismatch");
    if (!(noise_power > 0.0)) throw std::invalid_argument("sinr: noise power must be positive");
    RVec gamma(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const double wnorm2 = W.col(k).squaredNorm();
        if (wnorm2 == 0.0) {
            if (!allow_zero) throw std::invalid_argument("sinr: zero receive vector");
            gamma[k] = 0.0;
            continue;
        }
        const Eigen::RowVectorXcd proj = W.col(k).adjoint() * H;
        double interference = 0.0;
        for (Eigen::Index j = 0; j < K; ++j)
            if (j != k) interference += powers[j] * std::norm(proj[j]);
        gamma[k] = powers[k] * std::norm(proj[k]) / (interference + noise_power * wnorm2);
    }
    return gamma;
}

} // namespace

void Scenario::validate() const {
    if (!(wavelength > 0.0)) throw std::invalid_argument("scenario: wavelength must be positive");
    if (bs_antennas < 1) throw std::invalid_argument("scenario: need at least one BS antenna");
    if (user_paths.empty()) throw std::invalid_argument("scenario: need at least one user");
    for (const auto& paths : user_paths)
        if (paths.empty()) throw std::invalid_argument("scenario: every user needs at least one path");
    if (bs_paths.empty()) throw std::invalid_argument("scenario: need at least one surface-to-BS path");
    if (powers.size() != num_users()) throw std::invalid_argument("scenario: one transmit power per user");
    if ((powers.array() <= 0.0).any()) throw std::invalid_argument("scenario: powers must be positive");
    if (!(noise_power > 0.0)) throw std::invalid_argument("scenario: noise power must be positive");
}

ChannelRealization::ChannelRealization(std::vector<SurfaceChannels> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("channel realization needs at least one surface");
    const Eigen::Index m = blocks_.front().V.rows();
    const Eigen::Index n = blocks_.front().V.cols();
    const Eigen::Index k = blocks_.front().G.cols();
    for (const auto& b : blocks_)
        if (b.V.rows() != m || b.V.cols() != n || b.G.rows() != n || b.G.cols() != k)
            throw std::invalid_argument("channel realization: inconsistent block dimensions");
    const Eigen::Index nb = n * surfaces();
    v_.resize(m, nb);
    g_.resize(nb, k);
    for (int b = 0; b < surfaces(); ++b) {
        v_.middleCols(b * n, n) = blocks_[b].V;
        g_.middleRows(b * n, n) = blocks_[b].G;
    }
}

void ChannelRealization::replace_surface(int b, SurfaceChannels block) {
    if (b < 0 || b >= surfaces()) throw std::out_of_range("surface index out of range");
    const auto& ref = blocks_[b];
    if (block.V.rows() != ref.V.rows() || block.V.cols() != ref.V.cols() || block.G.rows() != ref.G.rows() ||
        block.G.cols() != ref.G.cols())
        throw std::invalid_argument("replace_surface: dimension mismatch");
    const Eigen::Index n = ref.V.cols();
    v_.middleCols(b * n, n) = block.V;
    g_.middleRows(b * n, n) = block.G;
    blocks_[b] = std::move(block);
}

CMat ChannelRealization::effective(const CVec& theta) const {
    if (theta.size() != v_.cols()) throw std::invalid_argument("effective channel: theta length mismatch");
    return v_ * theta.asDiagonal() * g_;
}

CVec array_response_incident(const SurfacePose& pose, const LocalLayout& layout, const Vec3& doa, double wavelength) {
    require_unit(doa, "DOA");
    return response(element_positions(pose, layout), doa, wavelength);
}

CVec array_response_departure(const SurfacePose& pose, const LocalLayout& layout, const Vec3& dod, double wavelength) {
    require_unit(dod, "DOD");
    return response(element_positions(pose, layout), dod, wavelength);
}

CVec bs_steering(double psi, int antennas) {
    if (antennas < 1) throw std::invalid_argument("bs_steering: need at least one antenna");
    const double c = std::cos(psi);
    CVec z(antennas);
    for (int m = 0; m < antennas; ++m) z[m] = std::exp(kJ * (kPi * m * c));
    return z;
}

CVec user_to_surface_channel(const Scenario& scenario, int k, const SurfacePose& pose, const SurfaceModel& model) {
    if (k < 0 || k >= scenario.num_users()) throw std::out_of_range("user index out of range");
    const Eigen::Matrix3Xd pos = element_positions(pose, model.layout);
    const Vec3 normal = surface_normal(pose);
    CVec g = CVec::Zero(model.elements());
    for (const auto& path : scenario.user_paths[static_cast<std::size_t>(k)]) {
        const Vec3 f = path.direction();
        const double gain = model.pattern.gain(normal, f);
        if (gain == 0.0) continue;
        g += path.gain * std::sqrt(gain) * response(pos, f, scenario.wavelength);
    }
    return g;
}

CMat surface_to_bs_channel(const Scenario& scenario, const SurfacePose& pose, const SurfaceModel& model) {
    const Eigen::Matrix3Xd pos = element_positions(pose, model.layout);
    const Vec3 normal = surface_normal(pose);
    CMat v = CMat::Zero(scenario.bs_antennas, model.elements());
    for (const auto& path : scenario.bs_paths) {
        const Vec3 s = path.direction();
        const double gain = model.pattern.gain(normal, s);
        if (gain == 0.0) continue;
        const CVec z = bs_steering(path.arrival, scenario.bs_antennas);
        const CVec e = response(pos, s, scenario.wavelength);
        v += (path.gain * std::sqrt(gain)) * z * e.adjoint();
    }
    return v;
}

SurfaceChannels surface_channels(const Scenario& scenario, const SurfacePose& pose, const SurfaceModel& model) {
    SurfaceChannels out;
    out.V = surface_to_bs_channel(scenario, pose, model);
    out.G.resize(model.elements(), scenario.num_users());
    for (int k = 0; k < scenario.num_users(); ++k) out.G.col(k) = user_to_surface_channel(scenario, k, pose, model);
    return out;
}

ChannelRealization synthesize(const Scenario& scenario, std::span<const SurfacePose> poses, const SurfaceModel& model) {
    std::vector<SurfaceChannels> blocks;
    blocks.reserve(poses.size());
    for (const auto& p : poses) blocks.push_back(surface_channels(scenario, p, model));
    return ChannelRealization(std::move(blocks));
}

CVec cascaded_channel(const CMat& V, const CVec& theta, const CVec& g) {
    if (V.cols() != theta.size() || theta.size() != g.size())
        throw std::invalid_argument("cascaded_channel: dimension mismatch");
    return V * theta.cwiseProduct(g);
}

CMat effective_channel(const ChannelRealization& channels, const CVec& theta) {
    return channels.effective(theta);
}

RVec sinr(const CMat& W, const CMat& H, const RVec& powers, double noise_power) {
    return sinr_impl(W, H, powers, noise_power, false);
}

RVec sinr_or_zero(const CMat& W, const CMat& H, const RVec& powers, double noise_power) {
    return sinr_impl(W, H, powers, noise_power, true);
}

double sum_rate(const RVec& sinr_values) {
    double total = 0.0;
    for (double g : sinr_values) {
        if (g < 0.0) throw std::invalid_argument("sum_rate: negative SINR");
        total += std::log2(1.0 + g);
    }
    return total;
}

} // namespace p6d
