// SPDX-License-Identifier: Apache-2.0
//
// irsmimo: uplink simulator for IRS-aided multi-cell massive MIMO
// Copyright (C) 2026 The irsmimo authors
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

#include "irsmimo/scenario.hpp"

#include <vector>

namespace irsmimo
{
    /// Diagonal IRS reflection diag(exp(j theta_m)).
    struct PhaseShiftMatrix
    {
        rvec phases;

        cvec diagonal() const;
        cvec apply(const cvec &z) const;
        Eigen::Index size() const { return phases.size(); }

        static PhaseShiftMatrix zero(int M);
        static PhaseShiftMatrix random(int M, Rng &rng);
    };

    /// LoS IRS-to-BS channel X (N x M) built from `rank` orthogonal paths.
    struct IrsBsChannel
    {
        cmat X;
        int rank = 1;
        double beta = 0.0;
    };

    /// Jakes temporal correlation of one UE.
    struct AgingModel
    {
        double doppler_hz = 0.0;
        double sample_period_s = 5e-6;

        /// vartheta[m] = J0(2 pi f_d T_s |m|)
        double correlation(int lag) const;
        /// sqrt(1 - vartheta^2)
        double innovation_weight(int lag) const;
    };

    double bessel_j0(double x);
    double temporal_corr(const AgingModel &aging, int lag);

    struct LinkSample
    {
        cvec t;
        double phase = 0.0;
    };

    /// Caches corr^(1/2) of one link so repeated draws stay cheap.
    class LinkSampler
    {
    public:
        LinkSampler() = default;
        explicit LinkSampler(const LinkStatistics &stats);

        LinkSample draw(Rng &rng) const;
        const LinkStatistics &stats() const { return stats_; }
        const cmat &sqrt_corr() const { return sqrt_corr_; }
        /// E[t t^H] = mean mean^H + corr
        cmat covariance() const;

    private:
        LinkStatistics stats_;
        cmat sqrt_corr_;
    };

    /// t = mean_los exp(j phi) + corr^(1/2) w, phi ~ U[-pi, pi), w ~ CN(0, I).
    LinkSample sample_link(const LinkStatistics &stats, Rng &rng);

    /// g = h + sum_i X_i Theta_i z_i
    cvec aggregate_channel(const cvec &h, const std::vector<cvec> &z_all, const std::vector<cmat> &X_all,
                           const std::vector<PhaseShiftMatrix> &theta_all);

    struct AggregateCovariance
    {
        cmat C_g;
        cmat C_h;
        std::vector<cmat> C_z;
    };

    AggregateCovariance aggregate_covariance(const LinkStatistics &stats_h, const std::vector<LinkStatistics> &stats_z_all,
                                             const std::vector<cmat> &X_all,
                                             const std::vector<PhaseShiftMatrix> &theta_all);

    /// g[n] = vartheta g[lambda] + sqrt(1 - vartheta^2) q[n], with q a fresh draw of the aggregate.
    cvec evolve_aggregate(const cvec &g_lambda, const LinkSampler &h, const std::vector<LinkSampler> &z_all,
                          const std::vector<cmat> &X_all, const std::vector<PhaseShiftMatrix> &theta_all,
                          const AgingModel &aging, int lag, Rng &rng);

    IrsBsChannel build_irs_bs_channel(const Geometry &geom, const SystemConfig &cfg, int irs, int bs, int rank);

    /// All channels of one UE: direct links to every BS, links to every IRS, aggregates per BS.
    struct UeChannels
    {
        std::vector<cvec> direct;    // h^j, j = 0..L-1
        std::vector<cvec> irs;       // z^i, i = 0..L-1
        std::vector<cvec> aggregate; // g^j
        std::vector<double> direct_phase;
        std::vector<double> irs_phase;
    };

    /// Instantaneous channels of every UE at one time instant.
    struct ChannelState
    {
        int time_index = 0;
        int users_per_cell = 0;
        std::vector<UeChannels> ue; // index l * K + k

        const cvec &g(int cell, int user, int bs) const
        {
            return ue[std::size_t(cell * users_per_cell + user)].aggregate[std::size_t(bs)];
        }
        const UeChannels &at(int cell, int user) const { return ue[std::size_t(cell * users_per_cell + user)]; }
    };

    /// Link statistics, samplers, IRS-BS channels, phase shifts and aggregate
    /// covariances of one scenario. Immutable after construction.
    class ChannelModel
    {
    public:
        ChannelModel() = default;
        ChannelModel(const SystemConfig &cfg, const Geometry &geom, std::uint64_t seed);

        int num_cells() const { return L_; }
        int users_per_cell() const { return K_; }
        int num_antennas() const { return N_; }
        int num_elements() const { return M_; }

        const LinkSampler &direct(int cell, int user, int bs) const { return direct_[idx3(cell, user, bs)]; }
        const LinkSampler &irs_link(int cell, int user, int irs) const { return irs_[idx3(cell, user, irs)]; }
        const IrsBsChannel &irs_bs(int irs, int bs) const { return irs_bs_[std::size_t(irs * L_ + bs)]; }
        const PhaseShiftMatrix &phases(int irs) const { return theta_[std::size_t(irs)]; }
        const cmat &C_g(int cell, int user, int bs) const { return cov_[idx3(cell, user, bs)].C_g; }
        const AggregateCovariance &covariance(int cell, int user, int bs) const { return cov_[idx3(cell, user, bs)]; }

        /// X_i^j for i = 0..L-1 (BS j fixed).
        std::vector<cmat> irs_matrices(int bs) const;
        std::vector<PhaseShiftMatrix> all_phases() const { return theta_; }

        /// Fresh independent draw of every link of one UE (new LoS phases and NLoS parts).
        UeChannels draw_ue(int cell, int user, Rng &rng) const;
        ChannelState draw_state(Rng &rng, int time_index) const;

        /// Recomputes the aggregates of `ue` from its direct and IRS links.
        void assemble(UeChannels &ue) const;

        /// Component-wise aging: every link becomes w0 * old + w1 * innovation.
        UeChannels age(const UeChannels &old, const UeChannels &innovation, double vartheta, double vartheta_bar) const;

    private:
        std::size_t idx3(int a, int b, int c) const { return std::size_t((a * K_ + b) * L_ + c); }

        int L_ = 0, K_ = 0, N_ = 0, M_ = 0;
        std::vector<LinkSampler> direct_;
        std::vector<LinkSampler> irs_;
        std::vector<IrsBsChannel> irs_bs_;
        std::vector<cmat> cascade_; // X_i^j Theta_i, index i * L + j
        std::vector<PhaseShiftMatrix> theta_;
        std::vector<AggregateCovariance> cov_;
    };
}
