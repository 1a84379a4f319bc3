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

#include "irsmimo/channel.hpp"
#include "irsmimo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace irsmimo
{
    // ---------- Phase shifts ----------

    cvec PhaseShiftMatrix::diagonal() const
    {
        cvec d(phases.size());
        for (Eigen::Index m = 0; m < phases.size(); ++m)
            d[m] = std::polar(1.0, phases[m]);
        return d;
    }

    cvec PhaseShiftMatrix::apply(const cvec &z) const
    {
        if (z.size() != phases.size())
            throw std::invalid_argument("PhaseShiftMatrix::apply: dimension mismatch");
        return diagonal().cwiseProduct(z);
    }

    PhaseShiftMatrix PhaseShiftMatrix::zero(int M)
    {
        return {rvec::Zero(M)};
    }

    PhaseShiftMatrix PhaseShiftMatrix::random(int M, Rng &rng)
    {
        std::uniform_real_distribution<double> ud(0.0, 2.0 * pi);
        PhaseShiftMatrix t{rvec(M)};
        for (int m = 0; m < M; ++m)
            t.phases[m] = ud(rng);
        return t;
    }

    // ---------- Aging ----------

    double bessel_j0(double x)
    {
        return std::cyl_bessel_j(0.0, std::abs(x));
    }

    double AgingModel::correlation(int lag) const
    {
        return bessel_j0(2.0 * pi * doppler_hz * sample_period_s * double(std::abs(lag)));
    }

    double AgingModel::innovation_weight(int lag) const
    {
        double r = correlation(lag);
        return std::sqrt(std::max(0.0, 1.0 - r * r));
    }

    double temporal_corr(const AgingModel &aging, int lag)
    {
        return aging.correlation(lag);
    }

    // ---------- Link sampling ----------

    LinkSampler::LinkSampler(const LinkStatistics &stats) : stats_(stats)
    {
        if (stats.corr.rows() != stats.mean_los.size() || stats.corr.cols() != stats.mean_los.size())
            throw std::invalid_argument("LinkSampler: corr and mean_los dimensions differ");
        if (!linalg::is_hermitian_psd(stats.corr))
            throw NumericalError("LinkSampler: correlation matrix is not Hermitian PSD");
        sqrt_corr_ = linalg::hermitian_sqrt(stats.corr);
    }

    LinkSample LinkSampler::draw(Rng &rng) const
    {
        LinkSample s;
        s.phase = uniform_phase(rng);
        cvec w = complex_normal_vector(rng, stats_.dimension());
        s.t = stats_.mean_los * std::polar(1.0, s.phase) + sqrt_corr_ * w;
        return s;
    }

    cmat LinkSampler::covariance() const
    {
        return stats_.mean_los * stats_.mean_los.adjoint() + stats_.corr;
    }

    LinkSample sample_link(const LinkStatistics &stats, Rng &rng)
    {
        return LinkSampler(stats).draw(rng);
    }

    // ---------- Aggregate channel ----------

    cvec aggregate_channel(const cvec &h, const std::vector<cvec> &z_all, const std::vector<cmat> &X_all,
                           const std::vector<PhaseShiftMatrix> &theta_all)
    {
        if (z_all.size() != X_all.size() || z_all.size() != theta_all.size())
            throw std::invalid_argument("aggregate_channel: need one X, Theta and z per IRS");
        cvec g = h;
        for (std::size_t i = 0; i < z_all.size(); ++i)
        {
            if (X_all[i].cols() == 0)
                continue;
            if (X_all[i].rows() != h.size() || X_all[i].cols() != z_all[i].size() ||
                theta_all[i].size() != z_all[i].size())
                throw std::invalid_argument("aggregate_channel: dimension mismatch");
            g.noalias() += X_all[i] * theta_all[i].apply(z_all[i]);
        }
        return g;
    }

    AggregateCovariance aggregate_covariance(const LinkStatistics &stats_h, const std::vector<LinkStatistics> &stats_z_all,
                                             const std::vector<cmat> &X_all,
                                             const std::vector<PhaseShiftMatrix> &theta_all)
    {
        AggregateCovariance c;
        c.C_h = stats_h.mean_los * stats_h.mean_los.adjoint() + stats_h.corr;
        c.C_g = c.C_h;
        for (std::size_t i = 0; i < stats_z_all.size(); ++i)
        {
            const auto &z = stats_z_all[i];
            c.C_z.push_back(z.mean_los * z.mean_los.adjoint() + z.corr);
            if (X_all[i].cols() == 0)
                continue;
            cmat XT = X_all[i] * theta_all[i].diagonal().asDiagonal();
            c.C_g.noalias() += XT * c.C_z.back() * XT.adjoint();
        }
        c.C_g = linalg::hermitian_part(c.C_g);
        return c;
    }

    cvec evolve_aggregate(const cvec &g_lambda, const LinkSampler &h, const std::vector<LinkSampler> &z_all,
                          const std::vector<cmat> &X_all, const std::vector<PhaseShiftMatrix> &theta_all,
                          const AgingModel &aging, int lag, Rng &rng)
    {
        if (lag < 0)
            throw std::invalid_argument("evolve_aggregate: lag must be non-negative");
        double rho = aging.correlation(lag);
        double rho_bar = aging.innovation_weight(lag);
        if (rho_bar == 0.0)
            return rho * g_lambda;

        cvec h_new = h.draw(rng).t;
        std::vector<cvec> z_new;
        z_new.reserve(z_all.size());
        for (const auto &z : z_all)
            z_new.push_back(z.draw(rng).t);
        cvec q = aggregate_channel(h_new, z_new, X_all, theta_all);
        return rho * g_lambda + rho_bar * q;
    }

    // ---------- IRS-BS channel ----------

    namespace
    {
        // DFT-grid offsets sorted by distance from the origin; (0, 0) first.
        std::vector<std::pair<int, int>> grid_offsets(ArrayDims d)
        {
            std::vector<std::pair<int, int>> out;
            for (int b = 0; b < d.vertical; ++b)
                for (int a = 0; a < d.horizontal; ++a)
                {
                    int ac = a <= d.horizontal / 2 ? a : a - d.horizontal;
                    int bc = b <= d.vertical / 2 ? b : b - d.vertical;
                    out.emplace_back(ac, bc);
                }
            std::stable_sort(out.begin(), out.end(), [](auto x, auto y)
                             { return x.first * x.first + x.second * x.second < y.first * y.first + y.second * y.second; });
            return out;
        }
    }

    IrsBsChannel build_irs_bs_channel(const Geometry &geom, const SystemConfig &cfg, int irs, int bs, int rank)
    {
        if (rank < 1)
            throw std::invalid_argument("build_irs_bs_channel: rank must be at least 1");
        const int N = cfg.num_antennas(), M = cfg.num_elements();
        IrsBsChannel out;
        out.X = cmat::Zero(N, M);
        if (M == 0)
        {
            out.rank = 0;
            return out;
        }
        if (rank > std::min(N, M))
        {
            std::clog << "warning: IRS-BS rank " << rank << " clamped to " << std::min(N, M) << "\n";
            rank = std::min(N, M);
        }
        out.rank = rank;

        const auto &p = cfg.propagation;
        const Point &bs_pos = geom.bs_positions.at(std::size_t(bs));
        const Point &irs_pos = geom.irs_positions.at(std::size_t(irs));
        LinkAngles at_bs = link_angles(geom, bs_pos, p.bs_height_m, bs_boresight(cfg), irs_pos, p.irs_height_m);
        LinkAngles at_irs = link_angles(geom, irs_pos, p.irs_height_m, irs_boresight(cfg), bs_pos, p.bs_height_m);
        if (!(at_bs.distance_m > 1e-9))
            throw ConfigError("degenerate geometry: IRS collocated with BS");
        out.beta = db_to_linear(path_loss_db(at_bs.distance_m, p));

        // Direct path plus rank-1 paths offset by whole DFT bins on both arrays,
        // which keeps the path responses mutually orthogonal.
        auto bs_grid = grid_offsets(cfg.bs_array);
        auto irs_grid = grid_offsets(cfg.irs_array);
        const double u_bs = std::sin(at_bs.azimuth) * std::cos(at_bs.elevation), w_bs = std::sin(at_bs.elevation);
        const double u_irs = std::sin(at_irs.azimuth) * std::cos(at_irs.elevation), w_irs = std::sin(at_irs.elevation);
        for (int r = 0; r < rank; ++r)
        {
            auto [a, b] = bs_grid[std::size_t(r)];
            auto [c, d] = irs_grid[std::size_t(r)];
            cvec abs_ = upa_steering_spatial(cfg.bs_array, u_bs + a / (p.bs_spacing * cfg.bs_array.horizontal),
                                             w_bs + b / (p.bs_spacing * cfg.bs_array.vertical), p.bs_spacing);
            cvec airs = upa_steering_spatial(cfg.irs_array, u_irs + c / (p.irs_spacing * cfg.irs_array.horizontal),
                                             w_irs + d / (p.irs_spacing * cfg.irs_array.vertical), p.irs_spacing);
            out.X.noalias() += abs_ * airs.adjoint();
        }
        // ||X||_F^2 = beta N M
        double fro2 = out.X.squaredNorm();
        out.X *= std::sqrt(out.beta * double(N) * double(M) / fro2);
        return out;
    }

    // ---------- ChannelModel ----------

    ChannelModel::ChannelModel(const SystemConfig &cfg, const Geometry &geom, std::uint64_t seed)
        : L_(cfg.num_cells), K_(cfg.users_per_cell), N_(cfg.num_antennas()), M_(cfg.num_elements())
    {
        cfg.validate();
        direct_.reserve(std::size_t(L_ * K_ * L_));
        irs_.reserve(std::size_t(L_ * K_ * L_));
        for (int l = 0; l < L_; ++l)
            for (int k = 0; k < K_; ++k)
                for (int t = 0; t < L_; ++t)
                {
                    direct_.emplace_back(build_link_statistics(geom, cfg, {LinkKind::ue_to_bs, l, k, t}));
                    irs_.emplace_back(build_link_statistics(geom, cfg, {LinkKind::ue_to_irs, l, k, t}));
                }

        for (int i = 0; i < L_; ++i)
            for (int j = 0; j < L_; ++j)
                irs_bs_.push_back(build_irs_bs_channel(geom, cfg, i, j, cfg.irs.bs_link_rank));

        Rng rng(combine_seed(seed, 0x7e7a0001ULL));
        for (int i = 0; i < L_; ++i)
        {
            switch (cfg.irs.phase_mode)
            {
            case PhaseMode::random:
                theta_.push_back(PhaseShiftMatrix::random(M_, rng));
                break;
            case PhaseMode::zero:
                theta_.push_back(PhaseShiftMatrix::zero(M_));
                break;
            case PhaseMode::los_align:
            {
                PhaseShiftMatrix t = PhaseShiftMatrix::zero(M_);
                if (M_ > 0)
                {
                    int best = 0;
                    for (int k = 1; k < K_; ++k)
                        if (irs_link(i, k, i).stats().beta > irs_link(i, best, i).stats().beta)
                            best = k;
                    const cvec &zbar = irs_link(i, best, i).stats().mean_los;
                    const cmat &X = irs_bs(i, i).X;
                    Eigen::JacobiSVD<cmat> svd(X, Eigen::ComputeThinU);
                    cvec c = X.adjoint() * svd.matrixU().col(0);
                    for (int m = 0; m < M_; ++m)
                        t.phases[m] = std::arg(c[m]) - (std::abs(zbar[m]) > 0.0 ? std::arg(zbar[m]) : 0.0);
                }
                theta_.push_back(t);
                break;
            }
            }
        }

        cascade_.resize(std::size_t(L_ * L_));
        for (int i = 0; i < L_; ++i)
            for (int j = 0; j < L_; ++j)
                cascade_[std::size_t(i * L_ + j)] = irs_bs(i, j).X * theta_[std::size_t(i)].diagonal().asDiagonal();

        cov_.reserve(direct_.size());
        for (int l = 0; l < L_; ++l)
            for (int k = 0; k < K_; ++k)
                for (int j = 0; j < L_; ++j)
                {
                    std::vector<LinkStatistics> zs;
                    for (int i = 0; i < L_; ++i)
                        zs.push_back(irs_link(l, k, i).stats());
                    cov_.push_back(aggregate_covariance(direct(l, k, j).stats(), zs, irs_matrices(j), theta_));
                }
    }

    std::vector<cmat> ChannelModel::irs_matrices(int bs) const
    {
        std::vector<cmat> out;
        for (int i = 0; i < L_; ++i)
            out.push_back(irs_bs(i, bs).X);
        return out;
    }

    void ChannelModel::assemble(UeChannels &ue) const
    {
        ue.aggregate.resize(std::size_t(L_));
        for (int j = 0; j < L_; ++j)
        {
            cvec g = ue.direct[std::size_t(j)];
            if (M_ > 0)
                for (int i = 0; i < L_; ++i)
                    g.noalias() += cascade_[std::size_t(i * L_ + j)] * ue.irs[std::size_t(i)];
            ue.aggregate[std::size_t(j)] = std::move(g);
        }
    }

    UeChannels ChannelModel::draw_ue(int cell, int user, Rng &rng) const
    {
        UeChannels ue;
        ue.direct.reserve(std::size_t(L_));
        ue.irs.reserve(std::size_t(L_));
        for (int j = 0; j < L_; ++j)
        {
            LinkSample s = direct(cell, user, j).draw(rng);
            ue.direct.push_back(std::move(s.t));
            ue.direct_phase.push_back(s.phase);
        }
        for (int i = 0; i < L_; ++i)
        {
            LinkSample s = irs_link(cell, user, i).draw(rng);
            ue.irs.push_back(std::move(s.t));
            ue.irs_phase.push_back(s.phase);
        }
        assemble(ue);
        return ue;
    }

    ChannelState ChannelModel::draw_state(Rng &rng, int time_index) const
    {
        ChannelState s;
        s.time_index = time_index;
        s.users_per_cell = K_;
        s.ue.reserve(std::size_t(L_ * K_));
        for (int l = 0; l < L_; ++l)
            for (int k = 0; k < K_; ++k)
                s.ue.push_back(draw_ue(l, k, rng));
        return s;
    }

    UeChannels ChannelModel::age(const UeChannels &old, const UeChannels &innovation, double vartheta,
                                 double vartheta_bar) const
    {
        UeChannels out;
        for (int j = 0; j < L_; ++j)
        {
            out.direct.push_back(vartheta * old.direct[std::size_t(j)] + vartheta_bar * innovation.direct[std::size_t(j)]);
            out.aggregate.push_back(vartheta * old.aggregate[std::size_t(j)] +
                                    vartheta_bar * innovation.aggregate[std::size_t(j)]);
        }
        for (int i = 0; i < L_; ++i)
            out.irs.push_back(vartheta * old.irs[std::size_t(i)] + vartheta_bar * innovation.irs[std::size_t(i)]);
        out.direct_phase = innovation.direct_phase;
        out.irs_phase = innovation.irs_phase;
        return out;
    }
}
