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

#include "irsmimo/se.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace irsmimo
{
    double SeTerms::interference() const
    {
        double s = 0.0;
        for (int i = 1; i < count; ++i)
            s += v[std::size_t(i)];
        return s;
    }

    std::vector<int> make_n_grid(int lambda, int tau_c, int stride)
    {
        if (stride < 1)
            throw ConfigError("n grid stride must be at least 1");
        if (tau_c < lambda)
            throw ConfigError("frame length must not be shorter than the estimation instant");
        std::vector<int> g;
        for (int n = lambda; n < tau_c; n += stride)
            g.push_back(n);
        g.push_back(tau_c);
        return g;
    }

    PilotPhase run_pilot_phase(const Scenario &scn, const EstimatorBank &bank, TrialStreams &streams)
    {
        PilotPhase pp;
        pp.at_lambda = scn.channels.draw_state(streams.channel, scn.lambda());
        ChannelState pilot = pilot_channels(scn, pp.at_lambda, streams.channel);
        PilotReception rx = receive_pilot(scn, pilot, streams.hardware, streams.awgn);
        pp.est = lmmse_estimate(bank, rx, scn.lambda());
        return pp;
    }

    cmat combiners(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, ReceiverKind r,
                   int bs, int n)
    {
        switch (r)
        {
        case ReceiverKind::mrc:
        {
            cmat V(scn.N(), scn.K());
            for (int k = 0; k < scn.K(); ++k)
                V.col(k) = mrc(est, bs, k);
            return V;
        }
        case ReceiverKind::du_mmse:
            return du_mmse_all(scn, est, bs, du_static(scn, bank, bs));
        case ReceiverKind::daa_mmse:
            return daa_mmse_all(scn, est, bs, n, daa_signal_static(scn, bank, bs, n));
        }
        throw std::invalid_argument("combiners: unknown receiver");
    }

    namespace
    {
        constexpr int per_ue_dim = 11; // Re a, Im a, |a|^2, CA, MUI, PC, DAC, TRF, RRF, ADC, NS

        bool n_independent(ReceiverKind r) { return r != ReceiverKind::daa_mmse; }

        // Scalar inputs of the term formulas for one UE (j, k) at one instant.
        struct UeInputs
        {
            cplx a;          // v^H A g_jk^j[lambda]
            double own_b2w;  // p vartheta^2 |a|^2
            double own_q;    // p vartheta_bar^2 v^H A C_g A v
            double sb_mui;   // sum over (l, i != k) of p vartheta^2 |b_li|^2
            double sq_mui;   // same with p vartheta_bar^2 Q_li
            double sb_pc;    // sum over (l != j, k)
            double sq_pc;
            double rrf_q;    // sum_m |u_m|^2 E[D_n]_m
            double adc_q;    // sum_m A_m (1 - A_m) |v_m|^2 ((1 + kb^2) E[D_n]_m + s^2)
            double u2;       // ||A v||^2
        };

        // Fixed per-experiment matrices shared by every trial.
        class Engine
        {
        public:
            Engine(const Scenario &scn, const EstimatorBank &bank, std::vector<ReceiverKind> receivers,
                   std::vector<int> n_grid)
                : scn_(scn), bank_(bank), receivers_(std::move(receivers)), grid_(std::move(n_grid)),
                  L_(scn.L()), K_(scn.K()), N_(scn.N()), U_(L_ * K_)
            {
                for (int n : grid_)
                    if (n < scn.lambda() || n > scn.cfg.frame_length)
                        throw ConfigError("time instant " + std::to_string(n) + " outside [lambda, tau_c]");
                const double p = scn.cfg.data_power_w;
                alpha_ = scn.hw.alpha_ue();
                rho_ = scn.hw.rho_ue();
                ku2_ = scn.hw.kappa_ue * scn.hw.kappa_ue;
                kb2_ = scn.hw.kappa_bs * scn.hw.kappa_bs;
                s2_ = scn.cfg.noise_power_w;
                w_d_ = alpha_ * (1.0 + ku2_);
                A_ = scn.alpha_bs;
                T_ = (A_.array() * (1.0 - A_.array())).matrix();

                const std::size_t G = grid_.size();
                th2_.resize(G * std::size_t(U_));
                thb2_.resize(G * std::size_t(U_));
                for (std::size_t ni = 0; ni < G; ++ni)
                    for (int l = 0; l < L_; ++l)
                        for (int i = 0; i < K_; ++i)
                        {
                            double t = scn.vartheta(l, i, grid_[ni]), tb = scn.vartheta_bar(l, i, grid_[ni]);
                            th2_[ni * std::size_t(U_) + std::size_t(l * K_ + i)] = t * t;
                            thb2_[ni * std::size_t(U_) + std::size_t(l * K_ + i)] = tb * tb;
                        }

                diag_innov_.resize(G * std::size_t(L_));
                for (std::size_t ni = 0; ni < G; ++ni)
                    for (int j = 0; j < L_; ++j)
                    {
                        rvec d = rvec::Zero(N_);
                        for (int l = 0; l < L_; ++l)
                            for (int i = 0; i < K_; ++i)
                            {
                                double w = thb2(ni, l, i);
                                if (w > 0.0)
                                    d += (p * w) * scn.channels.C_g(l, i, j).diagonal().real();
                            }
                        diag_innov_[ni * std::size_t(L_) + std::size_t(j)] = d;
                    }

                bool need_du = std::find(receivers_.begin(), receivers_.end(), ReceiverKind::du_mmse) != receivers_.end();
                bool need_daa =
                    std::find(receivers_.begin(), receivers_.end(), ReceiverKind::daa_mmse) != receivers_.end();
                if (need_du)
                    for (int j = 0; j < L_; ++j)
                        du_static_.push_back(du_static(scn, bank, j));
                if (need_daa)
                {
                    daa_static_.resize(G * std::size_t(L_));
                    g_mui_.resize(G * std::size_t(L_ * K_));
                    g_pc_.resize(G * std::size_t(L_ * K_));
                    for (std::size_t ni = 0; ni < G; ++ni)
                        for (int j = 0; j < L_; ++j)
                        {
                            daa_static_[ni * std::size_t(L_) + std::size_t(j)] =
                                daa_signal_static(scn, bank, j, grid_[ni]);
                            for (int k = 0; k < K_; ++k)
                            {
                                cmat mui = cmat::Zero(N_, N_), pc = cmat::Zero(N_, N_);
                                for (int l = 0; l < L_; ++l)
                                    for (int i = 0; i < K_; ++i)
                                    {
                                        double w = thb2(ni, l, i);
                                        if (w == 0.0)
                                            continue;
                                        if (i != k)
                                            mui += (p * w) * scn.channels.C_g(l, i, j);
                                        else if (l != j)
                                            pc += (p * w) * scn.channels.C_g(l, i, j);
                                    }
                                g_mui_[gidx(ni, j, k)] = std::move(mui);
                                g_pc_[gidx(ni, j, k)] = std::move(pc);
                            }
                        }
                }
            }

            int num_users() const { return U_; }
            const std::vector<ReceiverKind> &receivers() const { return receivers_; }
            const std::vector<int> &grid() const { return grid_; }

            /// x[r][ni] receives the per-UE values (per_ue_dim * U); slope[r] the UE-averaged
            /// MUI slope component (NaN for n-dependent combiners). V_out[r][ni][j], when given,
            /// receives the combiners.
            void trial(const PilotPhase &pp, std::vector<std::vector<rvec>> &x, std::vector<double> &slope,
                       std::vector<std::vector<std::vector<cmat>>> *V_out = nullptr) const
            {
                const std::size_t G = grid_.size(), R = receivers_.size();
                const double p = scn_.cfg.data_power_w;
                x.assign(R, std::vector<rvec>(G, rvec::Zero(per_ue_dim * U_)));
                slope.assign(R, std::numeric_limits<double>::quiet_NaN());
                if (V_out)
                    V_out->assign(R, std::vector<std::vector<cmat>>(G, std::vector<cmat>(std::size_t(L_))));

                // E[D_n | g[lambda]] per (ni, j), before the a (1 + ku^2) factor is applied.
                std::vector<rvec> Dn(G * std::size_t(L_));
                for (int j = 0; j < L_; ++j)
                {
                    std::vector<rvec> pg(static_cast<std::size_t>(U_));
                    for (int l = 0; l < L_; ++l)
                        for (int i = 0; i < K_; ++i)
                            pg[std::size_t(l * K_ + i)] = p * pp.at_lambda.g(l, i, j).cwiseAbs2();
                    for (std::size_t ni = 0; ni < G; ++ni)
                    {
                        rvec d = diag_innov_[ni * std::size_t(L_) + std::size_t(j)];
                        for (int u = 0; u < U_; ++u)
                            d += th2_[ni * std::size_t(U_) + std::size_t(u)] * pg[std::size_t(u)];
                        Dn[ni * std::size_t(L_) + std::size_t(j)] = w_d_ * d;
                    }
                }

                for (std::size_t r = 0; r < R; ++r)
                {
                    const ReceiverKind kind = receivers_[r];
                    if (n_independent(kind))
                    {
                        double slope_sum = 0.0;
                        for (int j = 0; j < L_; ++j)
                        {
                            cmat V = kind == ReceiverKind::mrc ? combiners(scn_, bank_, pp.est, kind, j, grid_[0])
                                                               : du_mmse_all(scn_, pp.est, j, du_static_[std::size_t(j)]);
                            if (V_out)
                                for (std::size_t ni = 0; ni < G; ++ni)
                                    (*V_out)[r][ni][std::size_t(j)] = V;
                            for (int k = 0; k < K_; ++k)
                            {
                                const cvec v = V.col(k);
                                const cvec u = A_.cast<cplx>().asDiagonal() * v;
                                std::vector<double> b2(static_cast<std::size_t>(U_)), q(static_cast<std::size_t>(U_));
                                for (int l = 0; l < L_; ++l)
                                    for (int i = 0; i < K_; ++i)
                                    {
                                        const std::size_t li = std::size_t(l * K_ + i);
                                        b2[li] = p * std::norm(u.dot(pp.at_lambda.g(l, i, j)));
                                        q[li] = p * u.dot(scn_.channels.C_g(l, i, j) * u).real();
                                        if (i != k)
                                            slope_sum += alpha_ * alpha_ * (b2[li] - q[li]);
                                    }
                                const cplx a = u.dot(pp.at_lambda.g(j, k, j));
                                for (std::size_t ni = 0; ni < G; ++ni)
                                {
                                    UeInputs in{};
                                    in.a = a;
                                    const double *t2 = &th2_[ni * std::size_t(U_)];
                                    const double *tb2 = &thb2_[ni * std::size_t(U_)];
                                    const std::size_t own = std::size_t(j * K_ + k);
                                    in.own_b2w = t2[own] * b2[own];
                                    in.own_q = tb2[own] * q[own];
                                    for (int l = 0; l < L_; ++l)
                                        for (int i = 0; i < K_; ++i)
                                        {
                                            const std::size_t li = std::size_t(l * K_ + i);
                                            if (i != k)
                                            {
                                                in.sb_mui += t2[li] * b2[li];
                                                in.sq_mui += tb2[li] * q[li];
                                            }
                                            else if (l != j)
                                            {
                                                in.sb_pc += t2[li] * b2[li];
                                                in.sq_pc += tb2[li] * q[li];
                                            }
                                        }
                                    noise_inputs(in, v, u, Dn[ni * std::size_t(L_) + std::size_t(j)]);
                                    fill(x[r][ni], own, in);
                                }
                            }
                        }
                        slope[r] = slope_sum / U_;
                    }
                    else
                    {
                        for (std::size_t ni = 0; ni < G; ++ni)
                        {
                            const double *t2 = &th2_[ni * std::size_t(U_)];
                            const double *tb2 = &thb2_[ni * std::size_t(U_)];
                            for (int j = 0; j < L_; ++j)
                            {
                                cmat V = daa_mmse_all(scn_, pp.est, j, grid_[ni],
                                                      daa_static_[ni * std::size_t(L_) + std::size_t(j)]);
                                if (V_out)
                                    (*V_out)[r][ni][std::size_t(j)] = V;
                                for (int k = 0; k < K_; ++k)
                                {
                                    const cvec v = V.col(k);
                                    const cvec u = A_.cast<cplx>().asDiagonal() * v;
                                    const std::size_t own = std::size_t(j * K_ + k);
                                    UeInputs in{};
                                    for (int l = 0; l < L_; ++l)
                                        for (int i = 0; i < K_; ++i)
                                        {
                                            const std::size_t li = std::size_t(l * K_ + i);
                                            const cplx b = u.dot(pp.at_lambda.g(l, i, j));
                                            const double b2w = t2[li] * p * std::norm(b);
                                            if (li == own)
                                            {
                                                in.a = b;
                                                in.own_b2w = b2w;
                                            }
                                            else if (i != k)
                                                in.sb_mui += b2w;
                                            else
                                                in.sb_pc += b2w;
                                        }
                                    if (tb2[own] > 0.0)
                                        in.own_q = tb2[own] * p * u.dot(scn_.channels.C_g(j, k, j) * u).real();
                                    in.sq_mui = u.dot(g_mui_[gidx(ni, j, k)] * u).real();
                                    in.sq_pc = u.dot(g_pc_[gidx(ni, j, k)] * u).real();
                                    noise_inputs(in, v, u, Dn[ni * std::size_t(L_) + std::size_t(j)]);
                                    fill(x[r][ni], own, in);
                                }
                            }
                        }
                    }
                }
            }

        private:
            std::size_t gidx(std::size_t ni, int j, int k) const
            {
                return (ni * std::size_t(L_) + std::size_t(j)) * std::size_t(K_) + std::size_t(k);
            }
            double thb2(std::size_t ni, int l, int i) const { return thb2_[ni * std::size_t(U_) + std::size_t(l * K_ + i)]; }

            void noise_inputs(UeInputs &in, const cvec &v, const cvec &u, const rvec &Dn) const
            {
                for (int m = 0; m < N_; ++m)
                {
                    const double um = std::norm(u[m]);
                    in.rrf_q += um * Dn[m];
                    if (T_[m] > 0.0)
                        in.adc_q += T_[m] * std::norm(v[m]) * ((1.0 + kb2_) * Dn[m] + s2_);
                    in.u2 += um;
                }
            }

            void fill(rvec &x, std::size_t ue, const UeInputs &in) const
            {
                double *o = x.data() + ue * per_ue_dim;
                const double a2 = alpha_ * alpha_;
                const double s_all = in.own_b2w + in.own_q + in.sb_mui + in.sq_mui + in.sb_pc + in.sq_pc;
                o[0] = in.a.real();
                o[1] = in.a.imag();
                o[2] = std::norm(in.a);
                o[3] = a2 * in.own_q;
                o[4] = a2 * (in.sb_mui + in.sq_mui);
                o[5] = a2 * (in.sb_pc + in.sq_pc);
                o[6] = rho_ * alpha_ * s_all;
                o[7] = ku2_ * alpha_ * s_all;
                o[8] = kb2_ * in.rrf_q;
                o[9] = in.adc_q;
                o[10] = s2_ * in.u2;
            }

            const Scenario &scn_;
            const EstimatorBank &bank_;
            std::vector<ReceiverKind> receivers_;
            std::vector<int> grid_;
            int L_, K_, N_, U_;
            double alpha_ = 1.0, rho_ = 0.0, ku2_ = 0.0, kb2_ = 0.0, s2_ = 0.0, w_d_ = 1.0;
            rvec A_, T_;
            std::vector<double> th2_, thb2_;   // index ni * U + u
            std::vector<rvec> diag_innov_;     // diag(sum p vartheta_bar^2 C_g), index ni * L + j
            std::vector<cmat> du_static_;      // per j
            std::vector<cmat> daa_static_;     // index ni * L + j
            std::vector<cmat> g_mui_, g_pc_;   // index (ni * L + j) * K + k
        };

        // Running mean of x and running mean / co-moment of the reduced vector c
        // (Welford within a block, Chan et al. between blocks).
        struct Accumulator
        {
            long n = 0;
            rvec mx, mc;
            rmat M2;

            void init(Eigen::Index dx, Eigen::Index dc)
            {
                n = 0;
                mx = rvec::Zero(dx);
                mc = rvec::Zero(dc);
                M2 = rmat::Zero(dc, dc);
            }

            void add(const rvec &x, const rvec &c)
            {
                ++n;
                const double inv = 1.0 / double(n);
                mx += (x - mx) * inv;
                rvec d = c - mc;
                mc += d * inv;
                M2.noalias() += (d * (double(n - 1) * inv)) * d.transpose();
            }

            void merge(const Accumulator &o)
            {
                if (o.n == 0)
                    return;
                if (n == 0)
                {
                    *this = o;
                    return;
                }
                const double na = double(n), nb = double(o.n), nt = na + nb;
                mx += (o.mx - mx) * (nb / nt);
                rvec d = o.mc - mc;
                mc += d * (nb / nt);
                M2 += o.M2;
                M2.noalias() += (d * (na * nb / nt)) * d.transpose();
                n += o.n;
            }
        };

        // c = [per UE: Re a, Im a, |a|^2, sum of CA..NS], UE means of CA..NS, MUI slope component.
        rvec reduce(const rvec &x, int U, double slope)
        {
            rvec c = rvec::Zero(4 * U + 9);
            for (int u = 0; u < U; ++u)
            {
                const double *o = x.data() + u * per_ue_dim;
                c[4 * u] = o[0];
                c[4 * u + 1] = o[1];
                c[4 * u + 2] = o[2];
                double rest = 0.0;
                for (int t = 3; t < per_ue_dim; ++t)
                {
                    rest += o[t];
                    c[4 * U + t - 3] += o[t] / U;
                }
                c[4 * u + 3] = rest;
            }
            c[4 * U + 8] = std::isnan(slope) ? 0.0 : slope;
            return c;
        }

        int resolve_threads(int threads)
        {
            if (threads > 0)
                return threads;
            unsigned h = std::thread::hardware_concurrency();
            return h == 0 ? 1 : int(h);
        }

        // Runs fn(block) for blocks [0, nblocks) on `threads` workers and folds the results
        // with merge(acc, block_result) in block order.
        template <class Block, class Fn, class Merge>
        void ordered_blocks(long nblocks, int threads, Fn fn, Merge merge)
        {
            threads = std::max(1, threads);
            if (threads == 1)
            {
                for (long b = 0; b < nblocks; ++b)
                    merge(fn(b));
                return;
            }
            const long wave = long(threads) * 4;
            for (long start = 0; start < nblocks; start += wave)
            {
                const long end = std::min(nblocks, start + wave);
                std::vector<Block> res(std::size_t(end - start));
                std::atomic<long> next(start);
                std::exception_ptr err;
                std::mutex err_mutex;
                std::vector<std::thread> pool;
                for (int t = 0; t < threads && t < end - start; ++t)
                    pool.emplace_back([&]
                                      {
                                          for (long b = next++; b < end; b = next++)
                                          {
                                              try
                                              {
                                                  res[std::size_t(b - start)] = fn(b);
                                              }
                                              catch (...)
                                              {
                                                  std::lock_guard<std::mutex> lock(err_mutex);
                                                  if (!err)
                                                      err = std::current_exception();
                                              }
                                          } });
                for (auto &th : pool)
                    th.join();
                if (err)
                    std::rethrow_exception(err);
                for (auto &r : res)
                    merge(std::move(r));
            }
        }

        SeBreakdown finalize(const Scenario &scn, const EstimatorBank &bank, const Accumulator &acc, ReceiverKind r,
                             int n, std::uint64_t seed)
        {
            const int L = scn.L(), K = scn.K(), U = L * K;
            const double T = double(acc.n);
            const double a2p = std::pow(scn.hw.alpha_ue(), 2) * scn.cfg.data_power_w;
            const rmat cov = acc.M2 / (T - 1.0);
            const int base = 4 * U;

            SeBreakdown b;
            b.receiver = r;
            b.n = n;
            b.trials = acc.n;
            b.seed = seed;
            b.per_ue.resize(std::size_t(U));
            b.per_ue_sinr.resize(std::size_t(U));
            b.per_ue_se.resize(std::size_t(U));

            rvec g_se = rvec::Zero(acc.mc.size());
            rvec g_ds = rvec::Zero(acc.mc.size());
            rvec g_bu = rvec::Zero(acc.mc.size());
            for (int j = 0; j < L; ++j)
                for (int k = 0; k < K; ++k)
                {
                    const int u = j * K + k;
                    const double t = scn.vartheta(j, k, n);
                    const double c = a2p * t * t;
                    const double *o = acc.mx.data() + u * per_ue_dim;
                    const double re = o[0], im = o[1], m2 = o[2];
                    const double abar2 = re * re + im * im;

                    SeTerms &s = b.per_ue[std::size_t(u)];
                    s[0] = c * abar2;
                    s[1] = std::max(0.0, c * (m2 - abar2));
                    for (int q = 3; q < per_ue_dim; ++q)
                        s[q - 1] = o[q];
                    const double lam = s.interference();
                    const double sinr = s.DS() / lam;
                    b.per_ue_sinr[std::size_t(u)] = sinr;
                    b.per_ue_se[std::size_t(u)] = std::log2(1.0 + sinr);
                    for (int q = 0; q < SeTerms::count; ++q)
                        b.mean[q] += s[q] / U;
                    b.sinr += sinr / U;
                    b.se += b.per_ue_se[std::size_t(u)] / U;

                    // Delta-method gradients with respect to the reduced means.
                    const double dse = 1.0 / ((1.0 + sinr) * std::log(2.0)) / U;
                    const double ds = s.DS();
                    g_se[4 * u] = dse * 2.0 * c * re * (lam + ds) / (lam * lam);
                    g_se[4 * u + 1] = dse * 2.0 * c * im * (lam + ds) / (lam * lam);
                    g_se[4 * u + 2] = -dse * ds * c / (lam * lam);
                    g_se[4 * u + 3] = -dse * ds / (lam * lam);
                    g_ds[4 * u] = 2.0 * c * re / U;
                    g_ds[4 * u + 1] = 2.0 * c * im / U;
                    g_bu[4 * u] = -2.0 * c * re / U;
                    g_bu[4 * u + 1] = -2.0 * c * im / U;
                    g_bu[4 * u + 2] = c / U;
                }

            auto se_of = [&](const rvec &g)
            { return std::sqrt(std::max(0.0, g.dot(cov * g)) / T); };
            b.se_stderr = se_of(g_se);
            b.std_error[0] = se_of(g_ds);
            b.std_error[1] = se_of(g_bu);
            for (int q = 0; q < 8; ++q)
                b.std_error[q + 2] = std::sqrt(std::max(0.0, cov(base + q, base + q)) / T);

            if (n_independent(r))
            {
                b.mui_aging_slope = acc.mc[base + 8];
                b.mui_aging_slope_stderr = std::sqrt(std::max(0.0, cov(base + 8, base + 8)) / T);
            }
            if (r == ReceiverKind::mrc)
                b.mui_closed_form = mui_closed_form_mean(scn, bank, r);
            return b;
        }
    }

    std::vector<std::vector<SeBreakdown>> estimate_terms(const Scenario &scn, const EstimatorBank &bank,
                                                         const TermOptions &opt)
    {
        if (opt.trials < 2)
            throw ConfigError("at least 2 trials are needed to estimate the desired-signal term");
        if (opt.receivers.empty() || opt.n_grid.empty())
            throw ConfigError("estimate_terms needs at least one receiver and one time instant");
        if (opt.block_size < 1)
            throw ConfigError("block size must be positive");

        const Engine engine(scn, bank, opt.receivers, opt.n_grid);
        const std::size_t R = opt.receivers.size(), G = opt.n_grid.size();
        const int U = engine.num_users();
        const long nblocks = (opt.trials + opt.block_size - 1) / opt.block_size;

        using Block = std::vector<Accumulator>; // index r * G + ni
        auto fresh = [&]
        {
            Block blk(R * G);
            for (auto &a : blk)
                a.init(per_ue_dim * U, 4 * U + 9);
            return blk;
        };
        auto run_block = [&](long b)
        {
            Block blk = fresh();
            const long t0 = b * opt.block_size, t1 = std::min(opt.trials, t0 + opt.block_size);
            std::vector<std::vector<rvec>> x;
            std::vector<double> slope;
            for (long t = t0; t < t1; ++t)
            {
                TrialStreams st = trial_streams(opt.seed, std::uint64_t(t));
                PilotPhase pp = run_pilot_phase(scn, bank, st);
                engine.trial(pp, x, slope);
                for (std::size_t r = 0; r < R; ++r)
                    for (std::size_t ni = 0; ni < G; ++ni)
                        blk[r * G + ni].add(x[r][ni], reduce(x[r][ni], U, slope[r]));
            }
            return blk;
        };
        Block total = fresh();
        ordered_blocks<Block>(nblocks, resolve_threads(opt.threads), run_block, [&](Block &&blk)
                              {
                                  for (std::size_t i = 0; i < total.size(); ++i)
                                      total[i].merge(blk[i]); });

        std::vector<std::vector<SeBreakdown>> out(R);
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t ni = 0; ni < G; ++ni)
                out[r].push_back(finalize(scn, bank, total[r * G + ni], opt.receivers[r], opt.n_grid[ni], opt.seed));
        return out;
    }

    SeBreakdown estimate_terms(const Scenario &scn, ReceiverKind receiver, int n, long trials, std::uint64_t seed,
                               int threads)
    {
        EstimatorBank bank(scn);
        TermOptions opt;
        opt.receivers = {receiver};
        opt.n_grid = {n};
        opt.trials = trials;
        opt.seed = seed;
        opt.threads = threads;
        return estimate_terms(scn, bank, opt)[0][0];
    }

    // ---------- Sum SE ----------

    double sum_se(const std::vector<int> &n_grid, const std::vector<double> &cell_sum_se, int num_cells, int tau_c,
                  int lambda)
    {
        if (n_grid.empty() || n_grid.size() != cell_sum_se.size())
            throw std::invalid_argument("sum_se: grid and values differ in length");
        if (!std::is_sorted(n_grid.begin(), n_grid.end()) || n_grid.front() != lambda || n_grid.back() != tau_c)
            throw std::invalid_argument("sum_se: grid must be sorted and span [lambda, tau_c]");
        double total = 0.0;
        std::size_t seg = 0;
        for (int n = lambda; n <= tau_c; ++n)
        {
            while (seg + 1 < n_grid.size() && n_grid[seg + 1] < n)
                ++seg;
            if (n == n_grid[seg] || seg + 1 == n_grid.size())
                total += cell_sum_se[seg];
            else
            {
                const double w = double(n - n_grid[seg]) / double(n_grid[seg + 1] - n_grid[seg]);
                total += (1.0 - w) * cell_sum_se[seg] + w * cell_sum_se[seg + 1];
            }
        }
        return total / (double(num_cells) * double(tau_c));
    }

    double sum_se(const std::vector<SeBreakdown> &rows, int num_cells, int tau_c, int lambda)
    {
        std::vector<int> g;
        std::vector<double> v;
        for (const auto &r : rows)
        {
            g.push_back(r.n);
            double s = 0.0;
            for (double x : r.per_ue_se)
                s += x;
            v.push_back(s);
        }
        return sum_se(g, v, num_cells, tau_c, lambda);
    }

    // ---------- Closed-form MUI ----------

    double mui_closed_form(const Scenario &scn, const EstimatorBank &bank, ReceiverKind receiver, int bs, int user)
    {
        if (receiver != ReceiverKind::mrc)
            throw ConfigError("the closed-form MUI term exists only for MRC");
        const double a2p = std::pow(scn.hw.alpha_ue(), 2) * scn.cfg.data_power_w;
        const auto Ad = scn.alpha_bs.cast<cplx>().asDiagonal();
        const cmat HA = bank.C_hat(bs, user, bs) * Ad;
        double s = 0.0;
        for (int l = 0; l < scn.L(); ++l)
            for (int i = 0; i < scn.K(); ++i)
            {
                if (i == user)
                    continue;
                // Tr(C_hat A C_g A)
                s += a2p * (HA * scn.channels.C_g(l, i, bs) * Ad).trace().real();
            }
        return s;
    }

    double mui_closed_form_mean(const Scenario &scn, const EstimatorBank &bank, ReceiverKind receiver)
    {
        double s = 0.0;
        for (int j = 0; j < scn.L(); ++j)
            for (int k = 0; k < scn.K(); ++k)
                s += mui_closed_form(scn, bank, receiver, j, k);
        return s / (scn.L() * scn.K());
    }

    // ---------- Aging laws ----------

    namespace
    {
        AgingFit fit_aging(const std::vector<double> &x, const std::vector<double> &y)
        {
            const double n = double(x.size());
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                mx += x[i] / n;
                my += y[i] / n;
            }
            double sxx = 0.0, sxy = 0.0, syy = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                sxx += (x[i] - mx) * (x[i] - mx);
                sxy += (x[i] - mx) * (y[i] - my);
                syy += (y[i] - my) * (y[i] - my);
            }
            AgingFit f;
            f.e = sxx > 0.0 ? sxy / sxx : 0.0;
            f.c = my - f.e * mx;
            double ssr = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                const double r = y[i] - (f.e * x[i] + f.c);
                ssr += r * r;
                f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
            }
            f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
            return f;
        }
    }

    AgingReport aging_scaling_check(const Scenario &scn, const std::vector<SeBreakdown> &rows)
    {
        if (rows.size() < 3)
            throw std::invalid_argument("aging_scaling_check: need at least three time instants");
        const int U = scn.L() * scn.K();
        std::vector<double> x, ds, bu, pc, mui;
        const SeBreakdown *at_lambda = nullptr;
        for (const auto &r : rows)
        {
            if (r.receiver != rows.front().receiver)
                throw std::invalid_argument("aging_scaling_check: rows mix receivers");
            double t2 = 0.0;
            for (int l = 0; l < scn.L(); ++l)
                for (int k = 0; k < scn.K(); ++k)
                    t2 += std::pow(scn.vartheta(l, k, r.n), 2) / U;
            x.push_back(t2);
            ds.push_back(r.mean.DS());
            bu.push_back(r.mean.BU());
            pc.push_back(r.mean.PC());
            mui.push_back(r.mean.MUI());
            if (r.n == scn.lambda())
                at_lambda = &r;
        }
        if (!at_lambda)
            throw std::invalid_argument("aging_scaling_check: rows must include the estimation instant");

        AgingReport rep;
        rep.DS = fit_aging(x, ds);
        rep.BU = fit_aging(x, bu);
        rep.PC = fit_aging(x, pc);
        rep.MUI = fit_aging(x, mui);
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            const double dev = std::abs(ds[i] - x[i] * at_lambda->mean.DS());
            const double se = rows[i].std_error.DS();
            const double z = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : INFINITY);
            rep.ds_ratio_max_z = std::max(rep.ds_ratio_max_z, z);
        }
        rep.ds_pure_scaling = rep.ds_ratio_max_z <= 3.0;
        rep.mui_slope = at_lambda->mui_aging_slope;
        rep.mui_slope_stderr = at_lambda->mui_aging_slope_stderr;
        rep.mui_flat = !std::isnan(rep.mui_slope) && std::abs(rep.mui_slope) <= 3.0 * rep.mui_slope_stderr;
        return rep;
    }

    // ---------- Sample-level decomposition ----------

    DecompositionReport decomposition_check(const Scenario &scn, const EstimatorBank &bank, ReceiverKind receiver,
                                            int n, long trials, std::uint64_t seed)
    {
        if (trials < 2)
            throw ConfigError("decomposition_check needs at least 2 trials");
        const int L = scn.L(), K = scn.K(), N = scn.N(), U = L * K;
        const double p = scn.cfg.data_power_w, s2 = scn.cfg.noise_power_w;
        const double a2p = std::pow(scn.hw.alpha_ue(), 2) * p;
        const double tx_power = ue_transmit_power(p, scn.hw);
        const Engine engine(scn, bank, {receiver}, {n});

        double mean_d = 0.0, m2_d = 0.0, mean_pow = 0.0, mean_sum = 0.0;
        std::vector<std::vector<rvec>> x;
        std::vector<double> slope;
        std::vector<std::vector<std::vector<cmat>>> V;
        for (long t = 0; t < trials; ++t)
        {
            TrialStreams st = trial_streams(seed, std::uint64_t(t));
            PilotPhase pp = run_pilot_phase(scn, bank, st);
            engine.trial(pp, x, slope, &V);

            // Channels at n, symbols and transmit chains.
            std::vector<UeChannels> gn;
            std::vector<cplx> s(static_cast<std::size_t>(U));
            for (int l = 0; l < L; ++l)
                for (int i = 0; i < K; ++i)
                {
                    const double w0 = scn.vartheta(l, i, n), w1 = scn.vartheta_bar(l, i, n);
                    const UeChannels &now = pp.at_lambda.at(l, i);
                    gn.push_back(w1 > 0.0 ? scn.channels.age(now, scn.channels.draw_ue(l, i, st.data), w0, w1) : now);
                }
            for (int u = 0; u < U; ++u)
                s[std::size_t(u)] = ue_transmit_chain(complex_normal(st.data, 1.0), p, scn.hw, st.data);

            double d_sum = 0.0, pow_sum = 0.0, term_sum = 0.0;
            for (int j = 0; j < L; ++j)
            {
                cvec clean = cvec::Zero(N);
                rvec D = rvec::Zero(N);
                for (int u = 0; u < U; ++u)
                {
                    const cvec &g = gn[std::size_t(u)].aggregate[std::size_t(j)];
                    clean.noalias() += s[std::size_t(u)] * g;
                    D += tx_power * g.cwiseAbs2();
                }
                clean += std::sqrt(s2) * complex_normal_vector(st.data, N);
                BsChainOutput y = bs_receive_chain(clean, scn.hw, D, s2, st.data);
                for (int k = 0; k < K; ++k)
                {
                    const int u = j * K + k;
                    const double power = std::norm(V[0][0][std::size_t(j)].col(k).dot(y.y));
                    const double *o = x[0][0].data() + u * per_ue_dim;
                    double predicted = a2p * std::pow(scn.vartheta(j, k, n), 2) * o[2];
                    for (int q = 3; q < per_ue_dim; ++q)
                        predicted += o[q];
                    pow_sum += power / U;
                    term_sum += predicted / U;
                    d_sum += (power - predicted) / U;
                }
            }
            const double inv = 1.0 / double(t + 1);
            const double delta = d_sum - mean_d;
            mean_d += delta * inv;
            m2_d += delta * (d_sum - mean_d);
            mean_pow += (pow_sum - mean_pow) * inv;
            mean_sum += (term_sum - mean_sum) * inv;
        }
        DecompositionReport rep;
        rep.trials = trials;
        rep.received_power = mean_pow;
        rep.term_sum = mean_sum;
        rep.difference = mean_d;
        rep.std_error = std::sqrt(m2_d / double(trials - 1) / double(trials));
        return rep;
    }
}
