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

#include "irsmimo/estimation.hpp"

namespace irsmimo
{
    cmat psi_matrix(const Scenario &scn, int bs, int user)
    {
        const int L = scn.L(), N = scn.N();
        const double p = scn.plan.pilot_power_w;
        const double alpha = scn.hw.alpha_ue(), rho = scn.hw.rho_ue();
        const double ku2 = scn.hw.kappa_ue * scn.hw.kappa_ue, kb2 = scn.hw.kappa_bs * scn.hw.kappa_bs;
        const double s2 = scn.cfg.noise_power_w;
        const rvec &A = scn.alpha_bs;

        cmat sum_C = cmat::Zero(N, N);
        for (int l = 0; l < L; ++l)
            sum_C += scn.channels.C_g(l, user, bs);

        const auto Ad = A.cast<cplx>().asDiagonal();
        cmat ACA = Ad * sum_C * Ad;
        cmat psi = p * alpha * alpha * ACA + p * alpha * (rho + ku2) * ACA;

        rvec Dbar = alpha * (1.0 + ku2) * p * sum_C.diagonal().real();
        rvec Cbar = bs_c_matrix(Dbar, scn.hw.kappa_bs, s2);
        for (int m = 0; m < N; ++m)
            psi(m, m) += kb2 * A[m] * A[m] * Dbar[m] + s2 * A[m] * A[m] + A[m] * (1.0 - A[m]) * Cbar[m];
        return linalg::hermitian_part(psi);
    }

    EstimatorBank::EstimatorBank(const Scenario &scn) : L_(scn.L()), K_(scn.K())
    {
        const double p = scn.plan.pilot_power_w;
        const double alpha = scn.hw.alpha_ue();
        const auto Ad = scn.alpha_bs.cast<cplx>().asDiagonal();

        psi_.resize(std::size_t(L_ * K_));
        W_.resize(std::size_t(L_ * K_ * L_));
        C_hat_.resize(W_.size());
        C_err_.resize(W_.size());
        for (int j = 0; j < L_; ++j)
            for (int k = 0; k < K_; ++k)
            {
                cmat psi = psi_matrix(scn, j, k);
                linalg::HpdSolver solver(psi, "pilot covariance Psi");
                for (int l = 0; l < L_; ++l)
                {
                    const cmat &Cg = scn.channels.C_g(l, k, j);
                    const double gain = std::sqrt(p) * alpha * scn.aging_of(l, k).correlation(scn.plan.lag(k));
                    cmat ACg = Ad * Cg;
                    // W = gain C_g A Psi^-1 = gain (Psi^-1 A C_g)^H
                    cmat W = gain * solver.solve(ACg).adjoint();
                    cmat C_hat = linalg::hermitian_part(gain * W * ACg);
                    C_err_[idx3(l, k, j)] = linalg::hermitian_part(Cg - C_hat);
                    C_hat_[idx3(l, k, j)] = std::move(C_hat);
                    W_[idx3(l, k, j)] = std::move(W);
                }
                psi_[std::size_t(j * K_ + k)] = std::move(psi);
            }
    }

    ChannelState pilot_channels(const Scenario &scn, const ChannelState &at_lambda, Rng &rng)
    {
        ChannelState out;
        out.time_index = -1;
        out.users_per_cell = scn.K();
        for (int l = 0; l < scn.L(); ++l)
            for (int k = 0; k < scn.K(); ++k)
            {
                const AgingModel &ag = scn.aging_of(l, k);
                const int lag = scn.plan.lag(k);
                const double w0 = ag.correlation(lag), w1 = ag.innovation_weight(lag);
                const UeChannels &now = at_lambda.at(l, k);
                if (w1 == 0.0 && w0 == 1.0)
                    out.ue.push_back(now);
                else
                    out.ue.push_back(scn.channels.age(now, scn.channels.draw_ue(l, k, rng), w0, w1));
            }
        return out;
    }

    PilotReception receive_pilot(const Scenario &scn, const ChannelState &pilot_state, Rng &hw_rng, Rng &awgn_rng)
    {
        const int L = scn.L(), K = scn.K(), N = scn.N();
        const double p = scn.plan.pilot_power_w;
        const double s2 = scn.cfg.noise_power_w;
        const double tx_power = ue_transmit_power(p, scn.hw);

        PilotReception rx;
        rx.tx.resize(std::size_t(L * K));
        rx.y.resize(std::size_t(L * K));
        rx.awgn.resize(rx.y.size());
        rx.eta_bs.resize(rx.y.size());
        rx.n_adc.resize(rx.y.size());
        for (int k = 0; k < K; ++k)
        {
            const cplx phi = scn.plan.symbols[std::size_t(k)];
            for (int l = 0; l < L; ++l)
                rx.tx[std::size_t(l * K + k)] = ue_transmit_chain(phi, p, scn.hw, hw_rng);

            for (int j = 0; j < L; ++j)
            {
                cvec clean = cvec::Zero(N);
                rvec D = rvec::Zero(N);
                for (int l = 0; l < L; ++l)
                {
                    const cvec &g = pilot_state.g(l, k, j);
                    clean.noalias() += rx.tx[std::size_t(l * K + k)] * g;
                    D += tx_power * g.cwiseAbs2();
                }
                cvec n = std::sqrt(s2) * complex_normal_vector(awgn_rng, N);
                clean += n;
                BsChainOutput out = bs_receive_chain(clean, scn.hw, bs_d_matrix(D), s2, hw_rng);
                const std::size_t idx = std::size_t(j * K + k);
                rx.y[idx] = std::move(out.y);
                rx.awgn[idx] = std::move(n);
                rx.eta_bs[idx] = std::move(out.eta_bs);
                rx.n_adc[idx] = std::move(out.n_adc);
            }
        }
        return rx;
    }

    EstimationResult lmmse_estimate(const EstimatorBank &bank, const PilotReception &rx, int estimation_instant)
    {
        const int L = bank.num_cells(), K = bank.users_per_cell();
        if (rx.y.size() != std::size_t(L * K))
            throw std::invalid_argument("lmmse_estimate: pilot reception does not match the estimator bank");
        EstimationResult est;
        est.estimation_instant = estimation_instant;
        est.num_cells = L;
        est.users_per_cell = K;
        est.g_hat.resize(std::size_t(L * K * L));
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < L; ++j)
                    est.g_hat[std::size_t((l * K + k) * L + j)] = bank.W(l, k, j) * rx.at(j, k, K);
        return est;
    }
}
