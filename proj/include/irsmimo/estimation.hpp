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

#include "irsmimo/linalg.hpp"
#include "irsmimo/model.hpp"

namespace irsmimo
{
    /// Covariance of the received pilot of group `user` at BS `bs`:
    ///   sum_l p a^2 A C_g A + sum_l p a (rho + ku^2) A C_g A + kb^2 A Dbar A + s^2 A A + A (I - A) Cbar
    /// with Dbar = diag(sum_l a (1 + ku^2) p C_g) and Cbar = (1 + kb^2) Dbar + s^2 I.
    cmat psi_matrix(const Scenario &scn, int bs, int user);

    /// Precomputed LMMSE maps W = sqrt(p) a vartheta C_g A Psi^-1 and the
    /// estimate/error covariances of every (l, k, j). Built once per scenario.
    class EstimatorBank
    {
    public:
        EstimatorBank() = default;
        explicit EstimatorBank(const Scenario &scn);

        const cmat &psi(int bs, int user) const { return psi_[std::size_t(bs * K_ + user)]; }
        const cmat &W(int cell, int user, int bs) const { return W_[idx3(cell, user, bs)]; }
        const cmat &C_hat(int cell, int user, int bs) const { return C_hat_[idx3(cell, user, bs)]; }
        const cmat &C_err(int cell, int user, int bs) const { return C_err_[idx3(cell, user, bs)]; }

        int num_cells() const { return L_; }
        int users_per_cell() const { return K_; }

    private:
        std::size_t idx3(int a, int b, int c) const { return std::size_t((a * K_ + b) * L_ + c); }

        int L_ = 0, K_ = 0;
        std::vector<cmat> psi_;
        std::vector<cmat> W_;
        std::vector<cmat> C_hat_;
        std::vector<cmat> C_err_;
    };

    /// Channels of every UE at its own pilot instant, g[t_k] = vartheta g[lambda] + vartheta_bar q.
    ChannelState pilot_channels(const Scenario &scn, const ChannelState &at_lambda, Rng &rng);

    struct PilotReception
    {
        std::vector<cvec> y;      // y_p^j[t_k], index j * K + k
        std::vector<cplx> tx;     // UE chain outputs, index l * K + k
        std::vector<cvec> awgn;   // index j * K + k
        std::vector<cvec> eta_bs; // index j * K + k
        std::vector<cvec> n_adc;  // index j * K + k
        const cvec &at(int bs, int user, int K) const { return y[std::size_t(bs * K + user)]; }
    };

    /// Pilot phase through the UE and BS hardware chains. Draw order: per pilot group,
    /// UE distortions for every cell, then per BS the AWGN (awgn stream) and BS distortions.
    PilotReception receive_pilot(const Scenario &scn, const ChannelState &pilot_state, Rng &hw_rng, Rng &awgn_rng);

    struct EstimationResult
    {
        int estimation_instant = 0;
        int num_cells = 0;
        int users_per_cell = 0;
        std::vector<cvec> g_hat; // index (l * K + k) * L + j

        const cvec &at(int cell, int user, int bs) const
        {
            return g_hat[std::size_t((cell * users_per_cell + user) * num_cells + bs)];
        }
    };

    /// ghat_lk^j = W_lk^j y_p^j[t_k] for every (l, k, j).
    EstimationResult lmmse_estimate(const EstimatorBank &bank, const PilotReception &rx, int estimation_instant);
}
