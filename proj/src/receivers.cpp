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

#include "irsmimo/receivers.hpp"

#include <algorithm>
#include <cctype>

namespace irsmimo
{
    std::string to_string(ReceiverKind r)
    {
        switch (r)
        {
        case ReceiverKind::mrc:
            return "mrc";
        case ReceiverKind::du_mmse:
            return "du-mmse";
        case ReceiverKind::daa_mmse:
            return "daa-mmse";
        }
        return "?";
    }

    ReceiverKind parse_receiver(const std::string &name)
    {
        std::string s = name;
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c)
                       { return c == '_' ? '-' : char(std::tolower(c)); });
        if (s == "mrc")
            return ReceiverKind::mrc;
        if (s == "du-mmse" || s == "du")
            return ReceiverKind::du_mmse;
        if (s == "daa-mmse" || s == "daa")
            return ReceiverKind::daa_mmse;
        throw ConfigError("unknown receiver: " + name);
    }

    cvec mrc(const EstimationResult &est, int bs, int user)
    {
        return est.at(bs, user, bs);
    }

    // ----- DAA-MMSE -----

    cmat daa_signal_static(const Scenario &scn, const EstimatorBank &bank, int bs, int n)
    {
        const int L = scn.L(), K = scn.K(), N = scn.N();
        const double w = scn.hw.alpha_ue() * (1.0 + scn.hw.kappa_ue * scn.hw.kappa_ue) * scn.cfg.data_power_w;
        cmat S = cmat::Zero(N, N);
        for (int l = 0; l < L; ++l)
            for (int i = 0; i < K; ++i)
            {
                const double t = scn.vartheta(l, i, n), tb = scn.vartheta_bar(l, i, n);
                S += w * (t * t) * bank.C_err(l, i, bs);
                if (tb > 0.0)
                    S += w * (tb * tb) * scn.channels.C_g(l, i, bs);
            }
        return S;
    }

    cmat daa_signal_covariance(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs,
                               int n)
    {
        const int L = scn.L(), K = scn.K();
        const double w = scn.hw.alpha_ue() * (1.0 + scn.hw.kappa_ue * scn.hw.kappa_ue) * scn.cfg.data_power_w;
        cmat S = daa_signal_static(scn, bank, bs, n);
        for (int l = 0; l < L; ++l)
            for (int i = 0; i < K; ++i)
            {
                const double t = scn.vartheta(l, i, n);
                const cvec &g = est.at(l, i, bs);
                S.noalias() += (w * t * t) * g * g.adjoint();
            }
        return S;
    }

    cmat daa_common_matrix(const Scenario &scn, const cmat &signal_cov)
    {
        const rvec &A = scn.alpha_bs;
        const double kb2 = scn.hw.kappa_bs * scn.hw.kappa_bs, s2 = scn.cfg.noise_power_w;
        cmat B = A.cast<cplx>().asDiagonal() * signal_cov * A.cast<cplx>().asDiagonal();
        for (Eigen::Index m = 0; m < B.rows(); ++m)
        {
            const double D = signal_cov(m, m).real(); // E[D | ghat]
            B(m, m) += kb2 * A[m] * A[m] * D + A[m] * (1.0 - A[m]) * ((1.0 + kb2) * D + s2) + s2 * A[m] * A[m];
        }
        return linalg::hermitian_part(B);
    }

    cvec daa_c_vector(const Scenario &scn, const EstimationResult &est, int bs, int user, int n)
    {
        const double scale = scn.hw.alpha_ue() * scn.vartheta(bs, user, n) * std::sqrt(scn.cfg.data_power_w);
        return scale * (scn.alpha_bs.cast<cplx>().asDiagonal() * est.at(bs, user, bs));
    }

    cmat daa_b_matrix(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs, int user,
                      int n)
    {
        cmat B = daa_common_matrix(scn, daa_signal_covariance(scn, bank, est, bs, n));
        cvec c = daa_c_vector(scn, est, bs, user, n);
        B.noalias() -= c * c.adjoint();
        return linalg::hermitian_part(B);
    }

    cvec daa_mmse(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs, int user, int n)
    {
        return linalg::solve_hpd(daa_b_matrix(scn, bank, est, bs, user, n), daa_c_vector(scn, est, bs, user, n),
                                 "DAA-MMSE matrix B");
    }

    cmat daa_mmse_all(const Scenario &scn, const EstimationResult &est, int bs, int n, const cmat &signal_static)
    {
        const int L = scn.L(), K = scn.K(), N = scn.N();
        const double w = scn.hw.alpha_ue() * (1.0 + scn.hw.kappa_ue * scn.hw.kappa_ue) * scn.cfg.data_power_w;
        cmat S = signal_static;
        for (int l = 0; l < L; ++l)
            for (int i = 0; i < K; ++i)
            {
                const double t = scn.vartheta(l, i, n);
                const cvec &g = est.at(l, i, bs);
                S.noalias() += (w * t * t) * g * g.adjoint();
            }
        linalg::HpdSolver solver(daa_common_matrix(scn, S), "DAA-MMSE matrix B");
        cmat C(N, K);
        for (int k = 0; k < K; ++k)
            C.col(k) = daa_c_vector(scn, est, bs, k, n);
        return solver.solve(C);
    }

    // ----- DU-MMSE -----

    cmat du_static(const Scenario &scn, const EstimatorBank &bank, int bs)
    {
        const int N = scn.N();
        const double p = scn.cfg.data_power_w;
        cmat S = scn.cfg.noise_power_w * cmat::Identity(N, N);
        for (int l = 0; l < scn.L(); ++l)
            for (int i = 0; i < scn.K(); ++i)
                S += p * bank.C_err(l, i, bs);
        return S;
    }

    cmat du_mmse_all(const Scenario &scn, const EstimationResult &est, int bs, const cmat &static_part)
    {
        const int K = scn.K(), N = scn.N();
        const double p = scn.cfg.data_power_w;
        cmat S = static_part;
        for (int l = 0; l < scn.L(); ++l)
            for (int i = 0; i < K; ++i)
            {
                const cvec &g = est.at(l, i, bs);
                S.noalias() += p * g * g.adjoint();
            }
        linalg::HpdSolver solver(linalg::hermitian_part(S), "DU-MMSE matrix");
        cmat G(N, K);
        for (int k = 0; k < K; ++k)
            G.col(k) = est.at(bs, k, bs);
        return solver.solve(G);
    }

    cvec du_mmse(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs, int user)
    {
        return du_mmse_all(scn, est, bs, du_static(scn, bank, bs)).col(user);
    }

    double conditional_sinr(const cvec &v, const cvec &c, const cmat &B)
    {
        const double num = std::norm(c.dot(v));
        const double den = v.dot(B * v).real();
        if (!(den > 0.0))
            throw NumericalError("conditional_sinr: non-positive interference power");
        return num / den;
    }
}
