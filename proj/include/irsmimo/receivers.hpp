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

#include "irsmimo/estimation.hpp"

#include <string>

namespace irsmimo
{
    enum class ReceiverKind
    {
        mrc,
        du_mmse,
        daa_mmse,
    };

    std::string to_string(ReceiverKind r);
    /// Accepts "mrc", "du-mmse", "daa-mmse" (case-insensitive, '_' allowed for '-').
    ReceiverKind parse_receiver(const std::string &name);

    /// v = ghat_jk^j
    cvec mrc(const EstimationResult &est, int bs, int user);

    /// Conditional covariance of everything BS `bs` receives at instant n given the
    /// estimates, before A is applied: sum over all UEs of a (1 + ku^2) p
    /// (vartheta^2 (ghat ghat^H + C_err) + vartheta_bar^2 C_g).
    cmat daa_signal_covariance(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs,
                               int n);

    /// Trial-independent part of daa_signal_covariance (the C_err and C_g terms).
    cmat daa_signal_static(const Scenario &scn, const EstimatorBank &bank, int bs, int n);

    /// B + a^2 p vartheta^2 A ghat ghat^H A, identical for every user of BS `bs`.
    /// `signal_cov` is daa_signal_covariance(...).
    cmat daa_common_matrix(const Scenario &scn, const cmat &signal_cov);

    /// Interference-plus-noise matrix B_jk of the distortion-and-aging-aware combiner at instant n.
    cmat daa_b_matrix(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs, int user,
                      int n);

    /// c_jk = a vartheta sqrt(p) A ghat_jk^j
    cvec daa_c_vector(const Scenario &scn, const EstimationResult &est, int bs, int user, int n);

    /// v = B^-1 c
    cvec daa_mmse(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs, int user, int n);

    /// Combiners of every user of BS `bs` from one factorization of the common matrix.
    /// Column k is (B + c c^H)^-1 c = B^-1 c / (1 + c^H B^-1 c): the direction of daa_mmse with the
    /// MMSE scale. The SE estimator uses this form; the bound is not invariant to per-trial scale.
    cmat daa_mmse_all(const Scenario &scn, const EstimationResult &est, int bs, int n, const cmat &signal_static);

    /// sum_l sum_i p C_err + s^2 I (trial independent).
    cmat du_static(const Scenario &scn, const EstimatorBank &bank, int bs);

    /// v = (sum p ghat ghat^H + sum p C_err + s^2 I)^-1 ghat_jk
    cvec du_mmse(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, int bs, int user);

    /// Combiners of every user of BS `bs`; column k equals du_mmse(..., k).
    cmat du_mmse_all(const Scenario &scn, const EstimationResult &est, int bs, const cmat &static_part);

    /// |c^H v|^2 / (v^H B v)
    double conditional_sinr(const cvec &v, const cvec &c, const cmat &B);
}
