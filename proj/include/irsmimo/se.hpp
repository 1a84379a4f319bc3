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

#include "irsmimo/receivers.hpp"

#include <array>
#include <limits>

namespace irsmimo
{
    /// The ten SINR terms of one UE (or their UE average), in watts.
    struct SeTerms
    {
        static constexpr int count = 10;
        static constexpr std::array<const char *, count> names = {"DS", "BU", "CA", "MUI", "PC",
                                                                  "DAC", "TRF", "RRF", "ADC", "NS"};

        std::array<double, count> v{};

        double &operator[](int i) { return v[std::size_t(i)]; }
        double operator[](int i) const { return v[std::size_t(i)]; }

        double DS() const { return v[0]; }
        double BU() const { return v[1]; }
        double CA() const { return v[2]; }
        double MUI() const { return v[3]; }
        double PC() const { return v[4]; }
        double DAC() const { return v[5]; }
        double TRF() const { return v[6]; }
        double RRF() const { return v[7]; }
        double ADC() const { return v[8]; }
        double NS() const { return v[9]; }

        /// Denominator of the SINR: every term except DS.
        double interference() const;
        double sinr() const { return DS() / interference(); }
    };

    struct SeBreakdown
    {
        ReceiverKind receiver = ReceiverKind::mrc;
        int n = 0;
        long trials = 0;
        std::uint64_t seed = 0;

        std::vector<SeTerms> per_ue; // index j * K + k
        std::vector<double> per_ue_sinr;
        std::vector<double> per_ue_se;

        SeTerms mean;   // UE average
        SeTerms std_error; // standard error of the UE average
        double sinr = 0.0; // UE-averaged SINR
        double se = 0.0;   // UE-averaged log2(1 + SINR)
        double se_stderr = 0.0;

        double mui_closed_form = std::numeric_limits<double>::quiet_NaN(); // UE average, MRC only
        /// d MUI / d vartheta^2 for receivers whose combiner does not depend on n (zero in expectation).
        double mui_aging_slope = std::numeric_limits<double>::quiet_NaN();
        double mui_aging_slope_stderr = std::numeric_limits<double>::quiet_NaN();
    };

    struct TermOptions
    {
        std::vector<ReceiverKind> receivers{ReceiverKind::mrc};
        std::vector<int> n_grid;
        long trials = 2000;
        std::uint64_t seed = 1;
        int threads = 1;      // 0 selects the hardware concurrency
        int block_size = 64;  // trials per accumulation block; part of the numerical contract
    };

    /// lambda, lambda + stride, ..., always ending at tau_c.
    std::vector<int> make_n_grid(int lambda, int tau_c, int stride);

    /// Monte Carlo estimate of every term for each receiver and instant: result[r][i]
    /// belongs to opt.receivers[r] at opt.n_grid[i]. All receivers and instants share the
    /// same trials. Results do not depend on opt.threads.
    std::vector<std::vector<SeBreakdown>> estimate_terms(const Scenario &scn, const EstimatorBank &bank,
                                                         const TermOptions &opt);

    SeBreakdown estimate_terms(const Scenario &scn, ReceiverKind receiver, int n, long trials, std::uint64_t seed,
                               int threads = 1);

    /// Per-cell sum SE (1 / (L tau_c)) sum_{n = lambda}^{tau_c} sum_{j,k} log2(1 + SINR), with the
    /// per-instant cell sums linearly interpolated between grid points.
    double sum_se(const std::vector<int> &n_grid, const std::vector<double> &cell_sum_se, int num_cells, int tau_c,
                  int lambda);
    double sum_se(const std::vector<SeBreakdown> &rows, int num_cells, int tau_c, int lambda);

    /// sum_{l} sum_{i != k} a^2 p Tr(C_hat_jk^j A C_g,li^j A). Throws ConfigError unless receiver is MRC.
    double mui_closed_form(const Scenario &scn, const EstimatorBank &bank, ReceiverKind receiver, int bs, int user);
    /// UE average of mui_closed_form.
    double mui_closed_form_mean(const Scenario &scn, const EstimatorBank &bank, ReceiverKind receiver);

    struct AgingFit
    {
        double e = 0.0; // coefficient of vartheta^2
        double c = 0.0; // intercept
        double r2 = 1.0;
        double max_abs_residual = 0.0;
    };

    struct AgingReport
    {
        AgingFit DS, BU, PC, MUI;
        double ds_ratio_max_z = 0.0; // max |DS(n) - vartheta^2 DS(lambda)| / stderr(DS(n))
        double mui_slope = 0.0;
        double mui_slope_stderr = 0.0;
        bool ds_pure_scaling = false;
        bool mui_flat = false;
    };

    /// Fits term(n) = vartheta^2[n - lambda] e + c for DS, BU, PC and MUI. `rows` must belong to
    /// one receiver, contain at least three instants and include lambda.
    AgingReport aging_scaling_check(const Scenario &scn, const std::vector<SeBreakdown> &rows);

    struct DecompositionReport
    {
        long trials = 0;
        double received_power = 0.0; // mean |v^H y[n]|^2 over trials and UEs
        double term_sum = 0.0;       // mean of DS + BU + ... + NS estimators
        double difference = 0.0;     // received_power - term_sum
        double std_error = 0.0;
        double z() const { return std_error > 0.0 ? difference / std_error : 0.0; }
    };

    /// Simulates the data sample y[n] through every chain (fresh innovations, symbols and noises)
    /// and compares E|v^H y|^2 with the sum of the ten term estimators on the same trials.
    DecompositionReport decomposition_check(const Scenario &scn, const EstimatorBank &bank, ReceiverKind receiver,
                                            int n, long trials, std::uint64_t seed);

    /// One trial's pilot phase: channels at lambda and the LMMSE estimates.
    struct PilotPhase
    {
        ChannelState at_lambda;
        EstimationResult est;
    };

    PilotPhase run_pilot_phase(const Scenario &scn, const EstimatorBank &bank, TrialStreams &streams);

    /// Combiners of every user of BS `bs` (columns) for one trial.
    cmat combiners(const Scenario &scn, const EstimatorBank &bank, const EstimationResult &est, ReceiverKind r,
                   int bs, int n);
}
