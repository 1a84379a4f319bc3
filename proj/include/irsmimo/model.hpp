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

#include "irsmimo/channel.hpp"
#include "irsmimo/hardware.hpp"

namespace irsmimo
{
    /// Time-orthogonal pilot plan: user k of every cell sends at instant t_k = k + 1 (1-based).
    struct PilotPlan
    {
        int pilot_length = 0;
        double pilot_power_w = 0.0;
        std::vector<int> instants; // t_k
        std::vector<cplx> symbols; // phi_k, unit modulus
        int estimation_instant = 0;

        /// lambda - t_k
        int lag(int user) const { return estimation_instant - instants[std::size_t(user)]; }

        static PilotPlan time_orthogonal(const SystemConfig &cfg);
    };

    /// Everything that is fixed for one experiment: config, hardware, geometry,
    /// channel statistics and IRS phases. Trials share it read-only.
    struct Scenario
    {
        SystemConfig cfg;
        HardwareProfile hw;
        Geometry geom;
        ChannelModel channels;
        std::vector<AgingModel> aging; // index l * K + k
        PilotPlan plan;
        rvec alpha_bs;                 // diag(A)
        std::uint64_t seed = 0;

        int L() const { return cfg.num_cells; }
        int K() const { return cfg.users_per_cell; }
        int N() const { return cfg.num_antennas(); }
        int lambda() const { return plan.estimation_instant; }

        const AgingModel &aging_of(int cell, int user) const { return aging[std::size_t(cell * K() + user)]; }
        /// vartheta_lk[lambda - n] for n >= lambda (or the pilot lag for n < lambda).
        double vartheta(int cell, int user, int n) const { return aging_of(cell, user).correlation(n - lambda()); }
        double vartheta_bar(int cell, int user, int n) const
        {
            return aging_of(cell, user).innovation_weight(n - lambda());
        }
    };

    /// Validates cfg and hw, then builds geometry and channel statistics from `seed`.
    Scenario build_scenario(const SystemConfig &cfg, const HardwareProfile &hw, std::uint64_t seed);

    /// Independent per-trial random streams. An ideal profile never touches `hardware`.
    struct TrialStreams
    {
        Rng channel;
        Rng awgn;
        Rng hardware;
        Rng data; // data-phase innovations, symbols and noises of the sample-level path
    };

    TrialStreams trial_streams(std::uint64_t master_seed, std::uint64_t trial);
}
