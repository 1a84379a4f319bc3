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

#include "irsmimo/model.hpp"

namespace irsmimo
{
    PilotPlan PilotPlan::time_orthogonal(const SystemConfig &cfg)
    {
        PilotPlan p;
        p.pilot_length = cfg.pilot_length;
        p.pilot_power_w = cfg.pilot_power_w;
        p.estimation_instant = cfg.estimation_instant();
        for (int k = 0; k < cfg.users_per_cell; ++k)
        {
            p.instants.push_back(k + 1);
            p.symbols.emplace_back(1.0, 0.0);
        }
        return p;
    }

    Scenario build_scenario(const SystemConfig &cfg, const HardwareProfile &hw, std::uint64_t seed)
    {
        cfg.validate();
        hw.validate();
        Scenario s;
        s.cfg = cfg;
        s.hw = hw;
        s.seed = seed;
        s.geom = build_geometry(cfg, seed);
        s.channels = ChannelModel(cfg, s.geom, seed);
        for (int l = 0; l < cfg.num_cells; ++l)
            for (int k = 0; k < cfg.users_per_cell; ++k)
                s.aging.push_back({cfg.doppler_hz(l, k), cfg.sample_period_s});
        s.plan = PilotPlan::time_orthogonal(cfg);
        s.alpha_bs = hw.alpha_bs(cfg.num_antennas());
        return s;
    }

    TrialStreams trial_streams(std::uint64_t master_seed, std::uint64_t trial)
    {
        std::uint64_t t = combine_seed(master_seed, trial);
        return {Rng(combine_seed(t, 1)), Rng(combine_seed(t, 2)), Rng(combine_seed(t, 3)), Rng(combine_seed(t, 4))};
    }
}
