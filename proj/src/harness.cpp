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

#include "irsmimo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace irsmimo
{
    namespace
    {
        double parse_double(const std::string &name, const std::string &value)
        {
            try
            {
                std::size_t pos = 0;
                double v = std::stod(value, &pos);
                if (pos != value.size() || !std::isfinite(v))
                    throw std::invalid_argument(value);
                return v;
            }
            catch (const std::exception &)
            {
                throw ConfigError("parameter '" + name + "' expects a number, got '" + value + "'");
            }
        }

        int parse_int(const std::string &name, const std::string &value)
        {
            double v = parse_double(name, value);
            if (v != std::floor(v) || std::abs(v) > 1e9)
                throw ConfigError("parameter '" + name + "' expects an integer, got '" + value + "'");
            return int(v);
        }

        Resolution parse_bits(const std::string &name, const std::string &value)
        {
            if (value == "ideal")
                return std::nullopt;
            int b = parse_int(name, value);
            if (b < 1)
                throw ConfigError("parameter '" + name + "' must be 'ideal' or at least 1 bit");
            return b;
        }

        // M = M_H M_V with M_H the largest divisor not above sqrt(M).
        ArrayDims factor_elements(int M)
        {
            if (M < 0)
                throw ConfigError("irs_elements must be non-negative");
            if (M == 0)
                return {0, 0};
            int h = int(std::floor(std::sqrt(double(M))));
            while (M % h != 0)
                --h;
            return {h, M / h};
        }

        PhaseMode parse_phase_mode(const std::string &value)
        {
            if (value == "random")
                return PhaseMode::random;
            if (value == "zero")
                return PhaseMode::zero;
            if (value == "los_align" || value == "los-align")
                return PhaseMode::los_align;
            throw ConfigError("phase_mode must be random, zero or los_align, got '" + value + "'");
        }
    }

    const std::vector<std::string> &sweepable_parameters()
    {
        static const std::vector<std::string> names = {
            "cells", "users_per_cell", "bs_horizontal", "bs_vertical", "irs_horizontal", "irs_vertical",
            "irs_elements", "frame_length", "pilot_length", "data_power_dbm", "pilot_power_dbm",
            "noise_power_dbm", "carrier_hz", "sample_period_s", "velocity_kmh", "area_km", "direct_loss_db",
            "kappa_ue", "kappa_bs", "bits", "bits_ue", "bits_bs", "hardware", "irs_bs_rank", "phase_mode"};
        return names;
    }

    void apply_parameter(SystemConfig &cfg, HardwareProfile &hw, const std::string &name, const std::string &value)
    {
        if (name == "cells")
            cfg.num_cells = parse_int(name, value);
        else if (name == "users_per_cell")
            cfg.users_per_cell = parse_int(name, value);
        else if (name == "bs_horizontal")
            cfg.bs_array.horizontal = parse_int(name, value);
        else if (name == "bs_vertical")
            cfg.bs_array.vertical = parse_int(name, value);
        else if (name == "irs_horizontal")
            cfg.irs_array.horizontal = parse_int(name, value);
        else if (name == "irs_vertical")
            cfg.irs_array.vertical = parse_int(name, value);
        else if (name == "irs_elements")
            cfg.irs_array = factor_elements(parse_int(name, value));
        else if (name == "frame_length")
            cfg.frame_length = parse_int(name, value);
        else if (name == "pilot_length")
            cfg.pilot_length = parse_int(name, value);
        else if (name == "data_power_dbm")
            cfg.data_power_w = dbm_to_watts(parse_double(name, value));
        else if (name == "pilot_power_dbm")
            cfg.pilot_power_w = dbm_to_watts(parse_double(name, value));
        else if (name == "noise_power_dbm")
            cfg.noise_power_w = dbm_to_watts(parse_double(name, value));
        else if (name == "carrier_hz")
            cfg.carrier_hz = parse_double(name, value);
        else if (name == "sample_period_s")
            cfg.sample_period_s = parse_double(name, value);
        else if (name == "velocity_kmh")
            cfg.ue_speed_mps = parse_double(name, value) / 3.6;
        else if (name == "area_km")
            cfg.area_km = parse_double(name, value);
        else if (name == "direct_loss_db")
            cfg.direct_extra_loss_db = parse_double(name, value);
        else if (name == "kappa_ue")
            hw.kappa_ue = parse_double(name, value);
        else if (name == "kappa_bs")
            hw.kappa_bs = parse_double(name, value);
        else if (name == "bits")
            hw.bits_ue = hw.bits_bs = parse_bits(name, value);
        else if (name == "bits_ue")
            hw.bits_ue = parse_bits(name, value);
        else if (name == "bits_bs")
            hw.bits_bs = parse_bits(name, value);
        else if (name == "hardware")
        {
            if (value == "ideal")
                hw = HardwareProfile::ideal();
            else if (value == "impaired")
                hw = HardwareProfile{};
            else
                throw ConfigError("hardware must be 'ideal' or 'impaired', got '" + value + "'");
        }
        else if (name == "irs_bs_rank")
            cfg.irs.bs_link_rank = parse_int(name, value);
        else if (name == "phase_mode")
            cfg.irs.phase_mode = parse_phase_mode(value);
        else
            throw ConfigError("unknown parameter: " + name);
    }

    void SweepSpec::validate() const
    {
        base.validate();
        hardware.validate();
        if (receivers.empty())
            throw ConfigError("at least one receiver is required");
        if (trials < 2)
            throw ConfigError("at least 2 trials are required");
        if (n_stride < 1)
            throw ConfigError("n_stride must be at least 1");
        for (const auto &ax : axes)
        {
            const auto &known = sweepable_parameters();
            if (std::find(known.begin(), known.end(), ax.name) == known.end())
                throw ConfigError("unknown sweep parameter: " + ax.name);
            if (ax.values.empty())
                throw ConfigError("sweep axis '" + ax.name + "' has no values");
            for (const auto &v : ax.values)
            {
                SystemConfig c = base;
                HardwareProfile h = hardware;
                apply_parameter(c, h, ax.name, v);
            }
        }
        for (std::size_t a = 0; a < axes.size(); ++a)
            for (std::size_t b = a + 1; b < axes.size(); ++b)
                if (axes[a].name == axes[b].name)
                    throw ConfigError("sweep axis '" + axes[a].name + "' appears twice");
    }

    std::vector<int> SweepSpec::n_grid(const SystemConfig &cfg) const
    {
        if (n_values.empty())
            return make_n_grid(cfg.estimation_instant(), cfg.frame_length, n_stride);
        std::vector<int> g = n_values;
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        for (int n : g)
            if (n < cfg.estimation_instant() || n > cfg.frame_length)
                throw ConfigError("time instant " + std::to_string(n) + " outside [lambda, tau_c]");
        return g;
    }

    std::vector<ResultRow> run_sweep(const SweepSpec &spec, std::vector<SweepSummary> *summary)
    {
        spec.validate();

        // Validate every combination before computing anything.
        std::size_t combos = 1;
        for (const auto &ax : spec.axes)
            combos *= ax.values.size();
        std::vector<std::pair<SystemConfig, HardwareProfile>> configs;
        std::vector<std::vector<std::pair<std::string, std::string>>> labels;
        for (std::size_t c = 0; c < combos; ++c)
        {
            SystemConfig cfg = spec.base;
            HardwareProfile hw = spec.hardware;
            std::vector<std::pair<std::string, std::string>> lab;
            std::size_t rem = c;
            std::vector<std::size_t> idx(spec.axes.size());
            for (std::size_t a = spec.axes.size(); a-- > 0;)
            {
                idx[a] = rem % spec.axes[a].values.size();
                rem /= spec.axes[a].values.size();
            }
            for (std::size_t a = 0; a < spec.axes.size(); ++a)
            {
                const std::string &v = spec.axes[a].values[idx[a]];
                apply_parameter(cfg, hw, spec.axes[a].name, v);
                lab.emplace_back(spec.axes[a].name, v);
            }
            cfg.validate();
            hw.validate();
            spec.n_grid(cfg);
            configs.emplace_back(cfg, hw);
            labels.push_back(std::move(lab));
        }

        std::vector<ResultRow> rows;
        for (std::size_t c = 0; c < combos; ++c)
        {
            const auto t0 = std::chrono::steady_clock::now();
            const auto &[cfg, hw] = configs[c];
            Scenario scn = build_scenario(cfg, hw, spec.seed);
            EstimatorBank bank(scn);
            TermOptions opt;
            opt.receivers = spec.receivers;
            opt.n_grid = spec.n_grid(cfg);
            opt.trials = spec.trials;
            opt.seed = spec.seed;
            opt.threads = spec.threads;
            auto res = estimate_terms(scn, bank, opt);
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const double per_row = dt / double(res.size() * opt.n_grid.size());

            for (std::size_t r = 0; r < res.size(); ++r)
            {
                for (const SeBreakdown &b : res[r])
                {
                    ResultRow row;
                    row.axis_values = labels[c];
                    row.receiver = b.receiver;
                    row.n = b.n;
                    row.terms = b.mean;
                    row.sinr = b.sinr;
                    row.se = b.se;
                    row.se_stderr = b.se_stderr;
                    row.seed = b.seed;
                    row.mui_stderr = b.std_error.MUI();
                    row.mui_closed_form = b.mui_closed_form;
                    row.wall_time_s = per_row;
                    rows.push_back(std::move(row));
                }
                if (summary)
                {
                    const bool spans = opt.n_grid.front() == cfg.estimation_instant() &&
                                       opt.n_grid.back() == cfg.frame_length;
                    summary->push_back({labels[c], spec.receivers[r],
                                        spans ? std::optional<double>(sum_se(res[r], cfg.num_cells, cfg.frame_length,
                                                                             cfg.estimation_instant()))
                                              : std::nullopt});
                }
            }
        }
        return rows;
    }

    std::optional<double> qos_crossing(const std::vector<int> &n, const std::vector<double> &se, double qos)
    {
        if (n.size() != se.size())
            throw std::invalid_argument("qos_crossing: instants and SE values differ in length");
        if (n.empty() || se.front() < qos)
            return std::nullopt;
        std::size_t last = 0;
        for (std::size_t i = 0; i < se.size(); ++i)
            if (se[i] >= qos)
                last = i;
        if (last + 1 == se.size())
            return double(n.back());
        const double frac = (se[last] - qos) / (se[last] - se[last + 1]);
        return double(n[last]) + frac * double(n[last + 1] - n[last]);
    }

    std::optional<double> qos_crossing(const std::vector<ResultRow> &rows, double qos)
    {
        std::vector<int> n;
        std::vector<double> se;
        for (const auto &r : rows)
        {
            if (r.receiver != rows.front().receiver || r.axis_values != rows.front().axis_values)
                throw std::invalid_argument("qos_crossing: rows must belong to one receiver and configuration");
            if (!n.empty() && r.n <= n.back())
                throw std::invalid_argument("qos_crossing: rows must be sorted by n");
            n.push_back(r.n);
            se.push_back(r.se);
        }
        return qos_crossing(n, se, qos);
    }
}
