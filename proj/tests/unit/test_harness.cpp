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

#include "test_util.hpp"

#include "irsmimo/config.hpp"

#include <catch_amalgamated.hpp>

using namespace irsmimo;
using Catch::Approx;

namespace
{
    SweepSpec small_spec()
    {
        SweepSpec s = default_spec();
        apply_desk_scale(s);
        s.axes.clear();
        s.receivers = {ReceiverKind::mrc, ReceiverKind::daa_mmse};
        s.trials = 40;
        s.n_values = {3, 31, 60};
        s.threads = 1;
        return s;
    }
}

TEST_CASE("apply_parameter sets named fields", "[harness]")
{
    SystemConfig cfg;
    HardwareProfile hw;
    apply_parameter(cfg, hw, "velocity_kmh", "144");
    CHECK(cfg.ue_speed_mps == Approx(40.0));
    apply_parameter(cfg, hw, "irs_elements", "225");
    CHECK(cfg.irs_array.horizontal == 15);
    CHECK(cfg.irs_array.vertical == 15);
    apply_parameter(cfg, hw, "irs_elements", "64");
    CHECK(cfg.num_elements() == 64);
    apply_parameter(cfg, hw, "irs_elements", "0");
    CHECK(cfg.num_elements() == 0);
    apply_parameter(cfg, hw, "bits", "3");
    CHECK(hw.bits_ue == 3);
    CHECK(hw.bits_bs == 3);
    apply_parameter(cfg, hw, "bits_bs", "ideal");
    CHECK_FALSE(hw.bits_bs.has_value());
    apply_parameter(cfg, hw, "hardware", "ideal");
    CHECK(hw.kappa_ue == 0.0);
    apply_parameter(cfg, hw, "data_power_dbm", "20");
    CHECK(cfg.data_power_w == Approx(0.1));

    CHECK_THROWS_AS(apply_parameter(cfg, hw, "antennas", "4"), ConfigError);
    CHECK_THROWS_AS(apply_parameter(cfg, hw, "cells", "2.5"), ConfigError);
    CHECK_THROWS_AS(apply_parameter(cfg, hw, "bits", "0"), ConfigError);
    CHECK_THROWS_AS(apply_parameter(cfg, hw, "hardware", "perfect"), ConfigError);
    CHECK_THROWS_AS(apply_parameter(cfg, hw, "velocity_kmh", "fast"), ConfigError);
    for (const auto &name : sweepable_parameters())
        CHECK_THROWS_AS(apply_parameter(cfg, hw, name, "not-a-value"), ConfigError);
}

TEST_CASE("sweep produces the full product of rows", "[harness]")
{
    SweepSpec s = small_spec();
    s.axes = {{"velocity_kmh", {"0", "72"}}, {"bits", {"2", "ideal"}}};
    std::vector<SweepSummary> summary;
    const auto rows = run_sweep(s, &summary);
    REQUIRE(rows.size() == 2 * 2 * 2 * 3);
    CHECK(summary.size() == 2 * 2 * 2);
    // first axis outermost, then receivers, then instants
    CHECK(rows.front().axis_values == std::vector<std::pair<std::string, std::string>>{{"velocity_kmh", "0"},
                                                                                       {"bits", "2"}});
    CHECK(rows[3].receiver == ReceiverKind::daa_mmse);
    CHECK(rows[6].axis_values[1].second == "ideal");
    CHECK(rows.back().axis_values[0].second == "72");
    for (const auto &r : rows)
    {
        CHECK(r.se > 0.0);
        CHECK(r.se_stderr > 0.0);
        CHECK(r.seed == s.seed);
        CHECK(std::isnan(r.mui_closed_form) == (r.receiver != ReceiverKind::mrc));
    }
    for (const auto &sm : summary)
    {
        REQUIRE(sm.sum_se);
        CHECK(*sm.sum_se > 0.0);
    }
}

TEST_CASE("frame sum is left empty when the grid does not span the frame", "[harness]")
{
    SweepSpec s = small_spec();
    s.n_values = {s.base.estimation_instant(), 20};
    std::vector<SweepSummary> summary;
    const auto rows = run_sweep(s, &summary);
    CHECK(rows.size() == 2 * s.receivers.size());
    REQUIRE(summary.size() == s.receivers.size());
    for (const auto &sm : summary)
        CHECK_FALSE(sm.sum_se);
}

TEST_CASE("bad sweeps fail before any computation", "[harness]")
{
    SweepSpec s = small_spec();
    s.trials = 1000000000; // would take hours if anything ran
    s.axes = {{"velocity_kmh", {"0"}}, {"warp_factor", {"9"}}};
    CHECK_THROWS_AS(run_sweep(s), ConfigError);
    s.axes = {{"velocity_kmh", {}}};
    CHECK_THROWS_AS(run_sweep(s), ConfigError);
    s.axes = {{"bits", {"2"}}, {"bits", {"3"}}};
    CHECK_THROWS_AS(run_sweep(s), ConfigError);
    s.axes = {{"cells", {"2", "0"}}};
    CHECK_THROWS_AS(run_sweep(s), ConfigError);
    s.axes.clear();
    s.n_values = {2};
    CHECK_THROWS_AS(run_sweep(s), ConfigError);
    s.n_values = {61};
    CHECK_THROWS_AS(run_sweep(s), ConfigError);
    s.n_values.clear();
    s.receivers.clear();
    CHECK_THROWS_AS(run_sweep(s), ConfigError);
}

TEST_CASE("sweeps are reproducible", "[harness]")
{
    SweepSpec s = small_spec();
    const auto a = run_sweep(s);
    s.threads = 2;
    const auto b = run_sweep(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a[i].se == b[i].se);
        CHECK(a[i].terms.v == b[i].terms.v);
    }
}

TEST_CASE("instant grid of a sweep", "[harness]")
{
    SweepSpec s = small_spec();
    s.n_values = {60, 3, 31, 3};
    CHECK(s.n_grid(s.base) == std::vector<int>{3, 31, 60});
    s.n_values.clear();
    s.n_stride = 20;
    CHECK(s.n_grid(s.base) == std::vector<int>{3, 23, 43, 60});
}

TEST_CASE("QoS crossing", "[harness]")
{
    const int lambda = 3, tau_c = 200;
    std::vector<int> n;
    std::vector<double> linear, flat;
    for (int t = lambda; t <= tau_c; t += 7)
    {
        n.push_back(t);
        linear.push_back(3.0 - 0.01 * (t - lambda));
        flat.push_back(2.0);
    }
    n.push_back(tau_c);
    linear.push_back(3.0 - 0.01 * (tau_c - lambda));
    flat.push_back(2.0);

    CHECK(*qos_crossing(n, linear, 2.5) == Approx(lambda + 50).epsilon(1e-12));
    CHECK(*qos_crossing(n, flat, 1.5) == tau_c);
    CHECK(*qos_crossing(n, flat, 2.0) == tau_c);
    CHECK_FALSE(qos_crossing(n, flat, 2.1).has_value());
    CHECK_FALSE(qos_crossing(n, linear, 3.5).has_value());

    double prev = tau_c;
    for (double q = 1.0; q <= 3.0; q += 0.05)
    {
        const double c = *qos_crossing(n, linear, q);
        CHECK(c <= prev);
        prev = c;
    }
    CHECK_THROWS_AS(qos_crossing(n, {1.0}, 0.5), std::invalid_argument);

    // rows must belong to one receiver and be sorted by n
    std::vector<ResultRow> rows(2);
    rows[0].n = 3;
    rows[0].se = 2.0;
    rows[1].n = 60;
    rows[1].se = 1.0;
    CHECK(*qos_crossing(rows, 1.5) == Approx(31.5));
    std::swap(rows[0], rows[1]);
    CHECK_THROWS_AS(qos_crossing(rows, 1.5), std::invalid_argument);
    std::swap(rows[0], rows[1]);
    rows[1].receiver = ReceiverKind::daa_mmse;
    CHECK_THROWS_AS(qos_crossing(rows, 1.5), std::invalid_argument);
}
