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

#include "irsmimo/se.hpp"

#include <optional>
#include <string>
#include <utility>

namespace irsmimo
{
    struct SweepAxis
    {
        std::string name;
        std::vector<std::string> values; // textual, applied with apply_parameter
    };

    struct SweepSpec
    {
        SystemConfig base;
        HardwareProfile hardware;
        std::vector<SweepAxis> axes;
        std::vector<ReceiverKind> receivers{ReceiverKind::mrc, ReceiverKind::du_mmse, ReceiverKind::daa_mmse};
        long trials = 20000;
        std::uint64_t seed = 1;
        int threads = 1;            // 0 selects the hardware concurrency; never changes results
        int n_stride = 10;
        std::vector<int> n_values;  // explicit instants; overrides n_stride when non-empty

        /// Throws ConfigError for unknown axis names, empty value lists or bad values,
        /// before any simulation work.
        void validate() const;
        /// Instants evaluated for one configuration.
        std::vector<int> n_grid(const SystemConfig &cfg) const;
    };

    struct ResultRow
    {
        std::vector<std::pair<std::string, std::string>> axis_values;
        ReceiverKind receiver = ReceiverKind::mrc;
        int n = 0;
        SeTerms terms;
        double sinr = 0.0;
        double se = 0.0;
        double se_stderr = 0.0;
        std::uint64_t seed = 0;
        double mui_stderr = 0.0;
        double mui_closed_form = std::numeric_limits<double>::quiet_NaN();
        double wall_time_s = 0.0; // not part of the CSV
    };

    struct SweepSummary
    {
        std::vector<std::pair<std::string, std::string>> axis_values;
        ReceiverKind receiver = ReceiverKind::mrc;
        std::optional<double> sum_se; // per-cell sum SE over the frame; empty unless the grid spans [lambda, tau_c]
    };

    /// Names accepted as sweep axes (and as flat config keys).
    const std::vector<std::string> &sweepable_parameters();

    /// Sets one named parameter from its textual value. Throws ConfigError on unknown
    /// names or malformed values.
    void apply_parameter(SystemConfig &cfg, HardwareProfile &hw, const std::string &name, const std::string &value);

    /// Cartesian product of the axes (first axis outermost) times receivers times instants.
    /// All rows of one axis point share the same trials (common random numbers).
    std::vector<ResultRow> run_sweep(const SweepSpec &spec, std::vector<SweepSummary> *summary = nullptr);

    /// Largest instant with SE >= qos, linearly interpolated between grid points.
    /// std::nullopt when SE is already below qos at the first instant.
    std::optional<double> qos_crossing(const std::vector<int> &n, const std::vector<double> &se, double qos);
    /// Rows of one receiver and configuration, sorted by n.
    std::optional<double> qos_crossing(const std::vector<ResultRow> &rows, double qos);
}
