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

#include "irsmimo/harness.hpp"

#include <string>
#include <vector>

namespace irsmimo
{
    /// Defaults of every knob: four cells, 64 antennas, 100 elements, 5 UEs per cell.
    SweepSpec default_spec();

    /// Reads a TOML file. Sections [system], [hardware], [propagation], [irs] and [sweep]
    /// (with [[sweep.axis]] entries); system, hardware and irs keys may also appear at the
    /// top level. A bare word value such as `bits = ideal` is read as a string.
    /// Throws ConfigError on a missing file, unknown key or type mismatch.
    SweepSpec parse_config(const std::string &path);
    SweepSpec parse_config_string(const std::string &text, const std::string &source = "<string>");

    /// Canonical dump of every field, one `section.key = value` line each.
    std::string canonical_config(const SweepSpec &spec);
    /// Human-readable dump in TOML syntax; defaults not fixed by the model are tagged "# assumed".
    std::string describe_config(const SweepSpec &spec);
    /// 64-bit FNV-1a of canonical_config, as 16 hex digits.
    std::string config_digest(const SweepSpec &spec);

    const std::vector<std::string> &preset_names();
    /// `desk` applies apply_desk_scale and maps an IRS-size axis to M in {16, 64}.
    SweepSpec preset_spec(const std::string &name, bool desk = false);
    /// Shrinks the base instance to L=2, K=2, N=4x2, M=4x4, tau_p=2, tau_c=60. Sweep axes are kept.
    void apply_desk_scale(SweepSpec &spec);

    struct RunManifest
    {
        std::string digest;
        std::string version;
        std::uint64_t seed = 0;
        long trials = 0;
        int threads = 1;
        std::string started_utc;
        std::string finished_utc;
        std::vector<std::string> outputs;
        std::string config; // canonical dump
    };

    std::string utc_timestamp();
    void write_manifest(const RunManifest &m, const std::string &path);
    RunManifest read_manifest(const std::string &path);
}
