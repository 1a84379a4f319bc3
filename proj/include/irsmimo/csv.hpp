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

#include <iosfwd>
#include <string>
#include <vector>

namespace irsmimo
{
    /// Column order: axis names..., receiver, n, DS, BU, CA, MUI, PC, DAC, TRF, RRF, ADC, NS,
    /// sinr, se, se_stderr, seed, mui_stderr, mui_closed_form.
    std::vector<std::string> csv_header(const std::vector<std::string> &axis_names);

    /// Reals with 10 significant digits, LF line endings. All rows must share the axis names.
    std::string format_csv(const std::vector<ResultRow> &rows);
    void write_csv(std::ostream &out, const std::vector<ResultRow> &rows);
    /// Throws ConfigError when the path is not writable or rows is empty.
    void emit_csv(const std::vector<ResultRow> &rows, const std::string &path);

    /// Inverse of format_csv (wall_time_s is not stored and reads back as 0).
    std::vector<ResultRow> parse_csv(const std::string &text);
    std::vector<ResultRow> read_csv(const std::string &path);
}
