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

#include "irsmimo/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace irsmimo
{
    namespace
    {
        constexpr int fixed_columns = 2 + SeTerms::count + 6;

        std::string num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        // Values never contain separators except axis values, which are quoted when needed.
        std::string field(const std::string &s)
        {
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string q = "\"";
            for (char c : s)
                q += (c == '"') ? std::string("\"\"") : std::string(1, c);
            return q + "\"";
        }

        std::vector<std::string> split_line(const std::string &line)
        {
            std::vector<std::string> out;
            std::string cur;
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i)
            {
                const char c = line[i];
                if (quoted)
                {
                    if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
                    {
                        cur += '"';
                        ++i;
                    }
                    else if (c == '"')
                        quoted = false;
                    else
                        cur += c;
                }
                else if (c == '"')
                    quoted = true;
                else if (c == ',')
                {
                    out.push_back(cur);
                    cur.clear();
                }
                else
                    cur += c;
            }
            out.push_back(cur);
            return out;
        }

        double to_num(const std::string &s)
        {
            char *end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0')
                throw ConfigError("malformed CSV number: '" + s + "'");
            return v;
        }
    }

    std::vector<std::string> csv_header(const std::vector<std::string> &axis_names)
    {
        std::vector<std::string> h = axis_names;
        h.push_back("receiver");
        h.push_back("n");
        for (const char *t : SeTerms::names)
            h.push_back(t);
        for (const char *c : {"sinr", "se", "se_stderr", "seed", "mui_stderr", "mui_closed_form"})
            h.push_back(c);
        return h;
    }

    void write_csv(std::ostream &out, const std::vector<ResultRow> &rows)
    {
        std::vector<std::string> axes;
        if (!rows.empty())
            for (const auto &[name, value] : rows.front().axis_values)
                axes.push_back(name);
        const auto header = csv_header(axes);
        for (std::size_t i = 0; i < header.size(); ++i)
            out << (i ? "," : "") << header[i];
        out << '\n';
        for (const ResultRow &r : rows)
        {
            if (r.axis_values.size() != axes.size())
                throw ConfigError("CSV rows disagree on the swept parameters");
            for (std::size_t a = 0; a < axes.size(); ++a)
            {
                if (r.axis_values[a].first != axes[a])
                    throw ConfigError("CSV rows disagree on the swept parameters");
                out << field(r.axis_values[a].second) << ',';
            }
            out << to_string(r.receiver) << ',' << r.n;
            for (int t = 0; t < SeTerms::count; ++t)
                out << ',' << num(r.terms[t]);
            out << ',' << num(r.sinr) << ',' << num(r.se) << ',' << num(r.se_stderr) << ',' << r.seed << ','
                << num(r.mui_stderr) << ',' << num(r.mui_closed_form) << '\n';
        }
    }

    std::string format_csv(const std::vector<ResultRow> &rows)
    {
        std::ostringstream os;
        write_csv(os, rows);
        return os.str();
    }

    void emit_csv(const std::vector<ResultRow> &rows, const std::string &path)
    {
        if (rows.empty())
            throw ConfigError("no rows to write");
        const std::string text = format_csv(rows);
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write CSV: " + path);
        out << text;
        if (!out)
            throw ConfigError("write failed: " + path);
    }

    std::vector<ResultRow> parse_csv(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line))
            throw ConfigError("empty CSV");
        const auto header = split_line(line);
        if (header.size() < std::size_t(fixed_columns))
            throw ConfigError("CSV header too short");
        const std::size_t n_axes = header.size() - std::size_t(fixed_columns);
        std::vector<std::string> axes(header.begin(), header.begin() + long(n_axes));
        if (header != csv_header(axes))
            throw ConfigError("unexpected CSV header");

        std::vector<ResultRow> rows;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            const auto f = split_line(line);
            if (f.size() != header.size())
                throw ConfigError("CSV row has " + std::to_string(f.size()) + " fields, expected " +
                                  std::to_string(header.size()));
            ResultRow r;
            std::size_t c = 0;
            for (; c < n_axes; ++c)
                r.axis_values.emplace_back(axes[c], f[c]);
            r.receiver = parse_receiver(f[c++]);
            r.n = int(to_num(f[c++]));
            for (int t = 0; t < SeTerms::count; ++t)
                r.terms[t] = to_num(f[c++]);
            r.sinr = to_num(f[c++]);
            r.se = to_num(f[c++]);
            r.se_stderr = to_num(f[c++]);
            r.seed = std::stoull(f[c++]);
            r.mui_stderr = to_num(f[c++]);
            r.mui_closed_form = to_num(f[c++]);
            rows.push_back(std::move(r));
        }
        return rows;
    }

    std::vector<ResultRow> read_csv(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open CSV: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_csv(ss.str());
    }
}
