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
//
// irsmimo run <config.toml> | preset <name> | validate | print-config
//
// Exit status: 0 success, 1 failed validation, 2 configuration error,
// 3 numerical failure, 4 any other error.

#include "irsmimo/config.hpp"
#include "irsmimo/csv.hpp"
#include "irsmimo/validate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

using namespace irsmimo;

namespace
{
    struct Overrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<long> trials;
        std::optional<int> threads;
        std::optional<double> qos;
        bool desk = false;
        std::string out;
    };

    void add_overrides(CLI::App *cmd, Overrides &o)
    {
        cmd->add_option("--seed", o.seed, "master seed");
        cmd->add_option("--trials", o.trials, "Monte Carlo trials per configuration");
        cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores (never changes results)");
        cmd->add_option("--out", o.out, "CSV output path");
        cmd->add_option("--qos", o.qos, "print the last instant meeting this per-UE SE [bps/Hz]");
        cmd->add_flag("--desk", o.desk, "shrink to the desk-scale instance");
    }

    void apply_overrides(SweepSpec &spec, const Overrides &o)
    {
        if (o.desk)
            apply_desk_scale(spec);
        if (o.seed)
            spec.seed = *o.seed;
        if (o.trials)
            spec.trials = *o.trials;
        if (o.threads)
            spec.threads = *o.threads;
        spec.validate();
    }

    std::string label(const std::vector<std::pair<std::string, std::string>> &axes)
    {
        std::string s;
        for (const auto &[k, v] : axes)
            s += (s.empty() ? "" : " ") + k + "=" + v;
        return s.empty() ? "base" : s;
    }

    int run(const SweepSpec &spec, const Overrides &o, const std::string &default_out)
    {
        const std::string out = o.out.empty() ? default_out : o.out;
        RunManifest m;
        m.digest = config_digest(spec);
        m.version = IRSMIMO_VERSION;
        m.seed = spec.seed;
        m.trials = spec.trials;
        m.threads = spec.threads;
        m.config = canonical_config(spec);
        m.started_utc = utc_timestamp();

        std::vector<SweepSummary> summary;
        const auto rows = run_sweep(spec, &summary);
        emit_csv(rows, out);
        m.finished_utc = utc_timestamp();
        m.outputs = {out};
        write_manifest(m, out + ".manifest.json");

        for (const auto &s : summary)
        {
            if (s.sum_se)
                std::printf("%-40s %-9s sum SE %.4f bps/Hz/cell\n", label(s.axis_values).c_str(),
                            to_string(s.receiver).c_str(), *s.sum_se);
            else
                std::printf("%-40s %-9s sum SE n/a (grid does not span the frame)\n", label(s.axis_values).c_str(),
                            to_string(s.receiver).c_str());
        }
        if (o.qos)
        {
            std::map<std::pair<std::string, int>, std::vector<ResultRow>> groups;
            for (const auto &r : rows)
                groups[{label(r.axis_values), int(r.receiver)}].push_back(r);
            for (const auto &[key, g] : groups)
            {
                const auto n = qos_crossing(g, *o.qos);
                std::printf("%-40s %-9s QoS %.3g reached until n = %s\n", key.first.c_str(),
                            to_string(g.front().receiver).c_str(), *o.qos,
                            n ? std::to_string(*n).c_str() : "none");
            }
        }
        std::printf("wrote %s (%zu rows), digest %s\n", out.c_str(), rows.size(), m.digest.c_str());
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Uplink Monte Carlo simulator for IRS-aided multi-cell massive MIMO"};
    app.set_version_flag("--version", std::string(IRSMIMO_VERSION));
    app.require_subcommand(1);

    Overrides run_o, preset_o, val_o;
    std::string config_path, preset_name, print_path, print_preset;
    bool print_desk = false;

    auto *run_cmd = app.add_subcommand("run", "run the sweep described by a TOML config");
    run_cmd->add_option("config", config_path, "TOML config file")->required();
    add_overrides(run_cmd, run_o);

    auto *preset_cmd = app.add_subcommand("preset", "run a built-in experiment");
    preset_cmd->add_option("name", preset_name, "validate-bound | se-vs-time | receiver-compare")->required();
    add_overrides(preset_cmd, preset_o);

    auto *val_cmd = app.add_subcommand("validate", "run the invariant suite");
    val_cmd->add_option("--seed", val_o.seed, "master seed");
    val_cmd->add_option("--trials", val_o.trials, "trials for the Monte Carlo checks");
    val_cmd->add_option("--threads", val_o.threads, "worker threads");

    auto *print_cmd = app.add_subcommand("print-config", "print the effective configuration");
    print_cmd->add_option("config", print_path, "TOML config file (defaults when omitted)");
    print_cmd->add_option("--preset", print_preset, "print a preset instead");
    print_cmd->add_flag("--desk", print_desk, "desk-scale instance");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (*run_cmd)
        {
            SweepSpec spec = parse_config(config_path);
            apply_overrides(spec, run_o);
            const auto stem = std::filesystem::path(config_path).stem().string();
            return run(spec, run_o, stem + ".csv");
        }
        if (*preset_cmd)
        {
            SweepSpec spec = preset_spec(preset_name, preset_o.desk);
            apply_overrides(spec, preset_o);
            return run(spec, preset_o, preset_name + ".csv");
        }
        if (*val_cmd)
        {
            const auto checks = run_validation(val_o.seed.value_or(1), val_o.trials.value_or(1000),
                                               val_o.threads.value_or(default_spec().threads));
            bool ok = true;
            for (const auto &c : checks)
            {
                std::printf("%s  %-42s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
                ok = ok && c.passed;
            }
            return ok ? 0 : 1;
        }
        if (*print_cmd)
        {
            SweepSpec spec = !print_preset.empty() ? preset_spec(print_preset, print_desk)
                             : print_path.empty()   ? default_spec()
                                                    : parse_config(print_path);
            if (print_desk)
                apply_desk_scale(spec);
            std::cout << describe_config(spec) << "\n# digest " << config_digest(spec) << '\n';
            return 0;
        }
    }
    catch (const ConfigError &e)
    {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    }
    catch (const NumericalError &e)
    {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
