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
#include "irsmimo/csv.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace irsmimo;
using Catch::Approx;
namespace fs = std::filesystem;

namespace
{
    const char *desk_toml = R"(
cells = 2
users_per_cell = 2
bs_horizontal = 4
bs_vertical = 2
irs_horizontal = 4
irs_vertical = 4
pilot_length = 2
frame_length = 60
irs_bs_rank = 4

[sweep]
receivers = ["mrc", "daa-mmse"]
trials = 40
n_values = [3, 30, 60]

[[sweep.axis]]
name = "velocity_kmh"
values = [72, 144]
)";

    fs::path scratch(const std::string &name)
    {
        const fs::path dir = fs::temp_directory_path() / "irsmimo_test_cli";
        fs::create_directories(dir);
        return dir / name;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    int cli(const std::string &args)
    {
        const std::string cmd = std::string("\"") + IRSMIMO_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    ResultRow sample_row()
    {
        ResultRow r;
        r.axis_values = {{"bits", "ideal"}, {"phase_mode", "a,\"b\""}};
        r.receiver = ReceiverKind::du_mmse;
        r.n = 17;
        for (int i = 0; i < SeTerms::count; ++i)
            r.terms[i] = std::ldexp(1.2345678901234, -40 + 3 * i);
        r.sinr = 12.3456789;
        r.se = std::log2(1.0 + r.sinr);
        r.se_stderr = 1.5e-3;
        r.seed = 18446744073709551557ull;
        r.mui_stderr = 2.5e-17;
        return r;
    }
}

TEST_CASE("config defaults and overrides", "[cli]")
{
    const SweepSpec d = parse_config_string("");
    CHECK(config_digest(d) == config_digest(default_spec()));
    CHECK(d.base.num_cells == 4);
    CHECK(d.base.num_elements() == 100);

    const SweepSpec s = parse_config_string("velocity_kmh = 144\nbits = ideal\n[irs]\nphase_mode = zero\n");
    CHECK(s.base.ue_speed_mps == Approx(40.0));
    CHECK_FALSE(s.hardware.bits_ue.has_value());
    CHECK_FALSE(s.hardware.bits_bs.has_value());
    CHECK(s.base.irs.phase_mode == PhaseMode::zero);

    const SweepSpec t = parse_config_string("[system]\ncells = 2\n[hardware]\nbits_bs = 3\n[propagation]\n"
                                            "pathloss_exponent = 3.5\n");
    CHECK(t.base.num_cells == 2);
    CHECK(t.hardware.bits_bs == 3);
    CHECK(t.base.propagation.pathloss_exponent == 3.5);

    const SweepSpec u = parse_config_string(desk_toml);
    CHECK(u.trials == 40);
    REQUIRE(u.axes.size() == 1);
    CHECK(u.axes[0].values == std::vector<std::string>{"72", "144"});
    CHECK(u.receivers == std::vector<ReceiverKind>{ReceiverKind::mrc, ReceiverKind::daa_mmse});
}

TEST_CASE("config errors", "[cli]")
{
    CHECK_THROWS_AS(parse_config_string("antennas = 64"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("[system]\nspeed = 3"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("[nonsense]\nx = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("cells = \"two\""), ConfigError);
    CHECK_THROWS_AS(parse_config_string("cells = 2.5"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("pathloss_exponent = 3"), ConfigError); // table only
    CHECK_THROWS_AS(parse_config_string("[sweep]\ntrials = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("[sweep]\nreceivers = [\"zf\"]"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("[[sweep.axis]]\nname = \"warp\"\nvalues = [1]"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("cells = ["), ConfigError);
    CHECK_THROWS_AS(parse_config("/nonexistent/dir/cfg.toml"), ConfigError);
}

TEST_CASE("config dumps and digests", "[cli]")
{
    const SweepSpec a = parse_config_string(desk_toml);
    // the human-readable dump parses back to the same configuration
    const SweepSpec back = parse_config_string(describe_config(a));
    CHECK(canonical_config(back) == canonical_config(a));
    CHECK(describe_config(a).find("# assumed") != std::string::npos);

    SweepSpec b = a;
    b.threads = 4;
    CHECK(config_digest(b) == config_digest(a));
    b.base.area_km = 0.6;
    CHECK(config_digest(b) != config_digest(a));
    CHECK(config_digest(a).size() == 16);

    for (const auto &name : preset_names())
    {
        const SweepSpec p = preset_spec(name, true);
        CHECK_NOTHROW(p.validate());
        CHECK(canonical_config(parse_config_string(describe_config(p))) == canonical_config(p));
    }
    CHECK_THROWS_AS(preset_spec("nope"), ConfigError);
}

TEST_CASE("CSV layout and round trip", "[cli]")
{
    CHECK(csv_header({}) == std::vector<std::string>{"receiver", "n", "DS", "BU", "CA", "MUI", "PC", "DAC", "TRF",
                                                     "RRF", "ADC", "NS", "sinr", "se", "se_stderr", "seed",
                                                     "mui_stderr", "mui_closed_form"});
    const ResultRow r = sample_row();
    const std::string text = format_csv({r});
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("bits,phase_mode,receiver,n,DS,", 0) == 0);

    const auto back = parse_csv(text);
    REQUIRE(back.size() == 1);
    CHECK(back[0].axis_values == r.axis_values);
    CHECK(back[0].receiver == r.receiver);
    CHECK(back[0].n == r.n);
    CHECK(back[0].seed == r.seed);
    for (int i = 0; i < SeTerms::count; ++i)
        CHECK(back[0].terms[i] == Approx(r.terms[i]).epsilon(1e-9));
    CHECK(back[0].se == Approx(r.se).epsilon(1e-9));
    CHECK(back[0].mui_stderr == Approx(r.mui_stderr).epsilon(1e-9));
    CHECK(std::isnan(back[0].mui_closed_form));
    CHECK(format_csv(back) == text);

    CHECK_THROWS_AS(parse_csv("receiver,n\nmrc,3\n"), ConfigError);
    CHECK_THROWS_AS(emit_csv({}, scratch("empty.csv").string()), ConfigError);
    CHECK_THROWS_AS(emit_csv({r}, "/nonexistent/dir/out.csv"), ConfigError);
}

TEST_CASE("manifest round trip", "[cli]")
{
    RunManifest m;
    m.digest = "0123456789abcdef";
    m.version = "0.1.0";
    m.seed = 42;
    m.trials = 100;
    m.threads = 2;
    m.started_utc = utc_timestamp();
    m.finished_utc = m.started_utc;
    m.outputs = {"a.csv"};
    m.config = "system.cells = 4\n";
    const fs::path p = scratch("m.json");
    write_manifest(m, p.string());
    const RunManifest b = read_manifest(p.string());
    CHECK(b.digest == m.digest);
    CHECK(b.seed == 42);
    CHECK(b.trials == 100);
    CHECK(b.outputs == m.outputs);
    CHECK(b.config == m.config);
    CHECK(m.started_utc.back() == 'Z');
}

TEST_CASE("command line tool", "[cli]")
{
    const fs::path cfg = scratch("desk.toml");
    std::ofstream(cfg) << desk_toml;
    const fs::path out1 = scratch("one.csv"), out2 = scratch("all.csv");
    fs::remove(out1);
    fs::remove(out2);

    REQUIRE(cli("run \"" + cfg.string() + "\" --threads 1 --qos 1 --out \"" + out1.string() + "\"") == 0);
    REQUIRE(cli("run \"" + cfg.string() + "\" --threads 0 --out \"" + out2.string() + "\"") == 0);
    const std::string a = slurp(out1), b = slurp(out2);
    CHECK(a == b);
    const auto rows = parse_csv(a);
    CHECK(rows.size() == 2 * 2 * 3);

    const RunManifest m = read_manifest(out1.string() + ".manifest.json");
    CHECK(m.digest == config_digest(parse_config(cfg.string())));
    CHECK(m.threads == 1);
    CHECK(m.trials == 40);
    CHECK(m.outputs == std::vector<std::string>{out1.string()});

    CHECK(cli("run \"" + cfg.string() + "\" --trials 40 --seed 7 --out \"" + out1.string() + "\"") == 0);
    CHECK(slurp(out1) != a);

    const fs::path bad = scratch("bad.toml");
    std::ofstream(bad) << "antennas = 64\n";
    CHECK(cli("run \"" + bad.string() + "\"") == 2);
    CHECK(cli("run /nonexistent/dir/cfg.toml") == 2);
    CHECK(cli("preset no-such-preset") == 2);
    CHECK(cli("run") == 2);
    CHECK(cli("frobnicate") == 2);
    CHECK(cli("print-config --preset se-vs-time --desk") == 0);
    CHECK(cli("--version") == 0);
    CHECK(cli("validate --trials 200") == 0);
}
