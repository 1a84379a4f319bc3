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

#include "irsmimo/config.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

namespace irsmimo
{
    namespace
    {
        enum class Kind
        {
            integer,
            number,
            bits, // integer or "ideal"
            text,
            boolean,
        };

        struct Key
        {
            std::string section;
            std::string name;
            Kind kind;
            bool top_level;   // may also appear outside its table
            bool dumped;      // part of the canonical dump (aliases are not)
            bool assumed;     // default not fixed by the model
            std::function<void(SweepSpec &, const std::string &)> set;
            std::function<std::string(const SweepSpec &)> get;
        };

        std::string fmt_double(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string fmt_bits(const Resolution &b) { return b ? std::to_string(*b) : std::string("ideal"); }

        std::string fmt_phase(PhaseMode m)
        {
            switch (m)
            {
            case PhaseMode::random:
                return "random";
            case PhaseMode::zero:
                return "zero";
            case PhaseMode::los_align:
                return "los_align";
            }
            return "random";
        }

        double to_double(const std::string &key, const std::string &v)
        {
            try
            {
                std::size_t pos = 0;
                double d = std::stod(v, &pos);
                if (pos == v.size())
                    return d;
            }
            catch (const std::exception &)
            {
            }
            throw ConfigError("key '" + key + "' expects a number");
        }

        // Keys forwarded to apply_parameter.
        Key param(const char *section, const char *name, Kind kind, std::function<std::string(const SweepSpec &)> get,
                  bool dumped = true, bool assumed = false)
        {
            return Key{section, name, kind, true, dumped, assumed,
                       [n = std::string(name)](SweepSpec &s, const std::string &v)
                       { apply_parameter(s.base, s.hardware, n, v); },
                       std::move(get)};
        }

        Key prop(const char *name, double PropagationParams::*field)
        {
            return Key{"propagation", name, Kind::number, false, true, false,
                       [field, n = std::string(name)](SweepSpec &s, const std::string &v)
                       { s.base.propagation.*field = to_double(n, v); },
                       [field](const SweepSpec &s)
                       { return fmt_double(s.base.propagation.*field); }};
        }

        const std::vector<Key> &registry()
        {
            static const std::vector<Key> keys = []
            {
                std::vector<Key> k;
                auto i = [](int v)
                { return std::to_string(v); };
                // system
                k.push_back(param("system", "cells", Kind::integer, [=](const SweepSpec &s)
                                  { return i(s.base.num_cells); }));
                k.push_back(param("system", "users_per_cell", Kind::integer, [=](const SweepSpec &s)
                                  { return i(s.base.users_per_cell); }));
                k.push_back(param("system", "bs_horizontal", Kind::integer, [=](const SweepSpec &s)
                                  { return i(s.base.bs_array.horizontal); }));
                k.push_back(param("system", "bs_vertical", Kind::integer, [=](const SweepSpec &s)
                                  { return i(s.base.bs_array.vertical); }));
                k.push_back(param("system", "irs_horizontal", Kind::integer, [=](const SweepSpec &s)
                                  { return i(s.base.irs_array.horizontal); }));
                k.push_back(param("system", "irs_vertical", Kind::integer, [=](const SweepSpec &s)
                                  { return i(s.base.irs_array.vertical); }));
                k.push_back(param(
                    "system", "irs_elements", Kind::integer, [=](const SweepSpec &s)
                    { return i(s.base.num_elements()); },
                    false));
                k.push_back(param(
                    "system", "frame_length", Kind::integer, [=](const SweepSpec &s)
                    { return i(s.base.frame_length); },
                    true, true));
                k.push_back(param(
                    "system", "pilot_length", Kind::integer, [=](const SweepSpec &s)
                    { return i(s.base.pilot_length); },
                    true, true));
                k.push_back(param("system", "data_power_dbm", Kind::number, [](const SweepSpec &s)
                                  { return fmt_double(watts_to_dbm(s.base.data_power_w)); }));
                k.push_back(param("system", "pilot_power_dbm", Kind::number, [](const SweepSpec &s)
                                  { return fmt_double(watts_to_dbm(s.base.pilot_power_w)); }));
                k.push_back(param(
                    "system", "noise_power_dbm", Kind::number, [](const SweepSpec &s)
                    { return fmt_double(watts_to_dbm(s.base.noise_power_w)); },
                    true, true));
                k.push_back(param(
                    "system", "carrier_hz", Kind::number, [](const SweepSpec &s)
                    { return fmt_double(s.base.carrier_hz); },
                    true, true));
                k.push_back(param(
                    "system", "sample_period_s", Kind::number, [](const SweepSpec &s)
                    { return fmt_double(s.base.sample_period_s); },
                    true, true));
                k.push_back(param("system", "velocity_kmh", Kind::number, [](const SweepSpec &s)
                                  { return fmt_double(s.base.ue_speed_mps * 3.6); }));
                k.push_back(param("system", "area_km", Kind::number, [](const SweepSpec &s)
                                  { return fmt_double(s.base.area_km); }));
                k.push_back(param("system", "direct_loss_db", Kind::number, [](const SweepSpec &s)
                                  { return fmt_double(s.base.direct_extra_loss_db); }));
                // hardware
                k.push_back(param("hardware", "kappa_ue", Kind::number, [](const SweepSpec &s)
                                  { return fmt_double(s.hardware.kappa_ue); }));
                k.push_back(param("hardware", "kappa_bs", Kind::number, [](const SweepSpec &s)
                                  { return fmt_double(s.hardware.kappa_bs); }));
                k.push_back(param(
                    "hardware", "bits", Kind::bits, [](const SweepSpec &s)
                    { return fmt_bits(s.hardware.bits_bs); },
                    false));
                k.push_back(param("hardware", "bits_ue", Kind::bits, [](const SweepSpec &s)
                                  { return fmt_bits(s.hardware.bits_ue); }));
                k.push_back(param("hardware", "bits_bs", Kind::bits, [](const SweepSpec &s)
                                  { return fmt_bits(s.hardware.bits_bs); }));
                k.push_back(param(
                    "hardware", "hardware", Kind::text, [](const SweepSpec &s)
                    { return std::string(s.hardware.is_ideal() ? "ideal" : "impaired"); },
                    false));
                // irs
                k.push_back(Key{"irs", "distance_km", Kind::number, true, true, false,
                                [](SweepSpec &s, const std::string &v)
                                { s.base.irs.distance_km = to_double("distance_km", v); },
                                [](const SweepSpec &s)
                                { return fmt_double(s.base.irs.distance_km); }});
                k.push_back(Key{"irs", "azimuth_deg", Kind::number, true, true, false,
                                [](SweepSpec &s, const std::string &v)
                                { s.base.irs.azimuth_deg = to_double("azimuth_deg", v); },
                                [](const SweepSpec &s)
                                { return fmt_double(s.base.irs.azimuth_deg); }});
                k.push_back(param("irs", "irs_bs_rank", Kind::integer, [=](const SweepSpec &s)
                                  { return i(s.base.irs.bs_link_rank); }));
                k.push_back(param("irs", "phase_mode", Kind::text, [](const SweepSpec &s)
                                  { return fmt_phase(s.base.irs.phase_mode); }));
                // propagation
                using P = PropagationParams;
                k.push_back(prop("pathloss_intercept_db", &P::pathloss_intercept_db));
                k.push_back(prop("pathloss_exponent", &P::pathloss_exponent));
                k.push_back(Key{"propagation", "shadowing", Kind::boolean, false, true, false,
                                [](SweepSpec &s, const std::string &v)
                                { s.base.propagation.shadowing = (v == "true"); },
                                [](const SweepSpec &s)
                                { return std::string(s.base.propagation.shadowing ? "true" : "false"); }});
                k.push_back(prop("shadowing_sigma_db", &P::shadowing_sigma_db));
                k.push_back(prop("rician_intercept_db", &P::rician_intercept_db));
                k.push_back(prop("rician_slope_db_per_m", &P::rician_slope_db_per_m));
                k.push_back(prop("rician_max_distance_m", &P::rician_max_distance_m));
                k.push_back(prop("bs_spacing", &P::bs_spacing));
                k.push_back(prop("irs_spacing", &P::irs_spacing));
                k.push_back(prop("asd_azimuth_deg", &P::asd_azimuth_deg));
                k.push_back(prop("asd_elevation_deg", &P::asd_elevation_deg));
                k.push_back(prop("bs_height_m", &P::bs_height_m));
                k.push_back(prop("irs_height_m", &P::irs_height_m));
                k.push_back(prop("ue_height_m", &P::ue_height_m));
                k.push_back(prop("ue_min_radius_km", &P::ue_min_radius_km));
                k.push_back(prop("ue_max_radius_km", &P::ue_max_radius_km));
                k.push_back(prop("sector_deg", &P::sector_deg));
                return k;
            }();
            return keys;
        }

        const Key *find_key(const std::string &section, const std::string &name, bool top)
        {
            for (const Key &k : registry())
                if (k.name == name && (top ? k.top_level : k.section == section))
                    return &k;
            return nullptr;
        }

        std::string node_text(const std::string &key, const toml::node &node, Kind kind)
        {
            auto mismatch = [&](const char *want)
            { return ConfigError("key '" + key + "' expects " + want); };
            switch (kind)
            {
            case Kind::integer:
                if (auto v = node.value_exact<int64_t>())
                    return std::to_string(*v);
                throw mismatch("an integer");
            case Kind::number:
                if (auto v = node.value_exact<int64_t>())
                    return std::to_string(*v);
                if (auto v = node.value_exact<double>())
                    return fmt_double(*v);
                throw mismatch("a number");
            case Kind::bits:
                if (auto v = node.value_exact<int64_t>())
                    return std::to_string(*v);
                if (auto v = node.value_exact<std::string>(); v && *v == "ideal")
                    return *v;
                throw mismatch("a bit count or 'ideal'");
            case Kind::text:
                if (auto v = node.value_exact<std::string>())
                    return *v;
                throw mismatch("a string");
            case Kind::boolean:
                if (auto v = node.value_exact<bool>())
                    return *v ? "true" : "false";
                throw mismatch("a boolean");
            }
            throw mismatch("a value");
        }

        std::string scalar_text(const std::string &key, const toml::node &node)
        {
            if (auto v = node.value_exact<int64_t>())
                return std::to_string(*v);
            if (auto v = node.value_exact<double>())
                return fmt_double(*v);
            if (auto v = node.value_exact<std::string>())
                return *v;
            if (auto v = node.value_exact<bool>())
                return *v ? "true" : "false";
            throw ConfigError("key '" + key + "' expects scalar values");
        }

        void apply_key(SweepSpec &spec, const Key &k, const toml::node &node, const std::string &path)
        {
            k.set(spec, node_text(path, node, k.kind));
        }

        long get_integer(const std::string &key, const toml::node &node)
        {
            if (auto v = node.value_exact<int64_t>())
                return long(*v);
            throw ConfigError("key '" + key + "' expects an integer");
        }

        void parse_sweep(SweepSpec &spec, const toml::table &t)
        {
            for (auto &&[k, node] : t)
            {
                const std::string key(k.str());
                const std::string path = "sweep." + key;
                if (key == "receivers")
                {
                    const auto *arr = node.as_array();
                    if (!arr)
                        throw ConfigError("key 'sweep.receivers' expects an array of strings");
                    spec.receivers.clear();
                    for (auto &&e : *arr)
                    {
                        auto s = e.value_exact<std::string>();
                        if (!s)
                            throw ConfigError("key 'sweep.receivers' expects an array of strings");
                        spec.receivers.push_back(parse_receiver(*s));
                    }
                }
                else if (key == "trials")
                    spec.trials = get_integer(path, node);
                else if (key == "seed")
                {
                    long s = get_integer(path, node);
                    if (s < 0)
                        throw ConfigError("sweep.seed must be non-negative");
                    spec.seed = std::uint64_t(s);
                }
                else if (key == "threads")
                    spec.threads = int(get_integer(path, node));
                else if (key == "n_stride")
                    spec.n_stride = int(get_integer(path, node));
                else if (key == "n_values")
                {
                    const auto *arr = node.as_array();
                    if (!arr)
                        throw ConfigError("key 'sweep.n_values' expects an array of integers");
                    spec.n_values.clear();
                    for (auto &&e : *arr)
                        spec.n_values.push_back(int(get_integer(path, e)));
                }
                else if (key == "axis")
                {
                    const auto *arr = node.as_array();
                    if (!arr)
                        throw ConfigError("sweep.axis must be an array of tables ([[sweep.axis]])");
                    for (auto &&e : *arr)
                    {
                        const auto *at = e.as_table();
                        if (!at)
                            throw ConfigError("sweep.axis must be an array of tables ([[sweep.axis]])");
                        SweepAxis ax;
                        for (auto &&[ak, an] : *at)
                        {
                            const std::string akey(ak.str());
                            if (akey == "name")
                            {
                                auto s = an.value_exact<std::string>();
                                if (!s)
                                    throw ConfigError("sweep.axis.name expects a string");
                                ax.name = *s;
                            }
                            else if (akey == "values")
                            {
                                const auto *va = an.as_array();
                                if (!va)
                                    throw ConfigError("sweep.axis.values expects an array");
                                for (auto &&v : *va)
                                    ax.values.push_back(scalar_text("sweep.axis.values", v));
                            }
                            else
                                throw ConfigError("unknown key: sweep.axis." + akey);
                        }
                        if (ax.name.empty())
                            throw ConfigError("sweep.axis entry without a name");
                        spec.axes.push_back(std::move(ax));
                    }
                }
                else
                    throw ConfigError("unknown key: " + path);
            }
        }

        // Quotes bare-word values (`bits = ideal`) so the text parses as TOML.
        std::string quote_bare_words(const std::string &text)
        {
            static const std::regex bare(R"(^(\s*[A-Za-z0-9_.\-]+\s*=\s*)([A-Za-z][A-Za-z0-9_\-]*)(\s*(#.*)?)$)");
            std::istringstream in(text);
            std::ostringstream out;
            std::string line;
            while (std::getline(in, line))
            {
                std::smatch m;
                if (std::regex_match(line, m, bare))
                {
                    const std::string w = m[2].str();
                    if (w != "true" && w != "false" && w != "inf" && w != "nan")
                        line = m[1].str() + "\"" + w + "\"" + m[3].str();
                }
                out << line << '\n';
            }
            return out.str();
        }

        void set_threads_from_env(SweepSpec &spec)
        {
            if (const char *env = std::getenv("IRSMIMO_THREADS"))
            {
                try
                {
                    spec.threads = std::stoi(env);
                }
                catch (const std::exception &)
                {
                    throw ConfigError(std::string("IRSMIMO_THREADS is not an integer: ") + env);
                }
            }
        }
    }

    SweepSpec default_spec()
    {
        SweepSpec s;
        s.base = SystemConfig{};
        s.hardware = HardwareProfile{};
        set_threads_from_env(s);
        return s;
    }

    SweepSpec parse_config_string(const std::string &text, const std::string &source)
    {
        toml::table root;
        try
        {
            root = toml::parse(quote_bare_words(text), source);
        }
        catch (const toml::parse_error &e)
        {
            std::ostringstream os;
            os << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
            throw ConfigError(os.str());
        }

        SweepSpec spec = default_spec();
        // Tables first so that top-level keys and the sweep section see a consistent base.
        for (auto &&[k, node] : root)
        {
            const std::string section(k.str());
            if (!node.is_table())
                continue;
            const auto &t = *node.as_table();
            if (section == "sweep")
                parse_sweep(spec, t);
            else if (section == "system" || section == "hardware" || section == "propagation" || section == "irs")
            {
                for (auto &&[kk, nn] : t)
                {
                    const std::string name(kk.str());
                    const Key *key = find_key(section, name, false);
                    if (!key)
                        throw ConfigError("unknown key: " + section + "." + name);
                    apply_key(spec, *key, nn, section + "." + name);
                }
            }
            else
                throw ConfigError("unknown table: [" + section + "]");
        }
        for (auto &&[k, node] : root)
        {
            if (node.is_table())
                continue;
            const std::string name(k.str());
            const Key *key = find_key("", name, true);
            if (!key)
                throw ConfigError("unknown key: " + name);
            apply_key(spec, *key, node, name);
        }
        spec.validate();
        return spec;
    }

    SweepSpec parse_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config_string(ss.str(), path);
    }

    std::string canonical_config(const SweepSpec &spec)
    {
        std::ostringstream os;
        for (const Key &k : registry())
            if (k.dumped)
                os << k.section << '.' << k.name << " = " << k.get(spec) << '\n';
        os << "system.ue_speed_override_mps =";
        for (double v : spec.base.ue_speed_override_mps)
            os << ' ' << fmt_double(v);
        os << "\nhardware.alpha_bs_per_antenna =";
        for (Eigen::Index i = 0; i < spec.hardware.alpha_bs_per_antenna.size(); ++i)
            os << ' ' << fmt_double(spec.hardware.alpha_bs_per_antenna[i]);
        os << "\nsweep.receivers =";
        for (auto r : spec.receivers)
            os << ' ' << to_string(r);
        os << "\nsweep.trials = " << spec.trials << "\nsweep.seed = " << spec.seed
           << "\nsweep.n_stride = " << spec.n_stride << "\nsweep.n_values =";
        for (int n : spec.n_values)
            os << ' ' << n;
        os << '\n';
        for (const auto &ax : spec.axes)
        {
            os << "sweep.axis " << ax.name << " =";
            for (const auto &v : ax.values)
                os << ' ' << v;
            os << '\n';
        }
        // threads is excluded: it never changes results.
        return os.str();
    }

    std::string describe_config(const SweepSpec &spec)
    {
        std::ostringstream os;
        std::string current;
        for (const Key &k : registry())
        {
            if (!k.dumped)
                continue;
            if (k.section != current)
            {
                os << (current.empty() ? "" : "\n") << '[' << k.section << "]\n";
                current = k.section;
            }
            const std::string v = k.get(spec);
            const bool quoted = k.kind == Kind::text || (k.kind == Kind::bits && v == "ideal");
            os << k.name << " = " << (quoted ? "\"" + v + "\"" : v);
            if (k.assumed)
                os << "  # assumed";
            os << '\n';
        }
        os << "\n[sweep]\nreceivers = [";
        for (std::size_t i = 0; i < spec.receivers.size(); ++i)
            os << (i ? ", " : "") << '"' << to_string(spec.receivers[i]) << '"';
        os << "]\ntrials = " << spec.trials << "\nseed = " << spec.seed << "\nthreads = " << spec.threads
           << "\nn_stride = " << spec.n_stride << '\n';
        if (!spec.n_values.empty())
        {
            os << "n_values = [";
            for (std::size_t i = 0; i < spec.n_values.size(); ++i)
                os << (i ? ", " : "") << spec.n_values[i];
            os << "]\n";
        }
        for (const auto &ax : spec.axes)
        {
            os << "\n[[sweep.axis]]\nname = \"" << ax.name << "\"\nvalues = [";
            for (std::size_t i = 0; i < ax.values.size(); ++i)
                os << (i ? ", " : "") << '"' << ax.values[i] << '"';
            os << "]\n";
        }
        return os.str();
    }

    std::string config_digest(const SweepSpec &spec)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : canonical_config(spec))
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    const std::vector<std::string> &preset_names()
    {
        static const std::vector<std::string> names = {"validate-bound", "se-vs-time", "receiver-compare"};
        return names;
    }

    void apply_desk_scale(SweepSpec &spec)
    {
        SystemConfig &c = spec.base;
        c.num_cells = 2;
        c.users_per_cell = 2;
        c.bs_array = {4, 2};
        c.irs_array = {4, 4};
        c.pilot_length = 2;
        c.frame_length = 60;
        c.irs.bs_link_rank = 4;
        spec.trials = 2000;
        spec.n_stride = 5;
    }

    SweepSpec preset_spec(const std::string &name, bool desk)
    {
        SweepSpec s = default_spec();
        if (name == "validate-bound")
        {
            s.receivers = {ReceiverKind::mrc};
            s.axes = {{"hardware", {"ideal", "impaired"}}, {"velocity_kmh", {"0", "72"}}};
        }
        else if (name == "se-vs-time")
        {
            s.receivers = {ReceiverKind::mrc, ReceiverKind::daa_mmse};
            s.axes = {{"irs_elements", {"100", "225"}}};
        }
        else if (name == "receiver-compare")
        {
            s.receivers = {ReceiverKind::du_mmse, ReceiverKind::daa_mmse};
            s.axes = {{"bits", {"2", "4"}}, {"velocity_kmh", {"72", "144"}}};
        }
        else
            throw ConfigError("unknown preset: " + name);
        if (desk)
        {
            apply_desk_scale(s);
            for (auto &ax : s.axes)
                if (ax.name == "irs_elements")
                    ax.values = {"16", "64"};
        }
        s.validate();
        return s;
    }

    std::string utc_timestamp()
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    void write_manifest(const RunManifest &m, const std::string &path)
    {
        nlohmann::json j;
        j["digest"] = m.digest;
        j["version"] = m.version;
        j["seed"] = m.seed;
        j["trials"] = m.trials;
        j["threads"] = m.threads;
        j["started_utc"] = m.started_utc;
        j["finished_utc"] = m.finished_utc;
        j["outputs"] = m.outputs;
        j["config"] = m.config;
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write manifest: " + path);
        out << j.dump(2) << '\n';
    }

    RunManifest read_manifest(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open manifest: " + path);
        nlohmann::json j;
        try
        {
            in >> j;
            RunManifest m;
            m.digest = j.at("digest").get<std::string>();
            m.version = j.at("version").get<std::string>();
            m.seed = j.at("seed").get<std::uint64_t>();
            m.trials = j.at("trials").get<long>();
            m.threads = j.at("threads").get<int>();
            m.started_utc = j.at("started_utc").get<std::string>();
            m.finished_utc = j.at("finished_utc").get<std::string>();
            m.outputs = j.at("outputs").get<std::vector<std::string>>();
            m.config = j.at("config").get<std::string>();
            return m;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError("malformed manifest " + path + ": " + e.what());
        }
    }
}
