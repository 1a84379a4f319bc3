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
#include "irsmimo/csv.hpp"
#include "irsmimo/validate.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace irsmimo;

namespace
{
    // Runs a sweep and returns its CSV text; the GIL is released while simulating.
    std::string run_spec(SweepSpec spec, std::optional<long> trials, std::optional<std::uint64_t> seed, int threads)
    {
        if (trials)
            spec.trials = *trials;
        if (seed)
            spec.seed = *seed;
        spec.threads = threads;
        std::vector<ResultRow> rows;
        {
            py::gil_scoped_release nogil;
            rows = run_sweep(spec);
        }
        return format_csv(rows);
    }

    py::dict row_dict(const ResultRow &r)
    {
        py::dict d;
        for (const auto &[k, v] : r.axis_values)
            d[py::str(k)] = v;
        d["receiver"] = to_string(r.receiver);
        d["n"] = r.n;
        for (int t = 0; t < SeTerms::count; ++t)
            d[SeTerms::names[std::size_t(t)]] = r.terms[t];
        d["sinr"] = r.sinr;
        d["se"] = r.se;
        d["se_stderr"] = r.se_stderr;
        d["seed"] = r.seed;
        d["mui_stderr"] = r.mui_stderr;
        d["mui_closed_form"] = r.mui_closed_form;
        return d;
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Uplink Monte Carlo simulator for IRS-aided multi-cell massive MIMO";
    m.attr("__version__") = IRSMIMO_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("distortion_factor", [](std::optional<int> bits) { return distortion_factor(bits); }, py::arg("bits"),
          "Normalized MSE of the optimal b-bit quantizer for a Gaussian input; None means ideal.");
    m.def("bessel_j0", &bessel_j0, py::arg("x"));
    m.def("preset_names", &preset_names);
    m.def(
        "describe_config",
        [](const std::string &text, const std::string &preset, bool desk)
        {
            SweepSpec s = preset.empty() ? parse_config_string(text) : preset_spec(preset, desk);
            if (desk && preset.empty())
                apply_desk_scale(s);
            return describe_config(s);
        },
        py::arg("text") = "", py::arg("preset") = "", py::arg("desk") = false);
    m.def(
        "config_digest", [](const std::string &text) { return config_digest(parse_config_string(text)); },
        py::arg("text") = "");
    m.def(
        "run_config",
        [](const std::string &text, std::optional<long> trials, std::optional<std::uint64_t> seed, int threads)
        { return run_spec(parse_config_string(text), trials, seed, threads); },
        py::arg("text"), py::arg("trials") = py::none(), py::arg("seed") = py::none(), py::arg("threads") = 1,
        "Runs a TOML config and returns the result CSV as text.");
    m.def(
        "run_preset",
        [](const std::string &name, bool desk, std::optional<long> trials, std::optional<std::uint64_t> seed,
           int threads) { return run_spec(preset_spec(name, desk), trials, seed, threads); },
        py::arg("name"), py::arg("desk") = true, py::arg("trials") = py::none(), py::arg("seed") = py::none(),
        py::arg("threads") = 1);
    m.def(
        "parse_csv",
        [](const std::string &text)
        {
            py::list out;
            for (const auto &r : parse_csv(text))
                out.append(row_dict(r));
            return out;
        },
        py::arg("text"));
    m.def(
        "qos_crossing",
        [](const std::vector<int> &n, const std::vector<double> &se, double qos) { return qos_crossing(n, se, qos); },
        py::arg("n"), py::arg("se"), py::arg("qos"));
    m.def(
        "validate",
        [](std::uint64_t seed, long trials)
        {
            std::vector<CheckResult> checks;
            {
                py::gil_scoped_release nogil;
                checks = run_validation(seed, trials);
            }
            py::list out;
            for (const auto &c : checks)
                out.append(py::make_tuple(c.name, c.passed, c.detail));
            return out;
        },
        py::arg("seed") = 1, py::arg("trials") = 1000);
}
