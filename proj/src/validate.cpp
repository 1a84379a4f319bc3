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

#include "irsmimo/validate.hpp"

#include "irsmimo/config.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace irsmimo
{
    namespace
    {
        std::string str(double v)
        {
            std::ostringstream os;
            os.precision(6);
            os << v;
            return os.str();
        }

        void add(std::vector<CheckResult> &out, std::string name, bool ok, std::string detail)
        {
            out.push_back({std::move(name), ok, std::move(detail)});
        }
    }

    std::vector<CheckResult> run_validation(std::uint64_t seed, long trials, int threads)
    {
        std::vector<CheckResult> out;

        {
            const double j = bessel_j0(2.404825557695773);
            add(out, "bessel first zero", std::abs(j) < 1e-6, "J0(2.404826) = " + str(j));
        }
        {
            const double ref[3] = {0.3634, 0.1175, 0.009497};
            const int bits[3] = {1, 2, 4};
            double worst = 0.0;
            for (int i = 0; i < 3; ++i)
                worst = std::max(worst, std::abs(distortion_factor(bits[i]) / ref[i] - 1.0));
            add(out, "quantizer distortion table", worst < 0.01, "max relative deviation " + str(worst));
        }
        {
            const double d = wrap_distance({0.1, 0.1}, {0.4, 0.4}, 0.5);
            const double w = wrap_distance({0.0, 0.0}, {0.49, 0.0}, 0.5);
            add(out, "wrap-around distance", std::abs(d - std::sqrt(0.08)) < 1e-12 && std::abs(w - 0.01) < 1e-12,
                str(d) + " km, " + str(w) + " km");
        }
        {
            const cvec a = upa_steering({2, 1}, pi / 2, 0.0, 0.5);
            cvec expected(2);
            expected << 1.0, -1.0;
            const double err = (a - expected).norm();
            add(out, "steering vector", err < 1e-12, "error " + str(err));
        }

        SweepSpec desk = default_spec();
        apply_desk_scale(desk);
        const Scenario scn = build_scenario(desk.base, desk.hardware, seed);
        const EstimatorBank bank(scn);
        {
            double worst = 1e300;
            const double floor = scn.cfg.noise_power_w * scn.alpha_bs.minCoeff() * scn.alpha_bs.minCoeff();
            for (int j = 0; j < scn.L(); ++j)
                for (int k = 0; k < scn.K(); ++k)
                {
                    Eigen::SelfAdjointEigenSolver<cmat> es(bank.psi(j, k), Eigen::EigenvaluesOnly);
                    worst = std::min(worst, es.eigenvalues().minCoeff() / floor);
                }
            add(out, "pilot covariance bounded by noise", worst >= 1.0 - 1e-9,
                "min eigenvalue / (sigma^2 alpha^2) = " + str(worst));
        }
        {
            bool ok = true;
            for (int l = 0; l < scn.L(); ++l)
                for (int k = 0; k < scn.K(); ++k)
                    for (int j = 0; j < scn.L(); ++j)
                        ok = ok && linalg::is_hermitian_psd(bank.C_err(l, k, j), 1e-8);
            add(out, "error covariance PSD", ok, ok ? "all links" : "violated");
        }
        {
            const Scenario ideal = build_scenario(desk.base, HardwareProfile::ideal(), seed);
            const auto b = estimate_terms(ideal, ReceiverKind::mrc, ideal.lambda() + 5, 200, seed, threads);
            const bool ok = b.mean.DAC() == 0.0 && b.mean.TRF() == 0.0 && b.mean.RRF() == 0.0 && b.mean.ADC() == 0.0;
            add(out, "ideal hardware has no distortion terms", ok,
                "DAC+TRF+RRF+ADC = " + str(b.mean.DAC() + b.mean.TRF() + b.mean.RRF() + b.mean.ADC()));
        }
        {
            SystemConfig c = desk.base;
            c.ue_speed_mps = 0.0;
            const Scenario stat = build_scenario(c, desk.hardware, seed);
            const auto b = estimate_terms(stat, ReceiverKind::mrc, stat.cfg.frame_length, 200, seed, threads);
            add(out, "static users have no aging term", b.mean.CA() == 0.0, "CA = " + str(b.mean.CA()));
        }
        {
            TermOptions opt;
            opt.receivers = {ReceiverKind::mrc};
            opt.n_grid = {scn.lambda()};
            opt.trials = trials;
            opt.seed = seed;
            opt.threads = threads;
            const auto b = estimate_terms(scn, bank, opt)[0][0];
            const double z = (b.mean.MUI() - b.mui_closed_form) / b.std_error.MUI();
            add(out, "closed-form MUI matches Monte Carlo", std::abs(z) <= 3.0, "z = " + str(z));
        }
        {
            const auto r = decomposition_check(scn, bank, ReceiverKind::daa_mmse, scn.lambda() + 10, trials, seed);
            add(out, "received power equals the term sum", std::abs(r.z()) <= 3.0, "z = " + str(r.z()));
        }
        return out;
    }
}
