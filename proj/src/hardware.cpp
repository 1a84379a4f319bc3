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

#include "irsmimo/hardware.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

namespace irsmimo
{
    namespace
    {
        double std_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }
        double std_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

        double std_quantile(double p)
        {
            double lo = -40.0, hi = 40.0;
            for (int it = 0; it < 200; ++it)
            {
                double mid = 0.5 * (lo + hi);
                (std_cdf(mid) < p ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }

        // Lloyd iteration on the Gaussian density started from the compander point density
        // (levels at sqrt(3) * quantiles), which is already close to optimal.
        void lloyd_max(int bits, std::vector<double> &levels, std::vector<double> &thresholds)
        {
            const int n = 1 << bits;
            levels.resize(std::size_t(n));
            thresholds.resize(std::size_t(n - 1));
            for (int i = 0; i < n; ++i)
                levels[std::size_t(i)] = std::sqrt(3.0) * std_quantile((i + 0.5) / n);

            for (int it = 0; it < 20000; ++it)
            {
                for (int i = 0; i < n - 1; ++i)
                    thresholds[std::size_t(i)] = 0.5 * (levels[std::size_t(i)] + levels[std::size_t(i + 1)]);
                double change = 0.0;
                for (int i = 0; i < n; ++i)
                {
                    double a = i == 0 ? -INFINITY : thresholds[std::size_t(i - 1)];
                    double b = i == n - 1 ? INFINITY : thresholds[std::size_t(i)];
                    double mass = std_cdf(b) - std_cdf(a);
                    double pa = std::isinf(a) ? 0.0 : std_pdf(a);
                    double pb = std::isinf(b) ? 0.0 : std_pdf(b);
                    double c = (pa - pb) / mass;
                    change = std::max(change, std::abs(c - levels[std::size_t(i)]));
                    levels[std::size_t(i)] = c;
                }
                if (change < 1e-14)
                    break;
            }
            for (int i = 0; i < n - 1; ++i)
                thresholds[std::size_t(i)] = 0.5 * (levels[std::size_t(i)] + levels[std::size_t(i + 1)]);
        }

        // At the Lloyd fixed point each level is its cell centroid, so MSE = 1 - sum P_i y_i^2.
        double centroid_mse(const std::vector<double> &levels, const std::vector<double> &thresholds)
        {
            const std::size_t n = levels.size();
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                double a = i == 0 ? -INFINITY : thresholds[i - 1];
                double b = i == n - 1 ? INFINITY : thresholds[i];
                s += (std_cdf(b) - std_cdf(a)) * levels[i] * levels[i];
            }
            return 1.0 - s;
        }

        constexpr int max_lloyd_bits = 8;
    }

    double distortion_factor(Resolution bits)
    {
        if (!bits)
            return 0.0;
        if (*bits < 1)
            throw std::invalid_argument("distortion_factor: resolution must be at least 1 bit");
        if (*bits > max_lloyd_bits)
            return std::sqrt(3.0) * pi / 2.0 * std::pow(2.0, -2.0 * *bits); // high-resolution asymptote

        static std::array<double, max_lloyd_bits + 1> table{};
        static std::once_flag once;
        std::call_once(once, []
                       {
                           for (int b = 1; b <= max_lloyd_bits; ++b)
                           {
                               std::vector<double> lv, th;
                               lloyd_max(b, lv, th);
                               table[std::size_t(b)] = centroid_mse(lv, th);
                           } });
        return table[std::size_t(*bits)];
    }

    // ---------- LloydMaxQuantizer ----------

    LloydMaxQuantizer::LloydMaxQuantizer(int bits) : bits_(bits)
    {
        if (bits < 1 || bits > 16)
            throw std::invalid_argument("LloydMaxQuantizer: bits must be in [1, 16]");
        lloyd_max(bits, levels_, thresholds_);
    }

    double LloydMaxQuantizer::quantize(double x) const
    {
        auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), x);
        return levels_[std::size_t(it - thresholds_.begin())];
    }

    cplx LloydMaxQuantizer::quantize(cplx x, double variance) const
    {
        double s = std::sqrt(0.5 * variance);
        if (s == 0.0)
            return {0.0, 0.0};
        return {s * quantize(x.real() / s), s * quantize(x.imag() / s)};
    }

    double LloydMaxQuantizer::mse() const
    {
        // Per-cell E[(x - y)^2] = (1 + y^2) P - 2 y (pdf(a) - pdf(b)) + (a pdf(a) - b pdf(b)).
        const std::size_t n = levels_.size();
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            double a = i == 0 ? -INFINITY : thresholds_[i - 1];
            double b = i == n - 1 ? INFINITY : thresholds_[i];
            double pa = std::isinf(a) ? 0.0 : std_pdf(a);
            double pb = std::isinf(b) ? 0.0 : std_pdf(b);
            double apa = std::isinf(a) ? 0.0 : a * pa;
            double bpb = std::isinf(b) ? 0.0 : b * pb;
            double y = levels_[i];
            double mass = std_cdf(b) - std_cdf(a);
            total += (mass + apa - bpb) - 2.0 * y * (pa - pb) + y * y * mass;
        }
        return total;
    }

    // ---------- HardwareProfile ----------

    rvec HardwareProfile::alpha_bs(int num_antennas) const
    {
        if (alpha_bs_per_antenna.size() > 0)
        {
            if (alpha_bs_per_antenna.size() != num_antennas)
                throw ConfigError("per-antenna ADC gains must have one entry per BS antenna");
            return alpha_bs_per_antenna;
        }
        return rvec::Constant(num_antennas, 1.0 - rho_bs());
    }

    bool HardwareProfile::is_ideal() const
    {
        bool ideal_bs = alpha_bs_per_antenna.size() > 0 ? (alpha_bs_per_antenna.array() == 1.0).all() : !bits_bs;
        return kappa_ue == 0.0 && kappa_bs == 0.0 && !bits_ue && ideal_bs;
    }

    HardwareProfile HardwareProfile::ideal()
    {
        HardwareProfile h;
        h.kappa_ue = 0.0;
        h.kappa_bs = 0.0;
        h.bits_ue = std::nullopt;
        h.bits_bs = std::nullopt;
        return h;
    }

    void HardwareProfile::validate() const
    {
        if (!(kappa_ue >= 0.0) || !(kappa_bs >= 0.0))
            throw ConfigError("EVM values must be non-negative");
        if ((bits_ue && *bits_ue < 1) || (bits_bs && *bits_bs < 1))
            throw ConfigError("converter resolution must be at least 1 bit or ideal");
        for (Eigen::Index i = 0; i < alpha_bs_per_antenna.size(); ++i)
            if (!(alpha_bs_per_antenna[i] > 0.0 && alpha_bs_per_antenna[i] <= 1.0))
                throw ConfigError("per-antenna ADC gains must lie in (0, 1]");
    }

    // ---------- Chains ----------

    cplx ue_transmit_chain(cplx symbol, double power, const HardwareProfile &profile, Rng &rng)
    {
        const double rho = profile.rho_ue();
        const double alpha = 1.0 - rho;
        cplx s = alpha * std::sqrt(power) * symbol;
        const double var_dac = rho * alpha * power;
        const double var_rf = profile.kappa_ue * profile.kappa_ue * alpha * power;
        if (var_dac > 0.0)
            s += complex_normal(rng, var_dac);
        if (var_rf > 0.0)
            s += complex_normal(rng, var_rf);
        return s;
    }

    double ue_transmit_power(double power, const HardwareProfile &profile)
    {
        return profile.alpha_ue() * (1.0 + profile.kappa_ue * profile.kappa_ue) * power;
    }

    rvec bs_d_matrix(const rvec &signal_power)
    {
        if ((signal_power.array() < 0.0).any())
            throw std::invalid_argument("bs_d_matrix: received power must be non-negative");
        return signal_power;
    }

    rvec bs_c_matrix(const rvec &D, double kappa_bs, double noise_power)
    {
        return ((1.0 + kappa_bs * kappa_bs) * D.array() + noise_power).matrix();
    }

    BsChainOutput bs_receive_chain(const cvec &clean_rx, const HardwareProfile &profile, const rvec &D,
                                   double noise_power, Rng &rng)
    {
        const Eigen::Index N = clean_rx.size();
        if (D.size() != N)
            throw std::invalid_argument("bs_receive_chain: D has the wrong dimension");
        const rvec A = profile.alpha_bs(int(N));
        const double kb2 = profile.kappa_bs * profile.kappa_bs;

        BsChainOutput out;
        out.eta_bs = cvec::Zero(N);
        out.n_adc = cvec::Zero(N);
        if (kb2 > 0.0)
            for (Eigen::Index m = 0; m < N; ++m)
                if (D[m] > 0.0)
                    out.eta_bs[m] = complex_normal(rng, kb2 * D[m]);

        const rvec C = bs_c_matrix(D, profile.kappa_bs, noise_power);
        for (Eigen::Index m = 0; m < N; ++m)
        {
            double t = A[m] * (1.0 - A[m]);
            if (t > 0.0)
                out.n_adc[m] = complex_normal(rng, t * C[m]);
        }
        out.y = A.cast<cplx>().asDiagonal() * (clean_rx + out.eta_bs);
        out.y += out.n_adc;
        return out;
    }
}
