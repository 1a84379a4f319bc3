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

#include "irsmimo/common.hpp"

#include <optional>
#include <vector>

namespace irsmimo
{
    /// Converter resolution in bits; std::nullopt means an ideal (infinite-resolution) converter.
    using Resolution = std::optional<int>;

    /// Normalized MSE of the optimal b-bit scalar quantizer for a Gaussian input.
    /// Ideal resolution gives 0. Throws std::invalid_argument for bits < 1.
    double distortion_factor(Resolution bits);

    /// Lloyd-Max quantizer for a unit-variance real Gaussian input.
    /// Applied per real dimension it quantizes circular complex Gaussians with the same normalized MSE.
    class LloydMaxQuantizer
    {
    public:
        explicit LloydMaxQuantizer(int bits);

        int bits() const { return bits_; }
        const std::vector<double> &levels() const { return levels_; }
        const std::vector<double> &thresholds() const { return thresholds_; } // levels().size() - 1 entries

        /// Output for unit-variance input x.
        double quantize(double x) const;
        /// Quantizes a CN(0, variance) sample with per-dimension scaling.
        cplx quantize(cplx x, double variance) const;
        /// E[(x - Q(x))^2] for x ~ N(0, 1), evaluated by quadrature of the cell integrals.
        double mse() const;

    private:
        int bits_;
        std::vector<double> levels_;
        std::vector<double> thresholds_;
    };

    /// EVM scalars and converter resolutions of UEs and BSs.
    struct HardwareProfile
    {
        double kappa_ue = 0.05;
        double kappa_bs = 0.1;
        Resolution bits_ue = 4; // DAC
        Resolution bits_bs = 4; // ADC
        rvec alpha_bs_per_antenna;  // optional override of diag(A), one gain per antenna

        double rho_ue() const { return distortion_factor(bits_ue); }
        double alpha_ue() const { return 1.0 - rho_ue(); }
        double rho_bs() const { return distortion_factor(bits_bs); }
        /// diag(A) for an N-antenna BS.
        rvec alpha_bs(int num_antennas) const;

        bool is_ideal() const;
        static HardwareProfile ideal();

        /// Throws ConfigError when an invariant is violated.
        void validate() const;
    };

    /// alpha_u sqrt(p) x + n_DAC + eta_u with n_DAC ~ CN(0, rho alpha p), eta_u ~ CN(0, kappa_u^2 alpha p).
    /// Zero-variance components draw nothing from `rng`.
    cplx ue_transmit_chain(cplx symbol, double power, const HardwareProfile &profile, Rng &rng);

    /// E|s|^2 of the UE chain output for a unit-power symbol: alpha (1 + kappa_u^2) p.
    double ue_transmit_power(double power, const HardwareProfile &profile);

    /// Diagonal of D from per-antenna conditional received signal power (entries must be non-negative).
    rvec bs_d_matrix(const rvec &signal_power);

    struct BsChainOutput
    {
        cvec y;      // A (clean + eta_bs) + n_adc
        cvec eta_bs; // RF distortion, CN(0, kappa_b^2 D)
        cvec n_adc;  // quantization noise, CN(0, T C)
    };

    /// C = (1 + kappa_b^2) D + sigma^2 I, diagonal.
    rvec bs_c_matrix(const rvec &D, double kappa_bs, double noise_power);

    /// Applies the BS RF and ADC chain to `clean_rx` (channel output plus AWGN).
    /// D is the signal part of the pre-RF received power; T = A (I - A).
    BsChainOutput bs_receive_chain(const cvec &clean_rx, const HardwareProfile &profile, const rvec &D,
                                   double noise_power, Rng &rng);
}
