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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace irsmimo
{
    using cplx = std::complex<double>;
    using cvec = Eigen::VectorXcd;
    using cmat = Eigen::MatrixXcd;
    using rvec = Eigen::VectorXd;
    using rmat = Eigen::MatrixXd;

    using Rng = std::mt19937_64;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0;

    /// Invalid configuration or arguments (CLI exit code 2).
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Numerical breakdown such as a singular covariance (CLI exit code 3).
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
    inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

    // SplitMix64 finalizer, used to derive independent stream seeds.
    inline std::uint64_t mix_seed(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t combine_seed(std::uint64_t a, std::uint64_t b)
    {
        return mix_seed(a ^ mix_seed(b + 0x632be59bd9b4e019ULL));
    }

    /// Draws from CN(0, variance).
    inline cplx complex_normal(Rng &rng, double variance)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
        double re = nd(rng);
        double im = nd(rng);
        return {re, im};
    }

    /// Vector of i.i.d. CN(0, 1) entries.
    inline cvec complex_normal_vector(Rng &rng, Eigen::Index n)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
        cvec w(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            double re = nd(rng);
            double im = nd(rng);
            w[i] = {re, im};
        }
        return w;
    }

    inline double uniform_phase(Rng &rng)
    {
        std::uniform_real_distribution<double> ud(-pi, pi);
        return ud(rng);
    }
}
