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

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

using namespace irsmimo;
using Catch::Approx;

namespace
{
    struct Fixture
    {
        Scenario scn;
        EstimatorBank bank;
        PilotPhase pp;

        Fixture(const SystemConfig &cfg, const HardwareProfile &hw, std::uint64_t trial = 0)
            : scn(build_scenario(cfg, hw, 11)), bank(scn)
        {
            TrialStreams st = trial_streams(3, trial);
            pp = run_pilot_phase(scn, bank, st);
        }
    };

    // |<a, b>| / (|a| |b|) and the phase of <a, b>
    double alignment(const cvec &a, const cvec &b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }
}

TEST_CASE("receiver names", "[receivers]")
{
    CHECK(to_string(ReceiverKind::mrc) == "mrc");
    CHECK(to_string(ReceiverKind::du_mmse) == "du-mmse");
    CHECK(to_string(ReceiverKind::daa_mmse) == "daa-mmse");
    CHECK(parse_receiver("DAA_MMSE") == ReceiverKind::daa_mmse);
    CHECK(parse_receiver("du") == ReceiverKind::du_mmse);
    CHECK(parse_receiver("MRC") == ReceiverKind::mrc);
    CHECK_THROWS_AS(parse_receiver("zf"), ConfigError);
}

TEST_CASE("MRC is the own estimate and SINR is scale invariant", "[receivers]")
{
    Fixture f(testing::desk_config(), HardwareProfile{});
    const int n = f.scn.lambda() + 4;
    for (int k = 0; k < f.scn.K(); ++k)
    {
        const cvec v = mrc(f.pp.est, 0, k);
        CHECK(v == f.pp.est.at(0, k, 0));
        const cvec c = daa_c_vector(f.scn, f.pp.est, 0, k, n);
        const cmat B = daa_b_matrix(f.scn, f.bank, f.pp.est, 0, k, n);
        const double s1 = conditional_sinr(v, c, B), s2 = conditional_sinr(cplx(2.0, -1.0) * v, c, B);
        CHECK(std::abs(s1 - s2) <= 1e-12 * s1);
    }
}

TEST_CASE("DAA-MMSE solves B v = c with B Hermitian positive definite", "[receivers]")
{
    Fixture f(testing::desk_config(), HardwareProfile{});
    for (int n : {f.scn.lambda(), f.scn.cfg.frame_length})
        for (int j = 0; j < f.scn.L(); ++j)
            for (int k = 0; k < f.scn.K(); ++k)
            {
                const cmat B = daa_b_matrix(f.scn, f.bank, f.pp.est, j, k, n);
                const cvec c = daa_c_vector(f.scn, f.pp.est, j, k, n);
                const cvec v = daa_mmse(f.scn, f.bank, f.pp.est, j, k, n);
                CHECK((B * v - c).norm() <= 1e-8 * c.norm());
                CHECK((B - B.adjoint()).norm() == 0.0);
                Eigen::SelfAdjointEigenSolver<cmat> es(B, Eigen::EigenvaluesOnly);
                CHECK(es.eigenvalues().minCoeff() > 0.0);
            }
}

TEST_CASE("batched DAA-MMSE is the per-user solve with the MMSE scale", "[receivers]")
{
    Fixture f(testing::desk_config(), HardwareProfile{});
    const int n = f.scn.lambda() + 7;
    for (int j = 0; j < f.scn.L(); ++j)
    {
        const cmat V = daa_mmse_all(f.scn, f.pp.est, j, n, daa_signal_static(f.scn, f.bank, j, n));
        for (int k = 0; k < f.scn.K(); ++k)
        {
            const cvec v = daa_mmse(f.scn, f.bank, f.pp.est, j, k, n);
            const cplx ip = v.dot(V.col(k));
            CHECK(std::abs(ip.imag()) <= 1e-10 * std::abs(ip));
            CHECK(ip.real() > 0.0);
            CHECK(alignment(v, V.col(k)) == Approx(1.0).epsilon(1e-10));
            const cvec c = daa_c_vector(f.scn, f.pp.est, j, k, n);
            const cvec mmse = v / (1.0 + c.dot(v).real());
            CHECK((V.col(k) - mmse).norm() <= 1e-8 * mmse.norm());
        }
    }
}

TEST_CASE("DAA-MMSE maximizes the conditional SINR", "[receivers]")
{
    Fixture f(testing::desk_config(), HardwareProfile{});
    Rng rng(123);
    const int n = f.scn.lambda() + 20;
    for (int k = 0; k < f.scn.K(); ++k)
    {
        const cmat B = daa_b_matrix(f.scn, f.bank, f.pp.est, 0, k, n);
        const cvec c = daa_c_vector(f.scn, f.pp.est, 0, k, n);
        const cvec v = daa_mmse(f.scn, f.bank, f.pp.est, 0, k, n);
        const double best = conditional_sinr(v, c, B);
        for (int i = 0; i < 100; ++i)
        {
            const cvec d = complex_normal_vector(rng, v.size());
            CHECK(conditional_sinr(v + 1e-2 * v.norm() / d.norm() * d, c, B) <= best * (1.0 + 1e-12));
        }
        CHECK(conditional_sinr(mrc(f.pp.est, 0, k), c, B) <= best * (1.0 + 1e-12));
        CHECK(conditional_sinr(du_mmse(f.scn, f.bank, f.pp.est, 0, k), c, B) <= best * (1.0 + 1e-12));
    }
}

TEST_CASE("DAA-MMSE reduces to the classic MMSE combiner without impairments or aging", "[receivers]")
{
    SystemConfig cfg = testing::desk_config();
    cfg.num_cells = 1;
    cfg.ue_speed_mps = 0.0;
    Fixture f(cfg, HardwareProfile::ideal());
    const double p = cfg.data_power_w;
    cmat M = cfg.noise_power_w * cmat::Identity(f.scn.N(), f.scn.N());
    for (int i = 0; i < f.scn.K(); ++i)
    {
        const cvec &g = f.pp.est.at(0, i, 0);
        M += p * (g * g.adjoint() + f.bank.C_err(0, i, 0));
    }
    for (int k = 0; k < f.scn.K(); ++k)
    {
        const cvec classic = M.ldlt().solve(f.pp.est.at(0, k, 0));
        const cvec daa = daa_mmse(f.scn, f.bank, f.pp.est, 0, k, f.scn.lambda() + 9);
        const cvec du = du_mmse(f.scn, f.bank, f.pp.est, 0, k);
        CHECK(alignment(daa, classic) == Approx(1.0).epsilon(1e-8));
        CHECK((du.normalized() - classic.normalized()).norm() < 1e-8);
        const cplx ip = daa.dot(du);
        CHECK(ip.real() > 0.0);
        CHECK((daa / daa.norm() * std::polar(1.0, std::arg(ip)) - du.normalized()).norm() < 1e-8);
    }
}

TEST_CASE("DAA-MMSE vanishes where the channel has fully aged", "[receivers]")
{
    SystemConfig cfg = testing::desk_config();
    const double fd = cfg.ue_speed_mps * cfg.carrier_hz / 299792458.0;
    cfg.sample_period_s = 2.404825557695773 / (2.0 * pi * fd * 10.0);
    Fixture f(cfg, HardwareProfile{});
    const int n0 = f.scn.lambda() + 10;
    REQUIRE(std::abs(f.scn.vartheta(0, 0, n0)) < 1e-9);
    const cvec fresh = daa_mmse(f.scn, f.bank, f.pp.est, 0, 0, f.scn.lambda());
    const cvec aged = daa_mmse(f.scn, f.bank, f.pp.est, 0, 0, n0);
    CHECK(aged.norm() <= 1e-8 * fresh.norm());
    CHECK(du_mmse(f.scn, f.bank, f.pp.est, 0, 0).norm() > 0.0);
}

TEST_CASE("DU-MMSE structure", "[receivers]")
{
    Fixture f(testing::desk_config(), HardwareProfile{});
    // no other users and no estimation error: the matched filter direction
    const cvec &g = f.pp.est.at(0, 0, 0);
    Scenario lone = f.scn;
    const cmat S = lone.cfg.noise_power_w * cmat::Identity(lone.N(), lone.N());
    EstimationResult only = f.pp.est;
    for (auto &x : only.g_hat)
        x.setZero();
    only.g_hat[0] = g; // (l, k, j) = (0, 0, 0)
    const cvec v = du_mmse_all(lone, only, 0, S).col(0);
    CHECK(alignment(v, g) == Approx(1.0).epsilon(1e-12));

    // common scaling of the data power and the noise only rescales the combiner
    Scenario scaled = f.scn;
    scaled.cfg.data_power_w *= 7.0;
    scaled.cfg.noise_power_w *= 7.0;
    for (int k = 0; k < f.scn.K(); ++k)
    {
        const cvec a = du_mmse(f.scn, f.bank, f.pp.est, 0, k);
        const cvec b = du_mmse(scaled, f.bank, f.pp.est, 0, k);
        CHECK((a - 7.0 * b).norm() <= 1e-10 * a.norm());
    }
}

TEST_CASE("conditional SINR ordering across trials", "[receivers]")
{
    const Scenario scn = build_scenario(testing::desk_config(), HardwareProfile{}, 11);
    const EstimatorBank bank(scn);
    const int n = scn.lambda() + 10;
    double du_sum = 0.0, mrc_sum = 0.0;
    for (int t = 0; t < 200; ++t)
    {
        TrialStreams st = trial_streams(9, std::uint64_t(t));
        const PilotPhase pp = run_pilot_phase(scn, bank, st);
        for (int j = 0; j < scn.L(); ++j)
            for (int k = 0; k < scn.K(); ++k)
            {
                const cmat B = daa_b_matrix(scn, bank, pp.est, j, k, n);
                const cvec c = daa_c_vector(scn, pp.est, j, k, n);
                const double daa = conditional_sinr(daa_mmse(scn, bank, pp.est, j, k, n), c, B);
                const double du = conditional_sinr(du_mmse(scn, bank, pp.est, j, k), c, B);
                const double mr = conditional_sinr(mrc(pp.est, j, k), c, B);
                CHECK(daa >= du * (1.0 - 1e-12));
                CHECK(daa >= mr * (1.0 - 1e-12));
                du_sum += du;
                mrc_sum += mr;
            }
    }
    CHECK(du_sum >= mrc_sum);
}

TEST_CASE("conditional SINR rejects a degenerate denominator", "[receivers]")
{
    const cvec v = cvec::Ones(2), c = cvec::Ones(2);
    CHECK_THROWS_AS(conditional_sinr(v, c, cmat::Zero(2, 2)), NumericalError);
}
