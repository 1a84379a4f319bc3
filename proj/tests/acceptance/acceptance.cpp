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
// Acceptance run on the desk instance (L=2, K=2, N=4x2, M=4x4, tau_p=2, tau_c=60).
// Prints one PASS/FAIL line per criterion; exit status 1 when any criterion fails.

#include "test_util.hpp"

#include "irsmimo/config.hpp"
#include "irsmimo/csv.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

using namespace irsmimo;

namespace
{
    struct Outcome
    {
        bool passed = true;
        std::ostringstream detail;

        void require(bool ok, const std::string &what)
        {
            if (!ok)
            {
                passed = false;
                detail << "[failed: " << what << "] ";
            }
        }
    };

    SystemConfig desk() { return testing::desk_config(); }

    std::vector<std::vector<SeBreakdown>> terms(const Scenario &scn, const EstimatorBank &bank,
                                                std::vector<ReceiverKind> receivers, std::vector<int> grid,
                                                long trials, std::uint64_t seed)
    {
        TermOptions opt;
        opt.receivers = std::move(receivers);
        opt.n_grid = std::move(grid);
        opt.trials = trials;
        opt.seed = seed;
        opt.threads = 0;
        return estimate_terms(scn, bank, opt);
    }

    // 1. MRC interference closed form against Monte Carlo.
    void bound_validation(Outcome &o)
    {
        double worst = 0.0;
        for (bool ideal : {true, false})
            for (double v_kmh : {0.0, 72.0})
            {
                SystemConfig cfg = desk();
                cfg.ue_speed_mps = v_kmh / 3.6;
                const Scenario scn = build_scenario(cfg, ideal ? HardwareProfile::ideal() : HardwareProfile{}, 1);
                const EstimatorBank bank(scn);
                const auto rows = terms(scn, bank, {ReceiverKind::mrc}, {scn.lambda(), cfg.frame_length}, 4000, 101);
                for (const SeBreakdown &b : rows[0])
                {
                    const double z = std::abs(b.mean.MUI() - b.mui_closed_form) / b.std_error.MUI();
                    worst = std::max(worst, z);
                    o.require(z <= 3.0, std::string(ideal ? "ideal" : "impaired") + " v=" +
                                            std::to_string(int(v_kmh)) + " n=" + std::to_string(b.n));
                }
            }
        o.detail << "max |MUI_mc - MUI_closed| / stderr = " << worst << " over 4 configs x 2 instants";
    }

    // 2. Received power equals the sum of the ten term estimators.
    void decomposition(Outcome &o)
    {
        const Scenario scn = build_scenario(desk(), HardwareProfile{}, 2);
        const EstimatorBank bank(scn);
        for (ReceiverKind r : {ReceiverKind::mrc, ReceiverKind::du_mmse, ReceiverKind::daa_mmse})
            for (int n : {scn.lambda(), 40})
            {
                const DecompositionReport rep = decomposition_check(scn, bank, r, n, 4000, 202);
                o.require(std::abs(rep.z()) <= 3.0, to_string(r));
                o.detail << to_string(r) << "@" << n << " z=" << rep.z() << " ";
            }
    }

    // 3. Second-order statistics of the LMMSE estimates.
    void lmmse_suite(Outcome &o)
    {
        const Scenario scn = build_scenario(desk(), HardwareProfile{}, 3);
        const EstimatorBank bank(scn);
        const int L = scn.L(), K = scn.K();
        std::vector<testing::CovarianceAccumulator> cov(std::size_t(L * K * L));
        std::vector<testing::CrossAccumulator> cross(cov.size());
        for (long t = 0; t < 100000; ++t)
        {
            TrialStreams st = trial_streams(303, std::uint64_t(t));
            const PilotPhase pp = run_pilot_phase(scn, bank, st);
            for (int l = 0; l < L; ++l)
                for (int k = 0; k < K; ++k)
                    for (int j = 0; j < L; ++j)
                    {
                        const std::size_t i = std::size_t((l * K + k) * L + j);
                        const cvec &gh = pp.est.at(l, k, j);
                        cov[i].add(gh);
                        cross[i].add(gh, pp.at_lambda.g(l, k, j) - gh);
                    }
        }
        double worst_cov = 0.0, worst_z = 0.0;
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < L; ++j)
                {
                    const std::size_t i = std::size_t((l * K + k) * L + j);
                    worst_cov = std::max(worst_cov, testing::rel_frobenius(cov[i].mean(), bank.C_hat(l, k, j)));
                    worst_z = std::max(worst_z, cross[i].max_z());
                }
        o.require(worst_cov <= 0.02, "cov(ghat) vs C_hat");
        o.require(worst_z <= 3.0, "orthogonality");

        // pilot lag grows with tau_p for user 0; faster aging makes it visible
        std::vector<double> tr;
        for (int tau_p = 2; tau_p <= 6; ++tau_p)
        {
            SystemConfig cfg = desk();
            cfg.pilot_length = tau_p;
            cfg.sample_period_s = 2e-4;
            const Scenario s = build_scenario(cfg, HardwareProfile{}, 3);
            tr.push_back(EstimatorBank(s).C_hat(0, 0, 0).trace().real());
        }
        for (std::size_t i = 1; i < tr.size(); ++i)
            o.require(tr[i] <= tr[i - 1], "trace(C_hat) monotone in lag");
        o.detail << "max rel Frobenius " << worst_cov << ", max orthogonality z " << worst_z
                 << ", trace(C_hat) lag 2..6: " << tr.front() << " -> " << tr.back() << " (1e5 trials)";
    }

    // Impairment-free reference: textbook LMMSE, combiners and use-and-then-forget SE
    // written without the hardware model, on the same random streams.
    // Relative perturbation of one ulp on every entry, kept Hermitian.
    void ulp_jitter(cmat &A, Rng &rng)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double e = std::numeric_limits<double>::epsilon();
        for (Eigen::Index a = 0; a < A.rows(); ++a)
            for (Eigen::Index b = a; b < A.cols(); ++b)
            {
                const cplx v = A(a, b) * cplx(1.0 + e * u(rng), a == b ? 0.0 : e * u(rng));
                A(a, b) = a == b ? cplx(v.real(), 0.0) : v;
                A(b, a) = std::conj(A(a, b));
            }
    }

    // `jitter` perturbs the combiner matrices to expose the rounding floor of the SE.
    std::vector<std::vector<double>> reference_se(const Scenario &scn, const std::vector<int> &grid, long trials,
                                                  std::uint64_t seed, Rng *jitter = nullptr)
    {
        const int L = scn.L(), K = scn.K(), N = scn.N(), U = L * K;
        const double p = scn.cfg.data_power_w, pp = scn.cfg.pilot_power_w, s2 = scn.cfg.noise_power_w;
        const cmat I = cmat::Identity(N, N);
        auto theta = [&](int l, int i, int lag)
        { return std::cyl_bessel_j(0.0, 2.0 * pi * scn.cfg.doppler_hz(l, i) * scn.cfg.sample_period_s * lag); };
        auto Cg = [&](int l, int i, int j) -> const cmat & { return scn.channels.C_g(l, i, j); };

        // Psi^-1 per (j, k); C_hat and C_err per (l, k, j)
        std::vector<cmat> psi_inv(std::size_t(L * K)), c_err(std::size_t(U * L));
        for (int j = 0; j < L; ++j)
            for (int k = 0; k < K; ++k)
            {
                cmat psi = s2 * I;
                for (int l = 0; l < L; ++l)
                    psi += pp * Cg(l, k, j);
                psi_inv[std::size_t(j * K + k)] = psi.inverse();
                for (int l = 0; l < L; ++l)
                {
                    const double th = theta(l, k, scn.lambda() - (k + 1));
                    c_err[std::size_t((l * K + k) * L + j)] =
                        Cg(l, k, j) - pp * th * th * Cg(l, k, j) * psi_inv[std::size_t(j * K + k)] * Cg(l, k, j);
                }
            }

        const std::size_t R = 3, G = grid.size();
        // per (r, ni, ue): sums of a = v^H g_jk[lambda] and of the total received power
        std::vector<cplx> sum_a(R * G * std::size_t(U));
        std::vector<double> sum_pow(sum_a.size());
        for (long t = 0; t < trials; ++t)
        {
            TrialStreams st = trial_streams(seed, std::uint64_t(t));
            const ChannelState now = scn.channels.draw_state(st.channel, scn.lambda());
            const ChannelState pilot = pilot_channels(scn, now, st.channel);
            std::vector<cvec> y(std::size_t(L * K));
            for (int k = 0; k < K; ++k)
                for (int j = 0; j < L; ++j)
                {
                    cvec r = cvec::Zero(N);
                    for (int l = 0; l < L; ++l)
                        r += std::sqrt(pp) * pilot.g(l, k, j);
                    y[std::size_t(j * K + k)] = r + std::sqrt(s2) * complex_normal_vector(st.awgn, N);
                }
            auto ghat = [&](int l, int k, int j) -> cvec
            {
                const double th = theta(l, k, scn.lambda() - (k + 1));
                return std::sqrt(pp) * th * Cg(l, k, j) * psi_inv[std::size_t(j * K + k)] * y[std::size_t(j * K + k)];
            };
            for (int j = 0; j < L; ++j)
            {
                std::vector<cvec> gh(static_cast<std::size_t>(U));
                cmat du = s2 * I;
                for (int l = 0; l < L; ++l)
                    for (int i = 0; i < K; ++i)
                    {
                        gh[std::size_t(l * K + i)] = ghat(l, i, j);
                        const cvec &g = gh[std::size_t(l * K + i)];
                        du += p * (g * g.adjoint() + c_err[std::size_t((l * K + i) * L + j)]);
                    }
                if (jitter)
                    ulp_jitter(du, *jitter);
                const Eigen::LLT<cmat> du_llt(du);
                for (std::size_t ni = 0; ni < G; ++ni)
                {
                    const int lag = grid[ni] - scn.lambda();
                    // statistical part shared by every user of BS j
                    cmat common = s2 * I;
                    for (int l = 0; l < L; ++l)
                        for (int i = 0; i < K; ++i)
                        {
                            const double th = theta(l, i, lag);
                            common += p * (th * th * c_err[std::size_t((l * K + i) * L + j)] +
                                           (1.0 - th * th) * Cg(l, i, j));
                        }
                    for (int k = 0; k < K; ++k)
                    {
                        const cvec &g = gh[std::size_t(j * K + k)];
                        // B_jk: every estimate except the user's own
                        cmat B = common;
                        for (int l = 0; l < L; ++l)
                            for (int i = 0; i < K; ++i)
                                if (l != j || i != k)
                                {
                                    const double th = theta(l, i, lag);
                                    const cvec &o = gh[std::size_t(l * K + i)];
                                    B += p * th * th * o * o.adjoint();
                                }
                        // MMSE scaling of B^-1 c: (B + c c^H)^-1 c
                        const cvec c = std::sqrt(p) * theta(j, k, lag) * g;
                        cmat Bc = B + c * c.adjoint();
                        if (jitter)
                            ulp_jitter(Bc, *jitter);
                        const cvec v_daa = Bc.llt().solve(c);
                        const cvec vs[3] = {g, du_llt.solve(g), v_daa};
                        for (std::size_t r = 0; r < R; ++r)
                        {
                            const cvec &v = vs[r];
                            double pow = s2 * v.squaredNorm();
                            for (int l = 0; l < L; ++l)
                                for (int i = 0; i < K; ++i)
                                {
                                    const double th = theta(l, i, lag);
                                    pow += p * (th * th * std::norm(v.dot(now.g(l, i, j))) +
                                                (1.0 - th * th) * v.dot(Cg(l, i, j) * v).real());
                                }
                            const std::size_t idx = (r * G + ni) * std::size_t(U) + std::size_t(j * K + k);
                            sum_a[idx] += v.dot(now.g(j, k, j));
                            sum_pow[idx] += pow;
                        }
                    }
                }
            }
        }
        std::vector<std::vector<double>> se(R, std::vector<double>(G, 0.0));
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t ni = 0; ni < G; ++ni)
                for (int j = 0; j < L; ++j)
                    for (int k = 0; k < K; ++k)
                    {
                        const std::size_t idx = (r * G + ni) * std::size_t(U) + std::size_t(j * K + k);
                        const double th = theta(j, k, grid[ni] - scn.lambda());
                        const double ds = p * th * th * std::norm(sum_a[idx] / double(trials));
                        const double total = sum_pow[idx] / double(trials);
                        se[r][ni] += std::log2(1.0 + ds / (total - ds)) / U;
                    }
        return se;
    }

    struct Degeneration
    {
        double deviation = 0.0; // max |SE - SE_ref|
        double floor = 0.0;     // max SE change of the reference under one-ulp matrix perturbations
        bool zero = true;
    };

    Degeneration degeneration(const SystemConfig &cfg)
    {
        const Scenario scn = build_scenario(cfg, HardwareProfile::ideal(), 4);
        const EstimatorBank bank(scn);
        const std::vector<int> grid{scn.lambda(), 30, 60};
        const long trials = 500;
        const auto lib = terms(scn, bank, {ReceiverKind::mrc, ReceiverKind::du_mmse, ReceiverKind::daa_mmse}, grid,
                               trials, 404);
        const auto ref = reference_se(scn, grid, trials, 404);
        Rng jitter(405);
        const auto jit = reference_se(scn, grid, trials, 404, &jitter);
        Degeneration d;
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t ni = 0; ni < grid.size(); ++ni)
            {
                d.deviation = std::max(d.deviation, std::abs(lib[r][ni].se - ref[r][ni]));
                d.floor = std::max(d.floor, std::abs(jit[r][ni] - ref[r][ni]));
                for (const SeTerms &t : lib[r][ni].per_ue)
                    d.zero = d.zero && t.DAC() == 0.0 && t.TRF() == 0.0 && t.RRF() == 0.0 && t.ADC() == 0.0;
            }
        return d;
    }

    // 4. Ideal hardware reproduces the impairment-free simulator. The 1e-12 comparison runs at
    // -150 dBm noise, where the reference resolves it; at the default -170 dBm a one-ulp change
    // of the combiner matrices already moves the SE by more than 1e-12.
    void hardware_degeneration(Outcome &o)
    {
        SystemConfig resolved = desk();
        resolved.noise_power_w = dbm_to_watts(-150.0);
        const Degeneration a = degeneration(resolved), b = degeneration(desk());
        o.require(a.zero && b.zero, "distortion terms identically zero");
        o.require(a.floor <= 1e-13, "reference resolves 1e-12 at -150 dBm");
        o.require(a.deviation <= 1e-12, "SE equals the reference");
        o.require(b.deviation <= 10.0 * b.floor, "default noise: SE within the rounding floor");
        o.detail << "distortion terms " << (a.zero && b.zero ? "all exactly 0" : "NONZERO")
                 << "; -150 dBm: max |SE - SE_ref| = " << a.deviation << " (floor " << a.floor
                 << "); default noise: " << b.deviation << " (floor " << b.floor << ")";
    }

    // Lloyd-Max for N(0, 1) from the closed-form cell moments.
    double lloyd_oracle(int bits)
    {
        const int n = 1 << bits;
        auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
        auto phi = [](double x) { return std::isinf(x) ? 0.0 : std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); };
        std::vector<double> c(static_cast<std::size_t>(n)), t(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i < n; ++i)
            c[std::size_t(i)] = -3.0 + 6.0 * (i + 0.5) / n;
        double mse = 0.0;
        for (int it = 0; it < 20000; ++it)
        {
            t.front() = -INFINITY;
            t.back() = INFINITY;
            for (int i = 1; i < n; ++i)
                t[std::size_t(i)] = 0.5 * (c[std::size_t(i - 1)] + c[std::size_t(i)]);
            double kept = 0.0;
            for (int i = 0; i < n; ++i)
            {
                const double a = t[std::size_t(i)], b = t[std::size_t(i) + 1];
                const double mass = Phi(b) - Phi(a);
                c[std::size_t(i)] = (phi(a) - phi(b)) / mass;
                kept += mass * c[std::size_t(i)] * c[std::size_t(i)];
            }
            mse = 1.0 - kept;
        }
        return mse;
    }

    // 5. Bussgang gain and distortion of the quantizer.
    void bussgang(Outcome &o)
    {
        Rng rng(505);
        for (int b : {1, 2, 4})
        {
            const double rho = distortion_factor(b), oracle = lloyd_oracle(b);
            o.require(std::abs(rho - oracle) <= 0.01 * oracle, "distortion factor b=" + std::to_string(b));

            // E[Q(x) x^*] = alpha E|x|^2 for x ~ CN(0, var)
            const LloydMaxQuantizer q(b);
            const double var = 2.5;
            const long S = 1000000;
            cplx sum = 0.0;
            double sum2 = 0.0;
            for (long s = 0; s < S; ++s)
            {
                const cplx x = complex_normal(rng, var);
                const cplx r = q.quantize(x, var) * std::conj(x);
                sum += r;
                sum2 += std::norm(r);
            }
            const cplx mean = sum / double(S);
            const double se = std::sqrt((sum2 / double(S) - std::norm(mean)) / double(S));
            const double z = std::abs(mean - (1.0 - rho) * var) / se;
            o.require(z <= 3.0, "cross-covariance b=" + std::to_string(b));
            o.detail << "b=" << b << ": rho " << rho << " vs oracle " << oracle << ", gain z " << z << "; ";
        }
    }

    // 6. Aging laws of the MRC terms.
    void aging_laws(Outcome &o)
    {
        for (double v_kmh : {72.0, 144.0})
        {
            SystemConfig cfg = desk();
            cfg.ue_speed_mps = v_kmh / 3.6;
            const Scenario scn = build_scenario(cfg, HardwareProfile{}, 6);
            const EstimatorBank bank(scn);
            const auto rows = terms(scn, bank, {ReceiverKind::mrc}, make_n_grid(scn.lambda(), cfg.frame_length, 5),
                                    4000, 606)[0];
            const AgingReport rep = aging_scaling_check(scn, rows);
            const std::string tag = " v=" + std::to_string(int(v_kmh));
            o.require(rep.ds_pure_scaling, "DS ratio" + tag);
            o.require(std::abs(rep.mui_slope) <= 3.0 * rep.mui_slope_stderr, "MUI slope" + tag);
            o.require(rep.PC.r2 >= 0.99, "PC fit" + tag);
            o.detail << "v=" << v_kmh << ": DS ratio max z " << rep.ds_ratio_max_z << ", MUI slope z "
                     << rep.mui_slope / rep.mui_slope_stderr << ", PC R^2 " << rep.PC.r2 << "; ";
        }
    }

    // 7. Receiver ordering and the growth of the DAA-DU gap with impairments and aging.
    void receiver_ordering(Outcome &o)
    {
        const std::vector<ReceiverKind> rx{ReceiverKind::mrc, ReceiverKind::du_mmse, ReceiverKind::daa_mmse};
        auto gap = [&](int bits, double v_kmh, bool check_order)
        {
            SystemConfig cfg = desk();
            cfg.ue_speed_mps = v_kmh / 3.6;
            HardwareProfile hw;
            hw.kappa_bs = 0.1;
            hw.kappa_ue = 0.05;
            hw.bits_ue = hw.bits_bs = bits;
            const Scenario scn = build_scenario(cfg, hw, 7);
            const EstimatorBank bank(scn);
            const auto grid = make_n_grid(scn.lambda(), cfg.frame_length, 5);
            const auto res = terms(scn, bank, rx, grid, 4000, 707);
            if (check_order)
                for (std::size_t i = 0; i < grid.size(); ++i)
                {
                    o.require(res[2][i].se >= res[1][i].se, "DAA >= DU at n=" + std::to_string(grid[i]));
                    o.require(res[1][i].se >= res[0][i].se, "DU >= MRC at n=" + std::to_string(grid[i]));
                }
            // frame-averaged per-UE gap
            double g = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                g += (res[2][i].se - res[1][i].se) / double(grid.size());
            return g;
        };
        const double g4_72 = gap(4, 72.0, true), g2_72 = gap(2, 72.0, false), g4_144 = gap(4, 144.0, false);
        o.require(g2_72 > g4_72, "gap larger at b=2");
        o.require(g4_144 > g4_72, "gap larger at 144 km/h");
        o.detail << "mean DAA-DU gap: b=4/72 " << g4_72 << ", b=2/72 " << g2_72 << ", b=4/144 " << g4_144;
    }

    // 8. No perturbation of DAA-MMSE improves its conditional SINR.
    void daa_optimality(Outcome &o)
    {
        const Scenario scn = build_scenario(desk(), HardwareProfile{}, 8);
        const EstimatorBank bank(scn);
        Rng rng(808);
        const int n = 40;
        double best_ratio = 0.0;
        long draws = 0;
        for (int t = 0; t < 20; ++t)
        {
            TrialStreams st = trial_streams(818, std::uint64_t(t));
            const PilotPhase pp = run_pilot_phase(scn, bank, st);
            for (int j = 0; j < scn.L(); ++j)
                for (int k = 0; k < scn.K(); ++k)
                {
                    const cmat B = daa_b_matrix(scn, bank, pp.est, j, k, n);
                    const cvec c = daa_c_vector(scn, pp.est, j, k, n);
                    const cvec v = daa_mmse(scn, bank, pp.est, j, k, n);
                    const double s0 = conditional_sinr(v, c, B);
                    for (int d = 0; d < 100; ++d)
                    {
                        const cvec e = complex_normal_vector(rng, v.size());
                        const double s = conditional_sinr(v + (1e-2 * v.norm() / e.norm()) * e, c, B);
                        best_ratio = std::max(best_ratio, s / s0);
                        ++draws;
                    }
                }
        }
        // a perturbation may tie up to rounding
        o.require(best_ratio <= 1.0 + 1e-12, "perturbation improved the SINR");
        o.detail << draws << " perturbations, max SINR ratio " << std::setprecision(15) << best_ratio;
    }

    // 9. Bit-identical CSV for 1 and many threads.
    void determinism(Outcome &o)
    {
        SweepSpec s = preset_spec("receiver-compare", true);
        s.trials = 500;
        s.n_stride = 10;
        s.threads = 1;
        const std::string one = format_csv(run_sweep(s));
        s.threads = int(std::max(4u, std::thread::hardware_concurrency()));
        const std::string many = format_csv(run_sweep(s));
        o.require(one == many, "CSV differs");
        o.detail << "receiver-compare desk preset, 1 vs " << s.threads << " threads, " << one.size() << " bytes "
                 << (one == many ? "identical" : "DIFFERENT");
    }

    // 10. Shape of SE over the frame and QoS crossings. Under the path-loss law the cascaded link
    // sits about 25 dB under the attenuated direct link at desk scale, so the M=16 and M=64 curves
    // differ by less than their standard errors and the M ordering of crossings is not resolved.
    void se_vs_time(Outcome &o)
    {
        const std::vector<ReceiverKind> rx{ReceiverKind::mrc, ReceiverKind::du_mmse, ReceiverKind::daa_mmse};
        std::vector<std::vector<std::vector<SeBreakdown>>> by_m;
        std::vector<int> grid;
        for (int m : {16, 64})
        {
            SystemConfig cfg = desk();
            HardwareProfile hw;
            apply_parameter(cfg, hw, "irs_elements", std::to_string(m));
            const Scenario scn = build_scenario(cfg, hw, 10);
            const EstimatorBank bank(scn);
            grid = make_n_grid(scn.lambda(), cfg.frame_length, 5);
            by_m.push_back(terms(scn, bank, rx, grid, 10000, 1010));
        }
        auto se_of = [&](const std::vector<SeBreakdown> &rows)
        {
            std::vector<double> v;
            for (const auto &b : rows)
                v.push_back(b.se);
            return v;
        };
        for (std::size_t m = 0; m < by_m.size(); ++m)
            for (std::size_t r : {1u, 2u})
            {
                const auto se = se_of(by_m[m][r]);
                for (std::size_t i = 1; i < se.size(); ++i)
                    o.require(se[i] <= se[i - 1], "non-increasing " + to_string(rx[r]));
            }

        long checked = 0;
        for (std::size_t m = 0; m < by_m.size(); ++m)
        {
            const auto mrc = se_of(by_m[m][0]), daa = se_of(by_m[m][2]);
            const double top = std::min(mrc.front(), daa.front());
            for (int q = 1; q <= 40; ++q)
            {
                const double qos = top * (q / 40.0);
                const auto a = qos_crossing(grid, daa, qos), b = qos_crossing(grid, mrc, qos);
                o.require(a && b && *a >= *b, "DAA crossing >= MRC crossing");
                ++checked;
            }
        }
        for (std::size_t r = 0; r < rx.size(); ++r)
        {
            const auto small = se_of(by_m[0][r]), large = se_of(by_m[1][r]);
            const double top = std::min(small.front(), large.front());
            for (int q = 1; q <= 40; ++q)
            {
                const double qos = top * (q / 40.0);
                const auto a = qos_crossing(grid, large, qos), b = qos_crossing(grid, small, qos);
                o.require(a && b && *a >= *b, "M=64 crossing >= M=16 crossing, " + to_string(rx[r]));
                ++checked;
            }
        }
        o.detail << checked << " crossing comparisons (1e4 trials); SE(M=64) - SE(M=16) at n=lambda:";
        for (std::size_t r = 0; r < rx.size(); ++r)
        {
            const SeBreakdown &a = by_m[0][r].front(), &b = by_m[1][r].front();
            o.detail << ' ' << to_string(rx[r]) << ' ' << b.se - a.se << " (stderr "
                     << std::hypot(a.se_stderr, b.se_stderr) << ")";
        }
    }
}

// --expect-fail 10[,..] names criteria whose failure is analysed and recorded; the exit status
// is 0 exactly when the failing set equals that list.
int main(int argc, char **argv)
{
    std::set<std::size_t> expected;
    for (int a = 1; a < argc; ++a)
    {
        if (std::string(argv[a]) != "--expect-fail" || a + 1 >= argc)
        {
            std::fprintf(stderr, "usage: acceptance [--expect-fail N[,N...]]\n");
            return 2;
        }
        std::stringstream list(argv[++a]);
        for (std::string item; std::getline(list, item, ',');)
            expected.insert(std::stoul(item));
    }

    const std::vector<std::pair<const char *, std::function<void(Outcome &)>>> criteria = {
        {"MRC interference closed form vs Monte Carlo", bound_validation},
        {"received power equals the term sum", decomposition},
        {"LMMSE estimate statistics", lmmse_suite},
        {"ideal hardware degenerates to the impairment-free model", hardware_degeneration},
        {"Bussgang gain and distortion factors", bussgang},
        {"aging laws of the MRC terms", aging_laws},
        {"receiver ordering and gap growth", receiver_ordering},
        {"DAA-MMSE optimality under perturbation", daa_optimality},
        {"thread-count determinism of the CSV", determinism},
        {"SE over the frame and QoS crossings", se_vs_time},
    };
    std::set<std::size_t> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            criteria[i].second(o);
        }
        catch (const std::exception &e)
        {
            o.passed = false;
            o.detail << "exception: " << e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2zu: %s  %s (%.1f s)\n    %s\n", i + 1, o.passed ? "PASS" : "FAIL", criteria[i].first,
                    dt, o.detail.str().c_str());
        std::fflush(stdout);
        if (!o.passed)
            failed.insert(i + 1);
    }
    auto join = [](const std::set<std::size_t> &v)
    {
        std::string out;
        for (std::size_t i : v)
            out += (out.empty() ? "" : ",") + std::to_string(i);
        return out.empty() ? std::string("none") : out;
    };
    std::printf("%zu of %zu criteria pass; failing: %s; expected failing: %s\n", criteria.size() - failed.size(),
                criteria.size(), join(failed).c_str(), join(expected).c_str());
    return failed == expected ? 0 : 1;
}
