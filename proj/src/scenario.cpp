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

#include "irsmimo/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace irsmimo
{
    namespace
    {
        double wrap_angle(double a)
        {
            a = std::remainder(a, 2.0 * pi);
            return a <= -pi ? a + 2.0 * pi : a;
        }

        double wrap_coordinate(double x, double area)
        {
            double r = std::fmod(x, area);
            if (r < 0.0)
                r += area;
            return r >= area ? 0.0 : r;
        }

        // rows * cols == L with rows <= cols <= rows + 1
        bool grid_shape(int L, int &rows, int &cols)
        {
            rows = int(std::floor(std::sqrt(double(L))));
            for (int r = rows; r >= 1 && r >= rows - 1; --r)
                for (int c = r; c <= r + 1; ++c)
                    if (r * c == L)
                    {
                        rows = r;
                        cols = c;
                        return true;
                    }
            return false;
        }

        // Midpoint rule for E[f(x)], x ~ N(0, sigma^2), over +-8 sigma. f = exp(j k sin(.)) with
        // k <= omega has harmonics decaying past order omega; the step resolves 12 beyond it plus
        // the Gaussian bandwidth.
        void gaussian_midpoint(double sigma, double omega, int points, std::vector<double> &x,
                               std::vector<double> &w)
        {
            const double span = 16.0 * sigma;
            int n = points;
            if (n <= 0)
            {
                const double h = 2.0 * pi / (omega + 12.0 + 12.0 / sigma);
                n = std::max(16, int(std::ceil(span / h)));
            }
            x.resize(std::size_t(n));
            w.resize(std::size_t(n));
            double total = 0.0;
            for (int i = 0; i < n; ++i)
            {
                x[std::size_t(i)] = -0.5 * span + (i + 0.5) * span / n;
                w[std::size_t(i)] = std::exp(-0.5 * x[std::size_t(i)] * x[std::size_t(i)] / (sigma * sigma));
                total += w[std::size_t(i)];
            }
            for (double &v : w)
                v /= total;
        }
    }

    // ---------- SystemConfig ----------

    double SystemConfig::ue_speed(int cell, int user) const
    {
        if (!ue_speed_override_mps.empty())
            return ue_speed_override_mps.at(std::size_t(cell * users_per_cell + user));
        return ue_speed_mps;
    }

    double SystemConfig::doppler_hz(int cell, int user) const
    {
        return ue_speed(cell, user) * carrier_hz / speed_of_light;
    }

    void SystemConfig::validate() const
    {
        auto fail = [](const std::string &m)
        { throw ConfigError(m); };

        if (num_cells < 1)
            fail("num_cells must be at least 1");
        if (users_per_cell < 1)
            fail("users_per_cell must be at least 1");
        if (bs_array.horizontal < 1 || bs_array.vertical < 1)
            fail("BS array dimensions must be at least 1");
        if (irs_array.horizontal < 0 || irs_array.vertical < 0)
            fail("IRS array dimensions must be non-negative");
        if (pilot_length < 1 || pilot_length >= frame_length)
            fail("pilot_length must satisfy 1 <= tau_p < tau_c");
        if (users_per_cell > pilot_length)
            fail("time-orthogonal pilots need pilot_length >= users_per_cell");
        if (!(data_power_w > 0.0) || !(pilot_power_w > 0.0))
            fail("transmit powers must be strictly positive");
        if (!(noise_power_w > 0.0))
            fail("noise power must be strictly positive");
        if (!(carrier_hz > 0.0) || !(sample_period_s > 0.0))
            fail("carrier frequency and sample period must be strictly positive");
        if (ue_speed_mps < 0.0)
            fail("UE speed must be non-negative");
        if (!ue_speed_override_mps.empty())
        {
            if (ue_speed_override_mps.size() != std::size_t(num_users()))
                fail("per-UE speed list must have one entry per UE");
            for (double v : ue_speed_override_mps)
                if (v < 0.0)
                    fail("UE speed must be non-negative");
        }
        if (!(area_km > 0.0))
            fail("area must be strictly positive");
        if (irs.bs_link_rank < 1)
            fail("IRS-BS channel rank must be at least 1");
        if (!(propagation.asd_azimuth_deg > 0.0) || !(propagation.asd_elevation_deg > 0.0))
            fail("angular standard deviations must be strictly positive");
        if (!(propagation.bs_spacing > 0.0) || !(propagation.irs_spacing > 0.0))
            fail("array spacings must be strictly positive");
        if (propagation.ue_min_radius_km < 0.0 || propagation.ue_max_radius_km < propagation.ue_min_radius_km)
            fail("UE radius range is invalid");
    }

    // ---------- Geometry ----------

    Geometry build_geometry(const SystemConfig &cfg, std::uint64_t seed)
    {
        cfg.validate();
        int rows = 0, cols = 0;
        if (!grid_shape(cfg.num_cells, rows, cols))
            throw ConfigError("unsupported cell count: " + std::to_string(cfg.num_cells));

        Geometry g;
        g.area_km = cfg.area_km;
        g.users_per_cell = cfg.users_per_cell;
        g.seed = seed;

        const double area = cfg.area_km;
        const double irs_dir = cfg.irs.azimuth_deg * pi / 180.0;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
            {
                Point bs{(c + 0.5) * area / cols, (r + 0.5) * area / rows};
                g.bs_positions.push_back(bs);
                g.irs_positions.push_back({wrap_coordinate(bs.x + cfg.irs.distance_km * std::cos(irs_dir), area),
                                           wrap_coordinate(bs.y + cfg.irs.distance_km * std::sin(irs_dir), area)});
            }

        // UEs: uniform (in area) within the sector facing the IRS
        Rng rng(combine_seed(seed, 0x5eed0001));
        const auto &p = cfg.propagation;
        const double half = 0.5 * p.sector_deg * pi / 180.0;
        std::uniform_real_distribution<double> ang(-half, half);
        std::uniform_real_distribution<double> rad2(p.ue_min_radius_km * p.ue_min_radius_km,
                                                    p.ue_max_radius_km * p.ue_max_radius_km);
        for (int l = 0; l < cfg.num_cells; ++l)
            for (int k = 0; k < cfg.users_per_cell; ++k)
            {
                double phi = irs_dir + ang(rng);
                double r = std::sqrt(rad2(rng));
                const Point &bs = g.bs_positions[std::size_t(l)];
                g.ue_positions.push_back({wrap_coordinate(bs.x + r * std::cos(phi), area),
                                          wrap_coordinate(bs.y + r * std::sin(phi), area)});
            }
        return g;
    }

    Point wrap_displacement(const Point &a, const Point &b, double area_km)
    {
        auto axis = [area_km](double d)
        {
            d = std::fmod(d, area_km);
            if (d > 0.5 * area_km)
                d -= area_km;
            else if (d < -0.5 * area_km)
                d += area_km;
            return d;
        };
        return {axis(b.x - a.x), axis(b.y - a.y)};
    }

    double wrap_distance(const Point &a, const Point &b, double area_km)
    {
        Point d = wrap_displacement(a, b, area_km);
        return std::hypot(d.x, d.y);
    }

    // ---------- Array responses ----------

    cvec upa_steering_spatial(ArrayDims dims, double u, double w, double spacing)
    {
        cvec a(dims.count());
        const double c = 2.0 * pi * spacing;
        for (int v = 0; v < dims.vertical; ++v)
            for (int h = 0; h < dims.horizontal; ++h)
                a[v * dims.horizontal + h] = std::polar(1.0, c * (h * u + v * w));
        return a;
    }

    cvec upa_steering(ArrayDims dims, double azimuth, double elevation, double spacing)
    {
        return upa_steering_spatial(dims, std::sin(azimuth) * std::cos(elevation), std::sin(elevation), spacing);
    }

    cmat local_scattering_corr(ArrayDims dims, double azimuth, double elevation, double asd_azimuth,
                               double asd_elevation, double spacing, int quad_points)
    {
        if (!(asd_azimuth > 0.0) || !(asd_elevation > 0.0))
            throw std::invalid_argument("local_scattering_corr: angular standard deviations must be positive");
        if (dims.count() < 1)
            throw std::invalid_argument("local_scattering_corr: empty array");

        const int H = dims.horizontal, V = dims.vertical;
        const int nh = 2 * H - 1, nv = 2 * V - 1;
        const double c = 2.0 * pi * spacing;
        // largest derivative of the lag phase c (dh u + dv w) in either angle
        const double omega = c * double(H - 1 + V - 1);
        std::vector<double> xa, wa, xe, we;
        gaussian_midpoint(asd_azimuth, omega, quad_points, xa, wa);
        gaussian_midpoint(asd_elevation, omega, quad_points, xe, we);
        // r(dh, dv) = E[exp(j 2 pi s (dh u + dv w))], stored at (dh + H - 1, dv + V - 1)
        cmat lag = cmat::Zero(nh, nv);
        for (std::size_t ia = 0; ia < xa.size(); ++ia)
        {
            const double az = azimuth + xa[ia];
            for (std::size_t ie = 0; ie < xe.size(); ++ie)
            {
                const double el = elevation + xe[ie];
                const double weight = wa[ia] * we[ie];
                double u = std::sin(az) * std::cos(el), s = std::sin(el);
                cplx step_h = std::polar(1.0, c * u);
                cplx step_v = std::polar(1.0, c * s);
                // start at (dh, dv) = (-(H-1), -(V-1)) and walk forward
                cplx row = std::polar(weight, -c * ((H - 1) * u + (V - 1) * s));
                for (int iv = 0; iv < nv; ++iv)
                {
                    cplx val = row;
                    for (int ih = 0; ih < nh; ++ih)
                    {
                        lag(ih, iv) += val;
                        val *= step_h;
                    }
                    row *= step_v;
                }
            }
        }

        const int N = dims.count();
        cmat R(N, N);
        for (int v1 = 0; v1 < V; ++v1)
            for (int h1 = 0; h1 < H; ++h1)
                for (int v2 = 0; v2 < V; ++v2)
                    for (int h2 = 0; h2 < H; ++h2)
                        R(v1 * H + h1, v2 * H + h2) = lag(h1 - h2 + H - 1, v1 - v2 + V - 1);
        // exact unit diagonal and Hermitian symmetry
        for (int i = 0; i < N; ++i)
            R(i, i) = 1.0;
        return 0.5 * (R + R.adjoint());
    }

    // ---------- Large-scale fading ----------

    double path_loss_db(double distance_m, const PropagationParams &p)
    {
        return p.pathloss_intercept_db - 10.0 * p.pathloss_exponent * std::log10(distance_m);
    }

    double rician_factor(double distance_m, const PropagationParams &p)
    {
        if (distance_m >= p.rician_max_distance_m)
            return 0.0;
        return db_to_linear(p.rician_intercept_db - p.rician_slope_db_per_m * distance_m);
    }

    double bs_boresight(const SystemConfig &cfg)
    {
        return cfg.irs.azimuth_deg * pi / 180.0;
    }

    double irs_boresight(const SystemConfig &cfg)
    {
        return wrap_angle(bs_boresight(cfg) + pi);
    }

    LinkAngles link_angles(const Geometry &geom, const Point &site, double site_height, double boresight_azimuth,
                           const Point &other, double other_height)
    {
        Point d = geom.wrap ? wrap_displacement(site, other, geom.area_km) : Point{other.x - site.x, other.y - site.y};
        double horiz_m = 1000.0 * std::hypot(d.x, d.y);
        double dz = other_height - site_height;
        LinkAngles a;
        a.azimuth = horiz_m > 0.0 ? wrap_angle(std::atan2(d.y, d.x) - boresight_azimuth) : 0.0;
        a.elevation = std::atan2(dz, horiz_m);
        a.distance_m = std::hypot(horiz_m, dz);
        return a;
    }

    LinkStatistics build_link_statistics(const Geometry &geom, const SystemConfig &cfg, const LinkId &link)
    {
        const auto &p = cfg.propagation;
        const bool to_bs = link.kind == LinkKind::ue_to_bs;
        const auto &sites = to_bs ? geom.bs_positions : geom.irs_positions;
        if (link.cell < 0 || link.cell >= cfg.num_cells || link.user < 0 || link.user >= cfg.users_per_cell ||
            link.target < 0 || link.target >= int(sites.size()))
            throw std::out_of_range("build_link_statistics: invalid link id");

        const ArrayDims dims = to_bs ? cfg.bs_array : cfg.irs_array;
        const double spacing = to_bs ? p.bs_spacing : p.irs_spacing;
        const double height = to_bs ? p.bs_height_m : p.irs_height_m;
        const double boresight = to_bs ? bs_boresight(cfg) : irs_boresight(cfg);

        LinkAngles ang = link_angles(geom, sites[std::size_t(link.target)], height, boresight,
                                     geom.ue(link.cell, link.user), p.ue_height_m);
        if (!(ang.distance_m > 1e-9))
            throw ConfigError("degenerate geometry: zero link distance");

        double beta_db = path_loss_db(ang.distance_m, p);
        if (to_bs)
            beta_db -= cfg.direct_extra_loss_db;
        if (p.shadowing)
        {
            std::uint64_t key = std::uint64_t(link.kind) * 1000003ULL + std::uint64_t(link.cell) * 10007ULL +
                                std::uint64_t(link.user) * 101ULL + std::uint64_t(link.target);
            Rng rng(combine_seed(geom.seed ^ 0x5ad0ULL, key));
            std::normal_distribution<double> nd(0.0, p.shadowing_sigma_db);
            beta_db += nd(rng);
        }

        LinkStatistics s;
        s.beta = db_to_linear(beta_db);
        s.rician_k = rician_factor(ang.distance_m, p);
        s.distance_m = ang.distance_m;

        if (dims.count() == 0)
        {
            s.mean_los = cvec(0);
            s.corr = cmat(0, 0);
            return s;
        }
        const double kappa = s.rician_k;
        s.mean_los = std::sqrt(s.beta * kappa / (1.0 + kappa)) *
                     upa_steering(dims, ang.azimuth, ang.elevation, spacing);
        s.corr = (s.beta / (1.0 + kappa)) *
                 local_scattering_corr(dims, ang.azimuth, ang.elevation, p.asd_azimuth_deg * pi / 180.0,
                                       p.asd_elevation_deg * pi / 180.0, spacing);
        return s;
    }
}
