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
    /// Uniform planar array size: `horizontal` elements per row, `vertical` rows.
    struct ArrayDims
    {
        int horizontal = 1;
        int vertical = 1;

        int count() const { return horizontal * vertical; }
        bool operator==(const ArrayDims &) const = default;
    };

    enum class PhaseMode
    {
        random,    // phases drawn once per experiment, uniform in [0, 2pi)
        zero,      // all phases zero (identity reflection)
        los_align, // co-phase the cascaded LoS of each cell's strongest UE
    };

    /// Large-scale propagation and array knobs.
    struct PropagationParams
    {
        double pathloss_intercept_db = -35.3; // beta_dB = intercept - 10 * exponent * log10(d_m)
        double pathloss_exponent = 3.76;
        bool shadowing = false;
        double shadowing_sigma_db = 8.0;

        double rician_intercept_db = 13.0; // kappa_dB = intercept - slope * d_m below max distance
        double rician_slope_db_per_m = 0.03;
        double rician_max_distance_m = 300.0;

        double bs_spacing = 0.5;  // in wavelengths
        double irs_spacing = 0.25;
        double asd_azimuth_deg = 15.0;
        double asd_elevation_deg = 15.0;

        double bs_height_m = 25.0;
        double irs_height_m = 15.0;
        double ue_height_m = 1.5;

        double ue_min_radius_km = 0.01;
        double ue_max_radius_km = 0.125;
        double sector_deg = 90.0;
    };

    struct IrsParams
    {
        double distance_km = 0.125; // IRS offset from its BS
        double azimuth_deg = 45.0;  // direction of the IRS seen from its BS
        int bs_link_rank = 8;       // rank of the IRS-BS LoS channel
        PhaseMode phase_mode = PhaseMode::random;
    };

    /// Cell/antenna/element counts, frame lengths and powers of one experiment.
    struct SystemConfig
    {
        int num_cells = 4;
        int users_per_cell = 5;
        ArrayDims bs_array{8, 8};
        ArrayDims irs_array{10, 10};

        int frame_length = 500; // tau_c
        int pilot_length = 5;   // tau_p

        double data_power_w = 0.1;  // 20 dBm
        double pilot_power_w = 0.1; // 20 dBm
        double noise_power_w = 1e-20;

        double carrier_hz = 2e9;
        double sample_period_s = 5e-6;
        double ue_speed_mps = 20.0;                // 72 km/h
        std::vector<double> ue_speed_override_mps; // optional, one entry per UE (l * K + k)

        double area_km = 0.5;
        double direct_extra_loss_db = 70.0;

        PropagationParams propagation;
        IrsParams irs;

        int num_antennas() const { return bs_array.count(); }
        int num_elements() const { return irs_array.count(); }
        int num_users() const { return num_cells * users_per_cell; }
        int estimation_instant() const { return pilot_length + 1; }
        double ue_speed(int cell, int user) const;
        double doppler_hz(int cell, int user) const;

        /// Throws ConfigError when an invariant is violated.
        void validate() const;
    };

    struct Point
    {
        double x = 0.0;
        double y = 0.0;
    };

    struct Geometry
    {
        std::vector<Point> bs_positions;
        std::vector<Point> irs_positions;
        std::vector<Point> ue_positions; // index l * K + k
        double area_km = 0.5;
        bool wrap = true;
        int users_per_cell = 0;
        std::uint64_t seed = 0;

        const Point &ue(int cell, int user) const { return ue_positions[std::size_t(cell * users_per_cell + user)]; }
    };

    enum class LinkKind
    {
        ue_to_bs,
        ue_to_irs,
    };

    struct LinkId
    {
        LinkKind kind = LinkKind::ue_to_bs;
        int cell = 0;   // UE cell l
        int user = 0;   // UE index k
        int target = 0; // BS j or IRS i
    };

    /// Rician description of one link: t = mean_los * exp(j phi) + corr^(1/2) w.
    struct LinkStatistics
    {
        cvec mean_los;
        cmat corr;
        double rician_k = 0.0;
        double beta = 0.0;
        double distance_m = 0.0;

        Eigen::Index dimension() const { return mean_los.size(); }
    };

    /// Arrival/departure angles of a line between two array sites.
    struct LinkAngles
    {
        double azimuth = 0.0;   // relative to the array boresight
        double elevation = 0.0; // positive above the array plane
        double distance_m = 0.0;
    };

    /// Places BSs on a square-ish grid of cells, one IRS per cell, and K UEs per cell in a sector.
    Geometry build_geometry(const SystemConfig &cfg, std::uint64_t seed);

    /// Euclidean distance on the torus of side area_km.
    double wrap_distance(const Point &a, const Point &b, double area_km);

    /// Minimum-image displacement b - a on the torus.
    Point wrap_displacement(const Point &a, const Point &b, double area_km);

    /// UPA response, entry (h + H v) = exp(j 2 pi s (h sin(az) cos(el) + v sin(el))).
    cvec upa_steering(ArrayDims dims, double azimuth, double elevation, double spacing);

    /// UPA response written in spatial frequencies u = sin(az) cos(el), w = sin(el).
    cvec upa_steering_spatial(ArrayDims dims, double u, double w, double spacing);

    /// Spatial correlation E[a a^H] of the UPA under Gaussian angular perturbations
    /// around the nominal angles (3D local scattering), by a midpoint rule over +-8 sigma
    /// per angle. `quad_points` = 0 sizes the rule from the spread and the aperture.
    cmat local_scattering_corr(ArrayDims dims, double azimuth, double elevation, double asd_azimuth,
                               double asd_elevation, double spacing, int quad_points = 0);

    /// beta in dB (without extra attenuation or shadowing).
    double path_loss_db(double distance_m, const PropagationParams &p);

    /// Rician factor (linear) of a link of the given length.
    double rician_factor(double distance_m, const PropagationParams &p);

    /// Angles of the line from `site` (an array at `site_height`, boresight
    /// `boresight_azimuth`) towards `other`.
    LinkAngles link_angles(const Geometry &geom, const Point &site, double site_height, double boresight_azimuth,
                           const Point &other, double other_height);

    double bs_boresight(const SystemConfig &cfg);
    double irs_boresight(const SystemConfig &cfg);

    LinkStatistics build_link_statistics(const Geometry &geom, const SystemConfig &cfg, const LinkId &link);
}
