// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dudoa/array.hpp"
#include "dudoa/common.hpp"
#include "dudoa/config.hpp"

namespace dudoa {

/// Uniform line array along the x axis, centered on the origin.
inline ArrayGeometry make_line_array(std::size_t n_mics = 7, double pitch_m = 0.04) {
    if (n_mics < 2) throw config_error("line array needs at least 2 mics");
    if (!(pitch_m > 0.0)) throw config_error("line array pitch must be positive");
    ArrayGeometry g;
    g.kind = GeometryKind::linear_azimuth_only;
    const double half = 0.5 * static_cast<double>(n_mics - 1) * pitch_m;
    for (std::size_t m = 0; m < n_mics; ++m)
        g.positions.push_back(
            {static_cast<double>(m) * pitch_m - half, 0.0, 0.0});
    return g;
}

/// n_mics spread over a sphere of the given radius by a Fibonacci lattice:
/// near-uniform coverage without magic coordinate tables.
inline ArrayGeometry make_fibonacci_sphere(std::size_t n_mics, double radius_m) {
    if (n_mics < 2) throw config_error("sphere array needs at least 2 mics");
    if (!(radius_m > 0.0)) throw config_error("sphere radius must be positive");
    ArrayGeometry g;
    g.kind = GeometryKind::full_sphere;
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n_mics; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) /
                                   static_cast<double>(n_mics);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double az = golden * static_cast<double>(i);
        g.positions.push_back(
            {radius_m * rho * std::cos(az), radius_m * rho * std::sin(az),
             radius_m * z});
    }
    return g;
}

/// 12-mic head-sized array (9 cm radius).
inline ArrayGeometry make_robot_head_array() { return make_fibonacci_sphere(12, 0.09); }

/// 32-mic compact spherical array (4.2 cm radius).
inline ArrayGeometry make_spherical_array() { return make_fibonacci_sphere(32, 0.042); }

/// The three shipped presets: per-array VAD threshold and grid, shared STFT
/// and tracker settings.
inline PipelineConfig preset_config(const std::string& name) {
    PipelineConfig cfg;
    if (name == "linear") {
        cfg.geometry = make_line_array();
        cfg.vad_threshold = 200.0;
        cfg.grid_resolution_deg = 1.0;
    } else if (name == "robot-head") {
        cfg.geometry = make_robot_head_array();
        cfg.vad_threshold = 50.0;
        cfg.grid_resolution_deg = 5.0;
    } else if (name == "spherical") {
        cfg.geometry = make_spherical_array();
        cfg.vad_threshold = 10.0;
        cfg.grid_resolution_deg = 5.0;
    } else {
        throw config_error("unknown preset \"" + name +
                           "\" (expected linear, robot-head, or spherical)");
    }
    return cfg;
}

} // namespace dudoa
