// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dudoa/common.hpp"
#include "dudoa/kalman.hpp"
#include "dudoa/scene.hpp"

namespace dudoa {

enum class ScoringMode {
    active_only, // score blocks with source = corrected
    all_emitted, // score corrected and predicted-only blocks
};

inline std::string to_string(ScoringMode mode) {
    return mode == ScoringMode::active_only ? "active-only" : "all-emitted";
}

/// RMSE summary over one estimate stream. Elevation is absent for
/// azimuth-only runs.
struct ScoreReport {
    double rmse_azimuth_deg = 0.0;
    std::optional<double> rmse_elevation_deg;
    std::size_t n_scored_blocks = 0;
    std::size_t n_skipped_blocks = 0;
};

/// Per-block scoring detail, for the optional errors CSV.
struct BlockError {
    std::size_t frame_index = 0;
    double time_s = 0.0;
    bool scored = false;
    double azimuth_error_deg = 0.0;
    double elevation_error_deg = 0.0;
};

/// Absolute angular difference; circular angles measure along the circle
/// (seam-aware), elevations as a plain difference.
inline double angular_error(double estimate_deg, double truth_deg, bool circular) {
    if (!std::isfinite(estimate_deg) || !std::isfinite(truth_deg))
        throw config_error("angular_error requires finite angles");
    if (circular) return std::abs(wrap_degrees(estimate_deg - truth_deg));
    return std::abs(estimate_deg - truth_deg);
}

/// Score an estimate stream against ground truth sampled at each block's
/// timestamp. Blocks outside the scoring mode's selection are skipped;
/// zero scorable blocks is an error.
inline ScoreReport rmse(std::span<const SmoothedEstimate> estimates,
                        const Trajectory& truth, ScoringMode scoring,
                        bool include_elevation,
                        std::vector<BlockError>* details = nullptr) {
    truth.validate();
    if (details) details->clear();

    double sum_az = 0.0, sum_el = 0.0;
    std::size_t scored = 0, skipped = 0;
    for (const SmoothedEstimate& est : estimates) {
        const bool in_scope =
            scoring == ScoringMode::active_only
                ? est.source == SmoothSource::corrected
                : est.source != SmoothSource::none;
        BlockError detail;
        detail.frame_index = est.frame_index;
        detail.time_s = est.time_s;
        if (!in_scope) {
            ++skipped;
            if (details) details->push_back(detail);
            continue;
        }
        const Direction gt = ground_truth_at(truth, est.time_s);
        const double az_err =
            angular_error(est.direction.azimuth_deg, gt.azimuth_deg, true);
        const double el_err =
            include_elevation
                ? angular_error(est.direction.elevation_deg, gt.elevation_deg, false)
                : 0.0;
        sum_az += az_err * az_err;
        sum_el += el_err * el_err;
        ++scored;
        detail.scored = true;
        detail.azimuth_error_deg = az_err;
        detail.elevation_error_deg = el_err;
        if (details) details->push_back(detail);
    }
    if (scored == 0)
        throw state_error("no scorable blocks in the estimate stream");

    ScoreReport report;
    report.rmse_azimuth_deg = std::sqrt(sum_az / static_cast<double>(scored));
    if (include_elevation)
        report.rmse_elevation_deg = std::sqrt(sum_el / static_cast<double>(scored));
    report.n_scored_blocks = scored;
    report.n_skipped_blocks = skipped;
    return report;
}

} // namespace dudoa
