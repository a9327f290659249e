// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dudoa/common.hpp"
#include "dudoa/localizer.hpp"
#include "dudoa/vad.hpp"

namespace dudoa {

enum class TrackerMode {
    azimuth_only,      // linear arrays: 2-state filter [az, v_az]
    azimuth_elevation, // full sphere: 4-state filter [az, el, v_az, v_el]
};

inline std::string to_string(TrackerMode mode) {
    return mode == TrackerMode::azimuth_only ? "azimuth-only" : "azimuth-elevation";
}

inline TrackerMode tracker_mode_from_string(const std::string& name) {
    if (name == "azimuth-only") return TrackerMode::azimuth_only;
    if (name == "azimuth-elevation") return TrackerMode::azimuth_elevation;
    throw config_error("unknown tracker mode: " + name);
}

/// Constant-velocity filter parameters. sigma_q2 is the white acceleration
/// noise variance entering through the control matrix; sigma_r2 the
/// measurement noise variance on the angles.
struct TrackerConfig {
    double dt = 0.2667;      // seconds between blocks
    double sigma_q2 = 1e-3;
    double sigma_r2 = 1e-4;
    TrackerMode mode = TrackerMode::azimuth_elevation;

    // Number of tracked angle components.
    std::size_t n_angles() const {
        return mode == TrackerMode::azimuth_only ? 1u : 2u;
    }
    // State dimension (angles + angular velocities).
    std::size_t state_dim() const { return 2 * n_angles(); }

    void validate() const {
        if (!(dt > 0.0)) throw config_error("tracker dt must be positive");
        if (!(sigma_q2 > 0.0)) throw config_error("sigma_q2 must be positive");
        if (!(sigma_r2 > 0.0)) throw config_error("sigma_r2 must be positive");
    }
};

/// Filter state: y = [angles, angular velocities] in degrees and deg/s,
/// P the row-major state covariance.
struct TrackState {
    std::vector<double> y;
    std::vector<double> P;
    bool initialized = false;
    bool last_vad = false;

    std::size_t dim() const { return y.size(); }
};

enum class SmoothSource {
    corrected,      // VAD active, measurement folded in
    predicted_only, // coasting through silence
    none,           // tracker never initialized yet
};

inline std::string to_string(SmoothSource source) {
    switch (source) {
        case SmoothSource::corrected: return "corrected";
        case SmoothSource::predicted_only: return "predicted-only";
        default: return "none";
    }
}

inline SmoothSource smooth_source_from_string(const std::string& name) {
    if (name == "corrected") return SmoothSource::corrected;
    if (name == "predicted-only") return SmoothSource::predicted_only;
    if (name == "none") return SmoothSource::none;
    throw config_error("unknown smoothed-estimate source: " + name);
}

/// Per-block tracker output; direction is continuous, not grid-snapped.
struct SmoothedEstimate {
    std::size_t frame_index = 0;
    double time_s = 0.0;
    Direction direction;
    SmoothSource source = SmoothSource::none;
};

namespace detail {

// C = A * B for row-major n x n matrices.
inline std::vector<double> mat_mul(const std::vector<double>& a,
                                   const std::vector<double>& b, std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            for (std::size_t j = 0; j < n; ++j)
                c[i * n + j] += aik * b[k * n + j];
        }
    return c;
}

inline void mat_symmetrize(std::vector<double>& p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (p[i * n + j] + p[j * n + i]);
            p[i * n + j] = v;
            p[j * n + i] = v;
        }
}

// Transition matrix [[I, dt I], [0, I]] for p angle components.
inline std::vector<double> transition_matrix(const TrackerConfig& cfg) {
    const std::size_t p = cfg.n_angles();
    const std::size_t n = 2 * p;
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
    for (std::size_t i = 0; i < p; ++i) a[i * n + (i + p)] = cfg.dt;
    return a;
}

// Process noise covariance B Q B^T for B = [[dt^2/2 I], [dt I]], Q = sigma_q2 I.
inline std::vector<double> process_noise(const TrackerConfig& cfg) {
    const std::size_t p = cfg.n_angles();
    const std::size_t n = 2 * p;
    const double dt = cfg.dt;
    const double q = cfg.sigma_q2;
    std::vector<double> bqbt(n * n, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        bqbt[i * n + i] = 0.25 * dt * dt * dt * dt * q;
        bqbt[i * n + (i + p)] = 0.5 * dt * dt * dt * q;
        bqbt[(i + p) * n + i] = 0.5 * dt * dt * dt * q;
        bqbt[(i + p) * n + (i + p)] = dt * dt * q;
    }
    return bqbt;
}

// Keep the state angles inside their legal ranges. Azimuth follows the grid
// convention of the mode: full-circle wrap for azimuth-elevation, [0, 180]
// clamp for the linear azimuth-only grid. Elevation is clamped, never wrapped.
inline void normalize_state_angles(TrackState& state, const TrackerConfig& cfg) {
    if (cfg.mode == TrackerMode::azimuth_elevation) {
        state.y[0] = wrap_degrees(state.y[0]);
        state.y[1] = std::clamp(state.y[1], -90.0, 90.0);
    } else {
        state.y[0] = std::clamp(state.y[0], 0.0, 180.0);
    }
}

inline void require_dims(const TrackState& state, const TrackerConfig& cfg) {
    const std::size_t n = cfg.state_dim();
    if (state.y.size() != n || state.P.size() != n * n)
        throw state_error("track state dimension does not match tracker mode");
}

} // namespace detail

/// Start (or restart) the track at a VAD rising edge: angles from the
/// measurement, zero velocity, covariance = process noise of one step.
inline TrackState tracker_initialize(const DoaEstimate& measurement,
                                     const TrackerConfig& cfg) {
    cfg.validate();
    const std::size_t p = cfg.n_angles();
    TrackState state;
    state.y.assign(2 * p, 0.0);
    state.y[0] = measurement.direction.azimuth_deg;
    if (p == 2) state.y[1] = measurement.direction.elevation_deg;
    state.P = detail::process_noise(cfg);
    state.initialized = true;
    state.last_vad = true;
    detail::normalize_state_angles(state, cfg);
    return state;
}

/// Time update: y <- A y, P <- A P A^T + B Q B^T.
inline TrackState tracker_predict(const TrackState& state, const TrackerConfig& cfg) {
    cfg.validate();
    detail::require_dims(state, cfg);
    if (!state.initialized)
        throw state_error("predict called on an uninitialized tracker");
    const std::size_t p = cfg.n_angles();
    const std::size_t n = 2 * p;

    TrackState out = state;
    for (std::size_t i = 0; i < p; ++i)
        out.y[i] = state.y[i] + cfg.dt * state.y[i + p];

    const std::vector<double> a = detail::transition_matrix(cfg);
    std::vector<double> at(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) at[i * n + j] = a[j * n + i];
    out.P = detail::mat_mul(detail::mat_mul(a, state.P, n), at, n);
    const std::vector<double> bqbt = detail::process_noise(cfg);
    for (std::size_t i = 0; i < n * n; ++i) out.P[i] += bqbt[i];
    detail::mat_symmetrize(out.P, n);
    detail::normalize_state_angles(out, cfg);
    return out;
}

/// Measurement update with the standard gain K = P C^T (C P C^T + R)^{-1}.
/// The azimuth innovation is wrapped to (-180, 180] so seam crossings
/// correct the short way; elevation uses the plain difference.
inline TrackState tracker_correct(const TrackState& predicted,
                                  const DoaEstimate& measurement,
                                  const TrackerConfig& cfg) {
    cfg.validate();
    detail::require_dims(predicted, cfg);
    if (!predicted.initialized)
        throw state_error("correct called on an uninitialized tracker");
    const std::size_t p = cfg.n_angles();
    const std::size_t n = 2 * p;

    // Innovation covariance S = C P C^T + R is the angle block of P plus R.
    std::vector<double> s(p * p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            s[i * p + j] = predicted.P[i * n + j] + (i == j ? cfg.sigma_r2 : 0.0);

    std::vector<double> s_inv(p * p);
    if (p == 1) {
        if (!(std::abs(s[0]) > 0.0))
            throw state_error("singular innovation covariance");
        s_inv[0] = 1.0 / s[0];
    } else {
        const double det = s[0] * s[3] - s[1] * s[2];
        if (!(std::abs(det) > 0.0))
            throw state_error("singular innovation covariance");
        s_inv[0] = s[3] / det;
        s_inv[1] = -s[1] / det;
        s_inv[2] = -s[2] / det;
        s_inv[3] = s[0] / det;
    }

    // K = P C^T S^{-1}; P C^T is the first p columns of P.
    std::vector<double> k(n * p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t m = 0; m < p; ++m)
                k[i * p + j] += predicted.P[i * n + m] * s_inv[m * p + j];

    std::vector<double> innovation(p, 0.0);
    innovation[0] = wrap_degrees(measurement.direction.azimuth_deg - predicted.y[0]);
    if (p == 2)
        innovation[1] = measurement.direction.elevation_deg - predicted.y[1];

    TrackState out = predicted;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            out.y[i] += k[i * p + j] * innovation[j];

    // P <- (I - K C) P
    std::vector<double> ikc(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) ikc[i * n + i] = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) ikc[i * n + j] -= k[i * p + j];
    out.P = detail::mat_mul(ikc, predicted.P, n);
    detail::mat_symmetrize(out.P, n);
    detail::normalize_state_angles(out, cfg);
    return out;
}

/// One block of the VAD-gated tracker state machine:
///   - VAD rising edge (or first active block): (re-)initialize, emit corrected;
///   - VAD active on a running track: predict + correct, emit corrected;
///   - VAD inactive on a running track: coast, emit predicted-only;
///   - VAD inactive before any activity: emit none.
inline std::pair<TrackState, SmoothedEstimate>
tracker_step(const TrackState& state, const VadDecision& vad,
             const std::optional<DoaEstimate>& measurement, const TrackerConfig& cfg) {
    cfg.validate();
    const std::size_t p = cfg.n_angles();

    SmoothedEstimate smoothed;
    smoothed.frame_index = vad.frame_index;
    smoothed.time_s = measurement ? measurement->time_s
                                  : std::numeric_limits<double>::quiet_NaN();

    TrackState next = state;
    if (vad.active) {
        if (!measurement)
            throw state_error("active block requires a DOA measurement");
        const bool rising_edge = !state.initialized || !state.last_vad;
        if (rising_edge) {
            next = tracker_initialize(*measurement, cfg);
        } else {
            next = tracker_correct(tracker_predict(state, cfg), *measurement, cfg);
        }
        smoothed.source = SmoothSource::corrected;
    } else if (state.initialized) {
        next = tracker_predict(state, cfg);
        smoothed.source = SmoothSource::predicted_only;
    } else {
        smoothed.source = SmoothSource::none;
        smoothed.direction = {std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN()};
    }
    next.last_vad = vad.active;

    if (smoothed.source != SmoothSource::none) {
        smoothed.direction.azimuth_deg = next.y[0];
        smoothed.direction.elevation_deg = (p == 2) ? next.y[1] : 0.0;
    }
    return {std::move(next), smoothed};
}

} // namespace dudoa
