// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dudoa/array.hpp"
#include "dudoa/common.hpp"
#include "dudoa/stft.hpp"
#include "dudoa/wav.hpp"

namespace dudoa {

/// One ground-truth sample of the source direction.
struct TrajectoryKnot {
    double time_s = 0.0;
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

/// Piecewise-linear source trajectory. A single knot describes a static
/// source valid for all time.
struct Trajectory {
    std::vector<TrajectoryKnot> samples;

    static Trajectory constant(double azimuth_deg, double elevation_deg) {
        Trajectory t;
        t.samples.push_back({0.0, azimuth_deg, elevation_deg});
        return t;
    }

    void validate() const {
        if (samples.empty()) throw config_error("trajectory has no knots");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const TrajectoryKnot& k = samples[i];
            if (!std::isfinite(k.time_s) || !std::isfinite(k.azimuth_deg) ||
                !std::isfinite(k.elevation_deg))
                throw config_error("trajectory knot is not finite");
            if (k.azimuth_deg < -180.0 || k.azimuth_deg > 180.0)
                throw config_error("trajectory azimuth outside [-180, 180]");
            if (k.elevation_deg < -90.0 || k.elevation_deg > 90.0)
                throw config_error("trajectory elevation outside [-90, 90]");
            if (i > 0 && !(samples[i - 1].time_s < k.time_s))
                throw config_error("trajectory times must be strictly increasing");
        }
    }

    bool covers(double t0, double t1) const {
        if (samples.size() == 1) return true;
        return samples.front().time_s <= t0 && samples.back().time_s >= t1;
    }

    bool is_static() const {
        for (const TrajectoryKnot& k : samples)
            if (k.azimuth_deg != samples.front().azimuth_deg ||
                k.elevation_deg != samples.front().elevation_deg)
                return false;
        return true;
    }
};

namespace detail {

// Interpolation core without validation; assumes a valid trajectory.
inline Direction interpolate_direction(const Trajectory& trajectory, double time_s) {
    const std::vector<TrajectoryKnot>& k = trajectory.samples;
    if (k.size() == 1)
        return {k.front().azimuth_deg, k.front().elevation_deg};
    if (time_s < k.front().time_s || time_s > k.back().time_s)
        throw config_error("trajectory query outside the covered time span");

    auto it = std::upper_bound(k.begin(), k.end(), time_s,
                               [](double t, const TrajectoryKnot& knot) {
                                   return t < knot.time_s;
                               });
    if (it == k.begin()) return {k.front().azimuth_deg, k.front().elevation_deg};
    if (it == k.end()) return {k.back().azimuth_deg, k.back().elevation_deg};
    const TrajectoryKnot& a = *(it - 1);
    const TrajectoryKnot& b = *it;
    const double u = (time_s - a.time_s) / (b.time_s - a.time_s);
    const double daz = wrap_degrees(b.azimuth_deg - a.azimuth_deg);
    Direction dir;
    dir.azimuth_deg = wrap_degrees(a.azimuth_deg + u * daz);
    dir.elevation_deg = a.elevation_deg + u * (b.elevation_deg - a.elevation_deg);
    return dir;
}

} // namespace detail

/// Interpolated truth direction at a time inside the trajectory span.
/// Azimuth follows the shorter arc across the +-180 degree seam.
inline Direction ground_truth_at(const Trajectory& trajectory, double time_s) {
    trajectory.validate();
    return detail::interpolate_direction(trajectory, time_s);
}

enum class SourceKind { white_noise, speech_like, file };

inline std::string to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::white_noise: return "white-noise";
        case SourceKind::speech_like: return "speech-like";
        default: return "file";
    }
}

inline SourceKind source_kind_from_string(const std::string& name) {
    if (name == "white-noise") return SourceKind::white_noise;
    if (name == "speech-like") return SourceKind::speech_like;
    if (name == "file") return SourceKind::file;
    throw config_error("unknown source kind: " + name);
}

/// Span of scene time during which the source emits; outside all segments
/// the source is muted (noise still runs for the whole scene).
struct ActiveSegment {
    double start_s = 0.0;
    double stop_s = 0.0;
};

/// Everything needed to synthesize one deterministic scene.
struct SceneSpec {
    ArrayGeometry geometry;
    Trajectory trajectory;
    SourceKind source = SourceKind::white_noise;
    std::string source_path; // only for SourceKind::file
    double snr_db = std::numeric_limits<double>::infinity();
    double duration_s = 0.0;
    double sample_rate_hz = 48000.0;
    std::uint64_t seed = 0;
    double source_gain = 1.0;
    std::vector<ActiveSegment> active_segments; // empty = active throughout

    void validate() const {
        geometry.validate();
        trajectory.validate();
        if (!(duration_s > 0.0)) throw config_error("scene duration must be positive");
        if (!(sample_rate_hz > 0.0)) throw config_error("sample rate must be positive");
        if (!trajectory.covers(0.0, duration_s))
            throw config_error("trajectory does not cover the scene duration");
        if (std::isnan(snr_db)) throw config_error("snr_db must not be NaN");
        if (!(source_gain >= 0.0)) throw config_error("source gain must be >= 0");
        if (source == SourceKind::file && source_path.empty())
            throw config_error("file source requires a source path");
        for (const ActiveSegment& seg : active_segments)
            if (!(seg.start_s < seg.stop_s))
                throw config_error("active segment must have start < stop");
    }
};

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent, reproducible substream for (seed, stream id).
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0xd1342543de82ef95ULL * (stream + 1));
    const std::uint64_t a = splitmix64_next(s);
    const std::uint64_t b = splitmix64_next(s);
    return std::mt19937_64(a ^ (b << 1));
}

// Box-Muller standard normal; fixed arithmetic so streams are identical
// across standard library implementations.
inline double gaussian(std::mt19937_64& rng) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

inline constexpr int kDelayHalfTaps = 31; // 63-tap windowed sinc

// Blackman window on [-31, 31], zero outside; exact zeros at the ends.
inline double delay_window(double x) {
    if (x < -kDelayHalfTaps || x > kDelayHalfTaps) return 0.0;
    return 0.42 + 0.5 * std::cos(pi * x / kDelayHalfTaps) +
           0.08 * std::cos(2.0 * pi * x / kDelayHalfTaps);
}

// Taps for reading s(n - frac) from integer samples: out[t] pairs with
// s[n - (t - 31)], frac in [-1/2, 1/2] so that sin(pi frac) and the edge-tap
// denominators stay far from cancellation. frac = 0 degenerates to the
// identity. The window terms use cos(a - b) expansions against fixed per-tap
// tables so a full tap set costs five transcendentals, not two per tap; the
// moving-source path evaluates this per output sample.
inline void fractional_delay_taps(double frac, std::array<double, 63>& out) {
    if (frac == 0.0) {
        out.fill(0.0);
        out[kDelayHalfTaps] = 1.0;
        return;
    }
    struct TapTables {
        std::array<double, 63> c1, s1, c2, s2;
        TapTables() {
            for (int t = 0; t < 63; ++t) {
                const double a = pi * (t - kDelayHalfTaps) / kDelayHalfTaps;
                c1[static_cast<std::size_t>(t)] = std::cos(a);
                s1[static_cast<std::size_t>(t)] = std::sin(a);
                c2[static_cast<std::size_t>(t)] = std::cos(2.0 * a);
                s2[static_cast<std::size_t>(t)] = std::sin(2.0 * a);
            }
        }
    };
    static const TapTables tab;

    const double sin_pf = std::sin(pi * frac);
    const double b = pi * frac / kDelayHalfTaps;
    const double cb1 = std::cos(b), sb1 = std::sin(b);
    const double cb2 = std::cos(2.0 * b), sb2 = std::sin(2.0 * b);
    for (int t = 0; t < 63; ++t) {
        const int k = t - kDelayHalfTaps;
        const double x = static_cast<double>(k) - frac;
        if (x < -kDelayHalfTaps || x > kDelayHalfTaps) { // an edge tap leaves the window support
            out[static_cast<std::size_t>(t)] = 0.0;
            continue;
        }
        // sin(pi (k - frac)) = -(-1)^k sin(pi frac)
        const double sinc = ((k & 1) ? sin_pf : -sin_pf) / (pi * x);
        const std::size_t u = static_cast<std::size_t>(t);
        const double w = 0.42 + 0.5 * (tab.c1[u] * cb1 + tab.s1[u] * sb1) +
                         0.08 * (tab.c2[u] * cb2 + tab.s2[u] * sb2);
        out[u] = sinc * w;
    }
}

// Dot product of a tap set against s around integer position `base`;
// out-of-range samples read as zero.
inline double convolve_taps(const std::vector<double>& s, long base,
                            const std::array<double, 63>& taps) {
    const long n = static_cast<long>(s.size());
    double acc = 0.0;
    for (int t = 0; t < 63; ++t) {
        const long j = base + kDelayHalfTaps - static_cast<long>(t);
        if (j >= 0 && j < n) acc += taps[static_cast<std::size_t>(t)] * s[static_cast<std::size_t>(j)];
    }
    return acc;
}

// s(pos) from integer samples of s. The tap set interpolates s(n - frac)
// around an integer n; anchoring at the nearest integer keeps frac in
// [-1/2, 1/2], where the sinc evaluation is well conditioned.
inline double sample_delayed(const std::vector<double>& s, double pos) {
    const double n0 = std::round(pos);
    std::array<double, 63> taps;
    fractional_delay_taps(n0 - pos, taps);
    return convolve_taps(s, static_cast<long>(n0), taps);
}

} // namespace detail

/// Render the far-field scene: plane-wave channel delays by windowed-sinc
/// fractional interpolation plus per-channel calibrated white noise.
/// Bit-identical output for identical specs.
inline std::pair<MultichannelBuffer, Trajectory> synthesize(const SceneSpec& spec) {
    spec.validate();
    const double fs = spec.sample_rate_hz;
    const std::size_t n_samples =
        static_cast<std::size_t>(std::llround(spec.duration_s * fs));
    const std::size_t n_mics = spec.geometry.positions.size();
    if (n_samples == 0) throw config_error("scene is shorter than one sample");

    // --- source signal on [0, duration) ---
    std::vector<double> src(n_samples, 0.0);
    std::mt19937_64 source_rng = detail::substream(spec.seed, 0);
    switch (spec.source) {
        case SourceKind::white_noise:
            for (std::size_t n = 0; n < n_samples; ++n)
                src[n] = spec.source_gain * detail::gaussian(source_rng);
            break;
        case SourceKind::speech_like: {
            // AR(2) resonator at 500 Hz, pole radius 0.97, with 10 Hz on/off
            // amplitude gating for speech-like temporal structure.
            const double r = 0.97;
            const double w0 = 2.0 * pi * 500.0 / fs;
            const double a1 = 2.0 * r * std::cos(w0);
            const double a2 = -r * r;
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t n = 0; n < n_samples; ++n) {
                const double x = detail::gaussian(source_rng);
                const double s0 = x + a1 * s1 + a2 * s2;
                s2 = s1;
                s1 = s0;
                const double t = static_cast<double>(n) / fs;
                const bool on = std::fmod(t, 0.1) < 0.05;
                src[n] = spec.source_gain * (on ? s0 : 0.0);
            }
            break;
        }
        case SourceKind::file: {
            const MultichannelBuffer in = read_wav(spec.source_path);
            if (in.sample_rate_hz != fs)
                throw config_error("source file sample rate does not match the scene");
            const std::vector<float>& mono = in.channels.front();
            const std::size_t n = std::min(n_samples, mono.size());
            for (std::size_t i = 0; i < n; ++i)
                src[i] = spec.source_gain * static_cast<double>(mono[i]);
            break;
        }
    }
    if (!spec.active_segments.empty()) {
        for (std::size_t n = 0; n < n_samples; ++n) {
            const double t = static_cast<double>(n) / fs;
            bool on = false;
            for (const ActiveSegment& seg : spec.active_segments)
                on = on || (t >= seg.start_s && t < seg.stop_s);
            if (!on) src[n] = 0.0;
        }
    }

    // Sample indices over which signal power is measured for SNR calibration:
    // the active span only, so pauses do not deflate the reference power.
    std::vector<char> measured(n_samples, 1);
    if (!spec.active_segments.empty()) {
        std::fill(measured.begin(), measured.end(), 0);
        for (std::size_t n = 0; n < n_samples; ++n) {
            const double t = static_cast<double>(n) / fs;
            for (const ActiveSegment& seg : spec.active_segments)
                if (t >= seg.start_s && t < seg.stop_s) measured[n] = 1;
        }
    }

    // --- per-channel delayed copies ---
    MultichannelBuffer buf;
    buf.sample_rate_hz = fs;
    buf.channels.assign(n_mics, {});

    const bool is_static = spec.trajectory.is_static();
    const bool linear = spec.geometry.kind == GeometryKind::linear_azimuth_only;
    // Per-sample direction factors shared by all channels: for linear arrays
    // only cos(azimuth) matters (the propagation_delays model), otherwise the
    // full unit vector.
    std::vector<double> ux, uy, uz;
    if (!is_static) {
        ux.resize(n_samples);
        if (!linear) {
            uy.resize(n_samples);
            uz.resize(n_samples);
        }
        for (std::size_t n = 0; n < n_samples; ++n) {
            const double t = static_cast<double>(n) / fs;
            const Direction dir = detail::interpolate_direction(spec.trajectory, t);
            if (linear) {
                ux[n] = std::cos(deg2rad(dir.azimuth_deg));
            } else {
                const std::array<double, 3> u = direction_unit_vector(dir);
                ux[n] = u[0];
                uy[n] = u[1];
                uz[n] = u[2];
            }
        }
    }
    const std::vector<double> axis =
        linear ? spec.geometry.axis_coordinates() : std::vector<double>{};
    const double c = spec.geometry.speed_of_sound;

    std::vector<double> clean(n_samples);
    for (std::size_t m = 0; m < n_mics; ++m) {
        if (is_static) {
            // Constant delay: one tap set serves the whole channel. The taps
            // interpolate s(k - frac) around integer k, so anchor at
            // round(shift) to realize s(n + shift) with a well-conditioned frac.
            const Direction dir = ground_truth_at(spec.trajectory, 0.0);
            const double shift = -propagation_delays(spec.geometry, dir)[m] * fs;
            const double n0 = std::round(shift);
            std::array<double, 63> taps;
            detail::fractional_delay_taps(n0 - shift, taps);
            const long off = static_cast<long>(n0);
            for (std::size_t n = 0; n < n_samples; ++n)
                clean[n] = detail::convolve_taps(src, static_cast<long>(n) + off, taps);
        } else {
            const std::array<double, 3>& p = spec.geometry.positions[m];
            for (std::size_t n = 0; n < n_samples; ++n) {
                // Same far-field delay model as propagation_delays().
                const double tau =
                    linear ? -axis[m] * ux[n] / c
                           : -(p[0] * ux[n] + p[1] * uy[n] + p[2] * uz[n]) / c;
                clean[n] = detail::sample_delayed(src, static_cast<double>(n) - tau * fs);
            }
        }

        std::vector<float>& out = buf.channels[m];
        out.resize(n_samples);
        if (std::isinf(spec.snr_db)) {
            for (std::size_t n = 0; n < n_samples; ++n)
                out[n] = static_cast<float>(clean[n]);
            continue;
        }
        double power = 0.0;
        std::size_t count = 0;
        for (std::size_t n = 0; n < n_samples; ++n) {
            if (!measured[n]) continue;
            power += clean[n] * clean[n];
            ++count;
        }
        power = count ? power / static_cast<double>(count) : 0.0;
        const double sigma = std::sqrt(power * std::pow(10.0, -spec.snr_db / 10.0));
        std::mt19937_64 noise_rng = detail::substream(spec.seed, 1 + m);
        for (std::size_t n = 0; n < n_samples; ++n)
            out[n] = static_cast<float>(clean[n] + sigma * detail::gaussian(noise_rng));
    }
    return {std::move(buf), spec.trajectory};
}

} // namespace dudoa
