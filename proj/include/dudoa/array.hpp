// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dudoa/common.hpp"

namespace dudoa {

enum class GeometryKind { linear_azimuth_only, full_sphere };

inline std::string to_string(GeometryKind k) {
    return k == GeometryKind::linear_azimuth_only ? "linear-azimuth-only" : "full-sphere";
}

inline GeometryKind geometry_kind_from_string(const std::string& s) {
    if (s == "linear-azimuth-only") return GeometryKind::linear_azimuth_only;
    if (s == "full-sphere") return GeometryKind::full_sphere;
    throw config_error("unknown geometry kind: " + s);
}

/// Microphone positions (meters, array-local frame) plus propagation speed.
/// Linear kind evaluates delays along the array's principal axis and
/// restricts the search to the [0, 180] azimuth half-plane.
struct ArrayGeometry {
    std::vector<std::array<double, 3>> positions;
    double speed_of_sound = 343.0;
    GeometryKind kind = GeometryKind::full_sphere;

    std::size_t size() const { return positions.size(); }

    void validate() const {
        if (positions.size() < 2)
            throw config_error("array geometry needs at least 2 microphones");
        if (!(speed_of_sound > 0.0))
            throw config_error("speed_of_sound must be positive");
        bool distinct = false;
        for (const auto& p : positions) {
            for (double c : p)
                if (!std::isfinite(c))
                    throw config_error("microphone position is not finite");
            if (p != positions.front()) distinct = true;
        }
        if (!distinct)
            throw config_error("all microphone positions coincide");
    }

    /// Scalar coordinate of each microphone along the fitted array axis.
    /// Used by the linear kind; positions off the line are projected onto it.
    std::vector<double> axis_coordinates() const {
        validate();
        // Axis from the first mic towards the one farthest from it.
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t i = 1; i < positions.size(); ++i) {
            double dx = positions[i][0] - positions[0][0];
            double dy = positions[i][1] - positions[0][1];
            double dz = positions[i][2] - positions[0][2];
            double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 > best) { best = d2; far = i; }
        }
        std::array<double, 3> axis{positions[far][0] - positions[0][0],
                                   positions[far][1] - positions[0][1],
                                   positions[far][2] - positions[0][2]};
        double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
        std::vector<double> coords(positions.size());
        for (std::size_t m = 0; m < positions.size(); ++m)
            coords[m] = (positions[m][0] * axis[0] + positions[m][1] * axis[1] +
                         positions[m][2] * axis[2]) / norm;
        return coords;
    }
};

/// Azimuth measured from +x counterclockwise, elevation from the xy-plane.
/// Linear mode reads azimuth from the array axis, so broadside is 90 degrees
/// and elevation is fixed at 0.
struct Direction {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;

    friend bool operator==(const Direction&, const Direction&) = default;
};

/// Unit vector pointing from the array towards the source.
inline std::array<double, 3> direction_unit_vector(const Direction& d) {
    const double az = deg2rad(d.azimuth_deg);
    const double el = deg2rad(d.elevation_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

/// Ordered candidate directions, elevation-major then azimuth ascending.
struct DirectionGrid {
    std::vector<Direction> directions;
    double resolution_deg = 0.0;
    GeometryKind kind = GeometryKind::full_sphere;

    std::size_t size() const { return directions.size(); }
    const Direction& operator[](std::size_t i) const { return directions[i]; }
};

namespace detail {
inline int exact_steps(double span_deg, double resolution_deg, const char* what) {
    if (!(resolution_deg > 0.0))
        throw config_error("grid resolution must be positive");
    const double steps = span_deg / resolution_deg;
    const int n = static_cast<int>(std::lround(steps));
    if (n < 1 || std::abs(steps - n) > 1e-9)
        throw config_error(std::string("grid resolution does not divide the ") + what +
                           " span evenly");
    return n;
}
} // namespace detail

/// Enumerate the search grid.
/// Linear: azimuth 0..180 inclusive. Sphere: elevation -90..90 inclusive by
/// azimuth -180..180 inclusive; the duplicated seam column keeps the paper's
/// direction count (5 degrees -> 2701) and is harmless under lowest-index
/// argmax tie-breaking.
inline DirectionGrid build_grid(GeometryKind kind, double resolution_deg) {
    DirectionGrid grid;
    grid.resolution_deg = resolution_deg;
    grid.kind = kind;
    if (kind == GeometryKind::linear_azimuth_only) {
        const int n = detail::exact_steps(180.0, resolution_deg, "azimuth");
        grid.directions.reserve(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i)
            grid.directions.push_back({i * resolution_deg, 0.0});
    } else {
        const int ne = detail::exact_steps(180.0, resolution_deg, "elevation");
        const int na = detail::exact_steps(360.0, resolution_deg, "azimuth");
        grid.directions.reserve(static_cast<std::size_t>(ne + 1) * (na + 1));
        for (int e = 0; e <= ne; ++e) {
            const double el = -90.0 + e * resolution_deg;
            for (int a = 0; a <= na; ++a)
                grid.directions.push_back({-180.0 + a * resolution_deg, el});
        }
    }
    return grid;
}

/// Far-field plane-wave arrival delays relative to the array-local origin,
/// one per microphone, in seconds. Microphones closer to the source hear the
/// wave earlier (negative delay in the propagation direction).
inline std::vector<double> propagation_delays(const ArrayGeometry& geometry,
                                              const Direction& direction) {
    geometry.validate();
    std::vector<double> delays(geometry.size());
    if (geometry.kind == GeometryKind::linear_azimuth_only) {
        const std::vector<double> x = geometry.axis_coordinates();
        const double proj = std::cos(deg2rad(direction.azimuth_deg));
        for (std::size_t m = 0; m < x.size(); ++m)
            delays[m] = -(x[m] * proj) / geometry.speed_of_sound;
    } else {
        const std::array<double, 3> u = direction_unit_vector(direction);
        for (std::size_t m = 0; m < geometry.size(); ++m) {
            const auto& p = geometry.positions[m];
            delays[m] = -(p[0] * u[0] + p[1] * u[1] + p[2] * u[2]) / geometry.speed_of_sound;
        }
    }
    return delays;
}

/// Per-frequency complex weights a_m = exp(-j 2 pi f tau_m), unit modulus.
struct SteeringVector {
    std::vector<std::complex<double>> entries;

    std::size_t size() const { return entries.size(); }
    const std::complex<double>& operator[](std::size_t m) const { return entries[m]; }
};

inline SteeringVector steering_vector(const ArrayGeometry& geometry, double freq_hz,
                                      const Direction& direction) {
    const std::vector<double> delays = propagation_delays(geometry, direction);
    SteeringVector sv;
    sv.entries.resize(delays.size());
    for (std::size_t m = 0; m < delays.size(); ++m) {
        const double phase = -2.0 * pi * freq_hz * delays[m];
        sv.entries[m] = {std::cos(phase), std::sin(phase)};
    }
    return sv;
}

/// Precomputed steering phases for every (frequency bin, direction) pair.
/// Stored planar (separate re/im, mic-major rows of directions) in single
/// precision; the quadratic-form arithmetic that consumes it stays double.
class SteeringTable {
public:
    SteeringTable() = default;

    SteeringTable(const ArrayGeometry& geometry, const DirectionGrid& grid,
                  std::vector<double> bin_freqs_hz, unsigned workers = 0)
        : n_bins_(bin_freqs_hz.size()),
          n_dirs_(grid.size()),
          n_mics_(geometry.size()),
          freqs_(std::move(bin_freqs_hz)) {
        re_.resize(n_bins_ * n_mics_ * n_dirs_);
        im_.resize(n_bins_ * n_mics_ * n_dirs_);

        // Delays depend on direction only; share them across bins.
        std::vector<double> delays(n_dirs_ * n_mics_);
        for (std::size_t d = 0; d < n_dirs_; ++d) {
            const std::vector<double> tau = propagation_delays(geometry, grid[d]);
            for (std::size_t m = 0; m < n_mics_; ++m)
                delays[d * n_mics_ + m] = tau[m];
        }

        const unsigned nw = resolve_workers(workers, n_bins_);
        auto fill_bins = [&](std::size_t b0, std::size_t b1) {
            for (std::size_t b = b0; b < b1; ++b) {
                const double two_pi_f = 2.0 * pi * freqs_[b];
                for (std::size_t d = 0; d < n_dirs_; ++d) {
                    for (std::size_t m = 0; m < n_mics_; ++m) {
                        const double phase = -two_pi_f * delays[d * n_mics_ + m];
                        const std::size_t i = index(b, m, d);
                        re_[i] = static_cast<float>(std::cos(phase));
                        im_[i] = static_cast<float>(std::sin(phase));
                    }
                }
            }
        };
        run_partitioned(n_bins_, nw, fill_bins);
    }

    std::size_t bins() const { return n_bins_; }
    std::size_t dirs() const { return n_dirs_; }
    std::size_t mics() const { return n_mics_; }
    double bin_freq_hz(std::size_t b) const { return freqs_[b]; }

    std::span<const float> row_re(std::size_t bin, std::size_t mic) const {
        return {re_.data() + index(bin, mic, 0), n_dirs_};
    }
    std::span<const float> row_im(std::size_t bin, std::size_t mic) const {
        return {im_.data() + index(bin, mic, 0), n_dirs_};
    }

    SteeringVector vector_at(std::size_t bin, std::size_t dir) const {
        SteeringVector sv;
        sv.entries.resize(n_mics_);
        for (std::size_t m = 0; m < n_mics_; ++m) {
            const std::size_t i = index(bin, m, dir);
            sv.entries[m] = {static_cast<double>(re_[i]), static_cast<double>(im_[i])};
        }
        return sv;
    }

    /// Split [0, count) into contiguous chunks and run fn on worker threads.
    /// Each chunk's output is independent, so results do not depend on the
    /// worker count.
    template <typename Fn>
    static void run_partitioned(std::size_t count, unsigned workers, Fn&& fn) {
        if (workers <= 1 || count <= 1) {
            fn(0, count);
            return;
        }
        const std::size_t chunk = (count + workers - 1) / workers;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b0 = std::min(count, w * chunk);
            const std::size_t b1 = std::min(count, b0 + chunk);
            if (b0 >= b1) break;
            pool.emplace_back([&fn, b0, b1] { fn(b0, b1); });
        }
        for (auto& t : pool) t.join();
    }

    static unsigned resolve_workers(unsigned requested, std::size_t count) {
        unsigned n = requested;
        if (n == 0) {
            n = std::thread::hardware_concurrency();
            if (n == 0) n = 1;
        }
        if (count < n) n = static_cast<unsigned>(count ? count : 1);
        return n;
    }

private:
    std::size_t index(std::size_t bin, std::size_t mic, std::size_t dir) const {
        return (bin * n_mics_ + mic) * n_dirs_ + dir;
    }

    std::size_t n_bins_ = 0, n_dirs_ = 0, n_mics_ = 0;
    std::vector<double> freqs_;
    std::vector<float> re_, im_;
};

} // namespace dudoa
