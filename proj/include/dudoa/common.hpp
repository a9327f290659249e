// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dudoa {

inline constexpr double pi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * (pi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / pi); }

/// Wrap an angle in degrees to (-180, 180].
inline double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0)
        w += 360.0;
    else if (w > 180.0)
        w -= 360.0;
    return w;
}

inline double clamp_degrees(double deg, double lo, double hi) {
    return deg < lo ? lo : (deg > hi ? hi : deg);
}

/// Thrown for invalid configuration values (geometry, grid, STFT setup, ...).
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a streaming stage is driven out of contract
/// (insufficient CPSD history, uninitialized tracker, out-of-span query).
class state_error : public std::runtime_error {
public:
    explicit state_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown for unreadable or malformed input/output files.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dudoa
