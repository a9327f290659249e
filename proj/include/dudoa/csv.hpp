// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dudoa/common.hpp"
#include "dudoa/evaluate.hpp"
#include "dudoa/localizer.hpp"
#include "dudoa/scene.hpp"

namespace dudoa {

/// One row of the estimate CSV; mirrors the output columns exactly.
struct EstimateRow {
    std::size_t block_index = 0;
    double time_s = 0.0;
    double raw_azimuth = 0.0;
    double raw_elevation = 0.0;
    bool vad = false;
    double smoothed_azimuth = 0.0;  // NaN when source = none
    double smoothed_elevation = 0.0;
    std::string source;             // corrected | predicted-only | none
};

namespace detail {

// Fixed-width numeric formatting so identical runs write identical bytes.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw io_error("bad numeric field \"" + s + "\" in " + context);
    }
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open file for writing: " + path);
    return out;
}

} // namespace detail

inline constexpr const char* kEstimateCsvHeader =
    "block_index,time_s,raw_azimuth,raw_elevation,vad,"
    "smoothed_azimuth,smoothed_elevation,source";

inline void write_estimates_csv(const std::string& path,
                                std::span<const EstimateRow> rows) {
    std::ofstream out = detail::open_out(path);
    out << kEstimateCsvHeader << '\n';
    for (const EstimateRow& r : rows) {
        out << r.block_index << ',' << detail::format_number(r.time_s) << ','
            << detail::format_number(r.raw_azimuth) << ','
            << detail::format_number(r.raw_elevation) << ',' << (r.vad ? 1 : 0)
            << ',' << detail::format_number(r.smoothed_azimuth) << ','
            << detail::format_number(r.smoothed_elevation) << ',' << r.source
            << '\n';
    }
    if (!out) throw io_error("failed writing estimates CSV: " + path);
}

inline std::vector<EstimateRow> read_estimates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open estimates CSV: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kEstimateCsvHeader)
        throw io_error("estimates CSV has an unexpected header: " + path);
    std::vector<EstimateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 8)
            throw io_error("estimates CSV row with wrong field count in " + path);
        EstimateRow r;
        r.block_index = static_cast<std::size_t>(
            detail::parse_double(f[0], path));
        r.time_s = detail::parse_double(f[1], path);
        r.raw_azimuth = detail::parse_double(f[2], path);
        r.raw_elevation = detail::parse_double(f[3], path);
        r.vad = detail::parse_double(f[4], path) != 0.0;
        r.smoothed_azimuth = detail::parse_double(f[5], path);
        r.smoothed_elevation = detail::parse_double(f[6], path);
        r.source = f[7];
        if (r.source != "corrected" && r.source != "predicted-only" && r.source != "none")
            throw io_error("estimates CSV has unknown source \"" + r.source + "\"");
        rows.push_back(r);
    }
    return rows;
}

inline constexpr const char* kTruthCsvHeader = "time_s,azimuth_deg,elevation_deg";

inline void write_truth_csv(const std::string& path, const Trajectory& trajectory) {
    trajectory.validate();
    std::ofstream out = detail::open_out(path);
    out << kTruthCsvHeader << '\n';
    for (const TrajectoryKnot& k : trajectory.samples)
        out << detail::format_number(k.time_s) << ','
            << detail::format_number(k.azimuth_deg) << ','
            << detail::format_number(k.elevation_deg) << '\n';
    if (!out) throw io_error("failed writing truth CSV: " + path);
}

inline Trajectory read_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open truth CSV: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kTruthCsvHeader)
        throw io_error("truth CSV has an unexpected header: " + path);
    Trajectory t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 3)
            throw io_error("truth CSV row with wrong field count in " + path);
        t.samples.push_back({detail::parse_double(f[0], path),
                             detail::parse_double(f[1], path),
                             detail::parse_double(f[2], path)});
    }
    t.validate();
    return t;
}

inline void write_errors_csv(const std::string& path,
                             std::span<const BlockError> errors) {
    std::ofstream out = detail::open_out(path);
    out << "block_index,time_s,scored,azimuth_error_deg,elevation_error_deg\n";
    for (const BlockError& e : errors)
        out << e.frame_index << ',' << detail::format_number(e.time_s) << ','
            << (e.scored ? 1 : 0) << ','
            << detail::format_number(e.azimuth_error_deg) << ','
            << detail::format_number(e.elevation_error_deg) << '\n';
    if (!out) throw io_error("failed writing errors CSV: " + path);
}

/// Dump raw SRP maps, one row per (block, direction) pair.
inline void write_srp_csv(const std::string& path, std::span<const SrpMap> maps) {
    std::ofstream out = detail::open_out(path);
    out << "block_index,direction_index,value\n";
    char buf[64];
    for (const SrpMap& map : maps)
        for (std::size_t d = 0; d < map.values.size(); ++d) {
            std::snprintf(buf, sizeof buf, "%.9e", map.values[d]);
            out << map.frame_index << ',' << d << ',' << buf << '\n';
        }
    if (!out) throw io_error("failed writing SRP CSV: " + path);
}

} // namespace dudoa
