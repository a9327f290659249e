// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dudoa/common.hpp"
#include "dudoa/csv.hpp"
#include "dudoa/scene.hpp"

namespace dudoa {

namespace detail {

inline std::string svg_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct PlotAxes {
    double t0 = 0.0, t1 = 1.0;   // time range
    double a0 = 0.0, a1 = 180.0; // angle range
    static constexpr double width = 960.0, height = 420.0;
    static constexpr double left = 70.0, right = 20.0, top = 20.0, bottom = 50.0;

    double x(double t) const {
        return left + (t - t0) / (t1 - t0) * (width - left - right);
    }
    double y(double a) const {
        return height - bottom - (a - a0) / (a1 - a0) * (height - top - bottom);
    }
};

inline void svg_angle_plot(const std::string& path, const std::string& title,
                           std::span<const EstimateRow> rows,
                           const std::optional<Trajectory>& truth, bool azimuth) {
    // Data ranges; fall back to a fixed frame when there is nothing to plot.
    PlotAxes ax;
    bool any = false;
    auto grow = [&](double t, double a) {
        if (std::isnan(a)) return;
        if (!any) {
            ax.t0 = t;
            ax.t1 = t;
            ax.a0 = a;
            ax.a1 = a;
            any = true;
        } else {
            ax.t0 = std::min(ax.t0, t);
            ax.t1 = std::max(ax.t1, t);
            ax.a0 = std::min(ax.a0, a);
            ax.a1 = std::max(ax.a1, a);
        }
    };
    for (const EstimateRow& r : rows) {
        grow(r.time_s, azimuth ? r.raw_azimuth : r.raw_elevation);
        if (r.source != "none")
            grow(r.time_s, azimuth ? r.smoothed_azimuth : r.smoothed_elevation);
    }
    if (truth)
        for (const TrajectoryKnot& k : truth->samples)
            grow(k.time_s, azimuth ? k.azimuth_deg : k.elevation_deg);
    if (!any) {
        ax.t0 = 0.0;
        ax.t1 = 1.0;
        ax.a0 = azimuth ? 0.0 : -90.0;
        ax.a1 = azimuth ? 180.0 : 90.0;
    }
    if (ax.t1 - ax.t0 < 1e-9) ax.t1 = ax.t0 + 1.0;
    const double pad = std::max(2.0, 0.05 * (ax.a1 - ax.a0));
    ax.a0 -= pad;
    ax.a1 += pad;

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open SVG file for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << PlotAxes::width
        << "\" height=\"" << PlotAxes::height << "\" viewBox=\"0 0 "
        << PlotAxes::width << " " << PlotAxes::height << "\">\n"
        << "<style>\n"
        << ".frame{fill:none;stroke:#333;stroke-width:1}\n"
        << ".grid{stroke:#ddd;stroke-width:0.5}\n"
        << ".vad{fill:#d9ecd9;stroke:none}\n"
        << ".truth{fill:none;stroke:#888;stroke-width:2;stroke-dasharray:6 3}\n"
        << ".raw{fill:#c44;stroke:none}\n"
        << ".smoothed{fill:none;stroke:#24c;stroke-width:2}\n"
        << ".label{font:13px sans-serif;fill:#333}\n"
        << "</style>\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << PlotAxes::width << "\" height=\""
        << PlotAxes::height << "\" fill=\"#fff\"/>\n";

    // VAD shading behind everything else: one rect per active block.
    const double dt = rows.size() >= 2 ? rows[1].time_s - rows[0].time_s : 0.25;
    for (const EstimateRow& r : rows) {
        if (!r.vad) continue;
        const double x0 = ax.x(r.time_s - 0.5 * dt);
        const double x1 = ax.x(r.time_s + 0.5 * dt);
        out << "<rect class=\"vad\" x=\"" << svg_num(x0) << "\" y=\""
            << svg_num(PlotAxes::top) << "\" width=\"" << svg_num(x1 - x0)
            << "\" height=\""
            << svg_num(PlotAxes::height - PlotAxes::top - PlotAxes::bottom)
            << "\"/>\n";
    }

    // Axes frame and a few horizontal gridlines with labels.
    for (int i = 0; i <= 4; ++i) {
        const double a = ax.a0 + (ax.a1 - ax.a0) * i / 4.0;
        const double y = ax.y(a);
        out << "<line class=\"grid\" x1=\"" << svg_num(PlotAxes::left) << "\" y1=\""
            << svg_num(y) << "\" x2=\"" << svg_num(PlotAxes::width - PlotAxes::right)
            << "\" y2=\"" << svg_num(y) << "\"/>\n"
            << "<text class=\"label\" x=\"8\" y=\"" << svg_num(y + 4) << "\">"
            << svg_num(a) << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double t = ax.t0 + (ax.t1 - ax.t0) * i / 5.0;
        out << "<text class=\"label\" x=\"" << svg_num(ax.x(t) - 10) << "\" y=\""
            << svg_num(PlotAxes::height - PlotAxes::bottom + 20) << "\">"
            << svg_num(t) << "</text>\n";
    }
    out << "<rect class=\"frame\" x=\"" << svg_num(PlotAxes::left) << "\" y=\""
        << svg_num(PlotAxes::top) << "\" width=\""
        << svg_num(PlotAxes::width - PlotAxes::left - PlotAxes::right)
        << "\" height=\""
        << svg_num(PlotAxes::height - PlotAxes::top - PlotAxes::bottom) << "\"/>\n"
        << "<text class=\"label\" x=\"" << svg_num(PlotAxes::left) << "\" y=\"14\">"
        << title << "</text>\n";

    if (truth && truth->samples.size() >= 1) {
        out << "<polyline class=\"truth\" points=\"";
        for (const TrajectoryKnot& k : truth->samples)
            out << svg_num(ax.x(k.time_s)) << ','
                << svg_num(ax.y(azimuth ? k.azimuth_deg : k.elevation_deg)) << ' ';
        out << "\"/>\n";
    }
    for (const EstimateRow& r : rows) {
        const double a = azimuth ? r.raw_azimuth : r.raw_elevation;
        if (std::isnan(r.time_s) || std::isnan(a)) continue;
        out << "<circle class=\"raw\" cx=\"" << svg_num(ax.x(r.time_s)) << "\" cy=\""
            << svg_num(ax.y(a)) << "\" r=\"2\"/>\n";
    }
    bool open = false;
    for (const EstimateRow& r : rows) {
        if (r.source == "none") continue;
        if (!open) {
            out << "<polyline class=\"smoothed\" points=\"";
            open = true;
        }
        out << svg_num(ax.x(r.time_s)) << ','
            << svg_num(ax.y(azimuth ? r.smoothed_azimuth : r.smoothed_elevation))
            << ' ';
    }
    if (open) out << "\"/>\n";
    out << "</svg>\n";
    if (!out) throw io_error("failed writing SVG file: " + path);
}

} // namespace detail

/// Write azimuth.svg (and elevation.svg for azimuth-elevation runs) into
/// out_dir: truth curve, raw estimates, smoothed track, VAD shading.
/// Byte-identical output for identical inputs.
inline std::vector<std::string> emit_plots(std::span<const EstimateRow> rows,
                                           const std::optional<Trajectory>& truth,
                                           bool include_elevation,
                                           const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create plot directory: " + out_dir);
    std::vector<std::string> written;
    const std::string az_path =
        (std::filesystem::path(out_dir) / "azimuth.svg").string();
    detail::svg_angle_plot(az_path, "azimuth (degrees) vs time (s)", rows, truth, true);
    written.push_back(az_path);
    if (include_elevation) {
        const std::string el_path =
            (std::filesystem::path(out_dir) / "elevation.svg").string();
        detail::svg_angle_plot(el_path, "elevation (degrees) vs time (s)", rows, truth,
                               false);
        written.push_back(el_path);
    }
    return written;
}

} // namespace dudoa
