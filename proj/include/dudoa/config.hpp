// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dudoa/array.hpp"
#include "dudoa/common.hpp"
#include "dudoa/kalman.hpp"
#include "dudoa/scene.hpp"
#include "dudoa/stft.hpp"

namespace dudoa {

/// Full pipeline parameterization. The defaults are the paperless baseline
/// for a 48 kHz linear-array run; presets shipped under data/presets adjust
/// the VAD threshold and grid per array.
struct PipelineConfig {
    ArrayGeometry geometry;
    std::vector<std::size_t> channels; // optional input-channel subset; empty = all
    StftConfig stft;                   // L=2048, R=512, band [80, 8000] Hz
    std::size_t cpsd_frames = 25;      // N frames averaged per block
    double vad_threshold = 200.0;      // trace threshold (linear-array default)
    double grid_resolution_deg = 1.0;  // grid kind follows the geometry kind
    std::optional<double> tracker_dt;  // absent: derived as hop*N/sample_rate
    double sigma_q2 = 1e-3;
    double sigma_r2 = 1e-4;
    std::optional<TrackerMode> tracker_mode; // absent: follows the geometry kind
    unsigned workers = 0;                    // 0 = all available cores

    TrackerMode resolved_mode() const {
        if (tracker_mode) return *tracker_mode;
        return geometry.kind == GeometryKind::linear_azimuth_only
                   ? TrackerMode::azimuth_only
                   : TrackerMode::azimuth_elevation;
    }

    void validate(double sample_rate_hz) const {
        geometry.validate();
        stft.validate(sample_rate_hz);
        if (cpsd_frames == 0) throw config_error("cpsd frames must be >= 1");
        if (!(vad_threshold >= 0.0) || !std::isfinite(vad_threshold))
            throw config_error("vad threshold must be finite and >= 0");
        if (!(grid_resolution_deg > 0.0))
            throw config_error("grid resolution must be positive");
        if (tracker_dt && !(*tracker_dt > 0.0))
            throw config_error("tracker dt must be positive");
        if (!(sigma_q2 > 0.0) || !(sigma_r2 > 0.0))
            throw config_error("tracker variances must be positive");
        if (!channels.empty() && channels.size() != geometry.size())
            throw config_error("channel subset size must equal the geometry mic count");
    }
};

namespace detail {

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open JSON file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
    if (!j.is_object()) throw config_error(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known)
            throw config_error("unknown key \"" + item.key() + "\" in " + where);
    }
}

// Resolve `path` relative to the directory of `base_file`.
inline std::string resolve_path(const std::string& path, const std::string& base_file) {
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_file.empty()) return path;
    return (std::filesystem::path(base_file).parent_path() / p).string();
}

} // namespace detail

inline ArrayGeometry geometry_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j, {"kind", "speed_of_sound", "positions", "name"},
                                "geometry");
    ArrayGeometry g;
    if (!j.contains("positions") || !j["positions"].is_array())
        throw config_error("geometry requires a positions array");
    for (const auto& row : j["positions"]) {
        if (!row.is_array() || row.size() != 3)
            throw config_error("each mic position must be [x, y, z]");
        g.positions.push_back({row[0].get<double>(), row[1].get<double>(),
                               row[2].get<double>()});
    }
    if (j.contains("speed_of_sound")) g.speed_of_sound = j["speed_of_sound"].get<double>();
    if (j.contains("kind")) g.kind = geometry_kind_from_string(j["kind"].get<std::string>());
    g.validate();
    return g;
}

inline ArrayGeometry load_geometry(const std::string& path) {
    return geometry_from_json(detail::load_json_file(path));
}

inline SceneSpec scene_spec_from_json(const nlohmann::json& j,
                                      const std::string& base_file) {
    detail::reject_unknown_keys(
        j,
        {"geometry", "trajectory", "source", "source_path", "snr_db", "duration_s",
         "sample_rate_hz", "seed", "source_gain", "active_segments", "name"},
        "scene spec");
    SceneSpec spec;
    if (!j.contains("geometry")) throw config_error("scene spec requires geometry");
    if (j["geometry"].is_string())
        spec.geometry =
            load_geometry(detail::resolve_path(j["geometry"].get<std::string>(), base_file));
    else
        spec.geometry = geometry_from_json(j["geometry"]);

    if (!j.contains("trajectory") || !j["trajectory"].is_array())
        throw config_error("scene spec requires a trajectory array");
    for (const auto& row : j["trajectory"]) {
        if (!row.is_array() || row.size() != 3)
            throw config_error("each trajectory knot must be [time_s, azimuth, elevation]");
        spec.trajectory.samples.push_back(
            {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    if (j.contains("source"))
        spec.source = source_kind_from_string(j["source"].get<std::string>());
    if (j.contains("source_path"))
        spec.source_path = detail::resolve_path(j["source_path"].get<std::string>(), base_file);
    if (j.contains("snr_db") && !j["snr_db"].is_null()) {
        if (j["snr_db"].is_string()) {
            const std::string s = j["snr_db"].get<std::string>();
            if (s != "inf" && s != "+inf")
                throw config_error("snr_db string form must be \"inf\"");
        } else {
            spec.snr_db = j["snr_db"].get<double>();
        }
    }
    if (!j.contains("duration_s")) throw config_error("scene spec requires duration_s");
    spec.duration_s = j["duration_s"].get<double>();
    if (j.contains("sample_rate_hz")) spec.sample_rate_hz = j["sample_rate_hz"].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("source_gain")) spec.source_gain = j["source_gain"].get<double>();
    if (j.contains("active_segments")) {
        for (const auto& row : j["active_segments"]) {
            if (!row.is_array() || row.size() != 2)
                throw config_error("each active segment must be [start_s, stop_s]");
            spec.active_segments.push_back({row[0].get<double>(), row[1].get<double>()});
        }
    }
    spec.validate();
    return spec;
}

inline SceneSpec load_scene_spec(const std::string& path) {
    return scene_spec_from_json(detail::load_json_file(path), path);
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                                const std::string& base_file) {
    detail::reject_unknown_keys(j,
                                {"geometry", "channels", "stft", "cpsd", "vad", "grid",
                                 "tracker", "workers", "name"},
                                "pipeline config");
    PipelineConfig cfg;
    if (!j.contains("geometry")) throw config_error("pipeline config requires geometry");
    if (j["geometry"].is_string())
        cfg.geometry =
            load_geometry(detail::resolve_path(j["geometry"].get<std::string>(), base_file));
    else
        cfg.geometry = geometry_from_json(j["geometry"]);

    if (j.contains("channels"))
        for (const auto& c : j["channels"]) cfg.channels.push_back(c.get<std::size_t>());

    if (j.contains("stft")) {
        const nlohmann::json& s = j["stft"];
        detail::reject_unknown_keys(s, {"fft_size", "hop", "band_hz"}, "stft config");
        if (s.contains("fft_size")) cfg.stft.fft_size = s["fft_size"].get<std::size_t>();
        if (s.contains("hop")) cfg.stft.hop = s["hop"].get<std::size_t>();
        if (s.contains("band_hz")) {
            if (!s["band_hz"].is_array() || s["band_hz"].size() != 2)
                throw config_error("band_hz must be [low, high]");
            cfg.stft.band_low_hz = s["band_hz"][0].get<double>();
            cfg.stft.band_high_hz = s["band_hz"][1].get<double>();
        }
    }
    if (j.contains("cpsd")) {
        detail::reject_unknown_keys(j["cpsd"], {"frames"}, "cpsd config");
        if (j["cpsd"].contains("frames"))
            cfg.cpsd_frames = j["cpsd"]["frames"].get<std::size_t>();
    }
    if (j.contains("vad")) {
        detail::reject_unknown_keys(j["vad"], {"threshold"}, "vad config");
        if (j["vad"].contains("threshold"))
            cfg.vad_threshold = j["vad"]["threshold"].get<double>();
    }
    if (j.contains("grid")) {
        const nlohmann::json& g = j["grid"];
        detail::reject_unknown_keys(g, {"kind", "resolution_deg"}, "grid config");
        if (g.contains("resolution_deg"))
            cfg.grid_resolution_deg = g["resolution_deg"].get<double>();
        if (g.contains("kind")) {
            const GeometryKind kind = geometry_kind_from_string(g["kind"].get<std::string>());
            if (kind != cfg.geometry.kind)
                throw config_error("grid kind must match the geometry kind");
        }
    }
    if (j.contains("tracker")) {
        const nlohmann::json& t = j["tracker"];
        detail::reject_unknown_keys(t, {"dt", "sigma_q2", "sigma_r2", "mode"},
                                    "tracker config");
        if (t.contains("dt") && !t["dt"].is_null()) cfg.tracker_dt = t["dt"].get<double>();
        if (t.contains("sigma_q2")) cfg.sigma_q2 = t["sigma_q2"].get<double>();
        if (t.contains("sigma_r2")) cfg.sigma_r2 = t["sigma_r2"].get<double>();
        if (t.contains("mode"))
            cfg.tracker_mode = tracker_mode_from_string(t["mode"].get<std::string>());
    }
    if (j.contains("workers")) cfg.workers = j["workers"].get<unsigned>();
    return cfg;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    return pipeline_config_from_json(detail::load_json_file(path), path);
}

} // namespace dudoa
