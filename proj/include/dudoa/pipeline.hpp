// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dudoa/array.hpp"
#include "dudoa/common.hpp"
#include "dudoa/config.hpp"
#include "dudoa/cpsd.hpp"
#include "dudoa/csv.hpp"
#include "dudoa/kalman.hpp"
#include "dudoa/localizer.hpp"
#include "dudoa/stft.hpp"
#include "dudoa/vad.hpp"

namespace dudoa {

/// Everything the pipeline produces for one N-frame block.
struct BlockResult {
    std::size_t block_index = 0;
    double time_s = 0.0;
    VadDecision vad;
    DoaEstimate raw;
    SmoothedEstimate smoothed;
};

struct PipelineResult {
    TrackerMode mode = TrackerMode::azimuth_only;
    DirectionGrid grid;
    std::vector<BlockResult> blocks;
    std::vector<SrpMap> srp_maps; // retained only on request
    std::vector<std::string> warnings;
    double setup_seconds = 0.0;      // steering table construction
    double processing_seconds = 0.0; // block loop (STFT through tracker)
    std::size_t samples_processed = 0;

    std::vector<SmoothedEstimate> smoothed_series() const {
        std::vector<SmoothedEstimate> out;
        out.reserve(blocks.size());
        for (const BlockResult& b : blocks) out.push_back(b.smoothed);
        return out;
    }

    // Raw estimates recast as a scorable stream: VAD-active blocks count as
    // corrected, the rest as predicted-only, so the scoring modes select the
    // same block subsets as for the smoothed stream.
    std::vector<SmoothedEstimate> raw_series() const {
        std::vector<SmoothedEstimate> out;
        out.reserve(blocks.size());
        for (const BlockResult& b : blocks) {
            SmoothedEstimate e;
            e.frame_index = b.block_index;
            e.time_s = b.time_s;
            e.direction = b.raw.direction;
            e.source = b.vad.active ? SmoothSource::corrected
                                    : SmoothSource::predicted_only;
            out.push_back(e);
        }
        return out;
    }
};

/// Worker count after applying the config request, the machine's core count,
/// and the DU_DOA_THREADS environment cap.
inline unsigned effective_workers(unsigned requested) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned w = requested == 0 ? hw : requested;
    if (const char* env = std::getenv("DU_DOA_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0)
            w = std::min<unsigned long>(w, cap);
    }
    return std::max(1u, w);
}

/// Center time of block b: blocks tumble over N hops, each STFT frame spans
/// fft_size samples, so the block covers samples
/// [b N R, b N R + (N-1) R + L) and is stamped at its midpoint.
inline double block_time_s(std::size_t block_index, const StftConfig& stft,
                           std::size_t cpsd_frames, double sample_rate_hz) {
    const double span =
        static_cast<double>((cpsd_frames - 1) * stft.hop + stft.fft_size);
    const double start =
        static_cast<double>(block_index * cpsd_frames * stft.hop);
    return (start + 0.5 * span) / sample_rate_hz;
}

inline std::size_t pipeline_block_count(std::size_t n_samples,
                                        const StftConfig& stft,
                                        std::size_t cpsd_frames) {
    return stft_frame_count(n_samples, stft) / cpsd_frames;
}

/// Run the full chain (STFT -> CPSD -> VAD -> SRP localization -> tracker)
/// over a buffer. Deterministic: identical inputs and config give identical
/// results for any worker count.
inline PipelineResult run_pipeline(const PipelineConfig& config,
                                   const MultichannelBuffer& input,
                                   bool keep_srp_maps = false) {
    using clock = std::chrono::steady_clock;
    input.validate();
    const double fs = input.sample_rate_hz;
    config.validate(fs);

    // Channel subset (the config must name exactly the geometry's mic count).
    MultichannelBuffer buffer;
    if (config.channels.empty()) {
        buffer = input;
    } else {
        buffer.sample_rate_hz = fs;
        for (std::size_t c : config.channels) {
            if (c >= input.n_channels())
                throw config_error("channel index " + std::to_string(c) +
                                   " out of range for the input");
            buffer.channels.push_back(input.channels[c]);
        }
    }
    if (buffer.n_channels() != config.geometry.size())
        throw config_error("input has " + std::to_string(buffer.n_channels()) +
                           " channels but the geometry expects " +
                           std::to_string(config.geometry.size()));

    PipelineResult result;
    result.mode = config.resolved_mode();

    // Tracker cadence: derived from the hop unless the config overrides it.
    const double derived_dt =
        static_cast<double>(config.stft.hop * config.cpsd_frames) / fs;
    TrackerConfig tracker;
    tracker.dt = config.tracker_dt ? *config.tracker_dt : derived_dt;
    tracker.sigma_q2 = config.sigma_q2;
    tracker.sigma_r2 = config.sigma_r2;
    tracker.mode = result.mode;
    if (config.tracker_dt &&
        std::abs(*config.tracker_dt - derived_dt) > 1e-3 * derived_dt)
        result.warnings.push_back(
            "tracker dt " + std::to_string(*config.tracker_dt) +
            " s overrides the derived block cadence " +
            std::to_string(derived_dt) + " s");

    const unsigned workers = effective_workers(config.workers);

    const auto setup_start = clock::now();
    result.grid = build_grid(config.geometry.kind, config.grid_resolution_deg);
    const SteeringTable table(config.geometry, result.grid,
                              config.stft.band_freqs_hz(fs), workers);
    result.setup_seconds =
        std::chrono::duration<double>(clock::now() - setup_start).count();

    const std::size_t n_blocks =
        pipeline_block_count(buffer.n_samples(), config.stft, config.cpsd_frames);
    const StftAnalyzer analyzer(config.stft, fs);

    const auto run_start = clock::now();
    TrackState state;
    std::vector<SpectralFrame> frames;
    frames.reserve(config.cpsd_frames);
    // Blocks pass through SRP a few at a time: the steering table dwarfs the
    // cache, and the batch form reuses each table slice while it is resident.
    // The estimates are identical to one-at-a-time processing.
    constexpr std::size_t kSrpBatch = 4;
    std::vector<CpsdStack> stacks;
    std::vector<VadDecision> vads;
    SrpBatchScratch srp_scratch;
    for (std::size_t b0 = 0; b0 < n_blocks; b0 += kSrpBatch) {
        const std::size_t count = std::min(kSrpBatch, n_blocks - b0);
        stacks.clear();
        vads.clear();
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t b = b0 + k;
            frames.clear();
            for (std::size_t i = 0; i < config.cpsd_frames; ++i)
                frames.push_back(analyzer.analyze(buffer, b * config.cpsd_frames + i));
            stacks.push_back(estimate_cpsd(frames));
            VadDecision vad = vad_detect(stacks.back(), config.vad_threshold);
            vad.frame_index = b;
            vads.push_back(vad);
        }
        std::vector<SrpMap> maps = broadband_srp_batch(stacks, result.grid,
                                                       table, workers, &srp_scratch);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t b = b0 + k;
            SrpMap& map = maps[k];
            map.frame_index = b;
            DoaEstimate raw = argmax_doa(map, result.grid);
            raw.frame_index = b;
            raw.time_s = block_time_s(b, config.stft, config.cpsd_frames, fs);
            raw.vad = vads[k].active;

            auto [next, smoothed] = tracker_step(state, vads[k], raw, tracker);
            state = std::move(next);

            BlockResult block;
            block.block_index = b;
            block.time_s = raw.time_s;
            block.vad = vads[k];
            block.raw = raw;
            block.smoothed = smoothed;
            result.blocks.push_back(std::move(block));
            if (keep_srp_maps) result.srp_maps.push_back(std::move(map));
        }
    }
    result.processing_seconds =
        std::chrono::duration<double>(clock::now() - run_start).count();
    result.samples_processed =
        n_blocks * config.cpsd_frames * config.stft.hop;
    return result;
}

/// Estimate CSV rows for a pipeline run.
inline std::vector<EstimateRow> estimate_rows(const PipelineResult& result) {
    std::vector<EstimateRow> rows;
    rows.reserve(result.blocks.size());
    for (const BlockResult& b : result.blocks) {
        EstimateRow r;
        r.block_index = b.block_index;
        r.time_s = b.time_s;
        r.raw_azimuth = b.raw.direction.azimuth_deg;
        r.raw_elevation = b.raw.direction.elevation_deg;
        r.vad = b.vad.active;
        r.smoothed_azimuth = b.smoothed.direction.azimuth_deg;
        r.smoothed_elevation = b.smoothed.direction.elevation_deg;
        r.source = to_string(b.smoothed.source);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace dudoa
