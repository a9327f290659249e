// Copyright 2026 the du-doa authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// du-doa: broadband DOA estimation and tracking over microphone-array audio.
// Subcommands: run, sim, score, plot, bench.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <dudoa/dudoa.hpp>

namespace {

using nlohmann::json;

dudoa::PipelineConfig resolve_config(const std::string& config_path,
                                     const std::string& preset) {
    if (config_path.empty() == preset.empty())
        throw dudoa::config_error("give exactly one of --config or --preset");
    if (!config_path.empty()) return dudoa::load_pipeline_config(config_path);
    return dudoa::preset_config(preset);
}

json report_to_json(const dudoa::ScoreReport& report) {
    json j;
    j["rmse_azimuth_deg"] = report.rmse_azimuth_deg;
    if (report.rmse_elevation_deg)
        j["rmse_elevation_deg"] = *report.rmse_elevation_deg;
    j["n_scored_blocks"] = report.n_scored_blocks;
    j["n_skipped_blocks"] = report.n_skipped_blocks;
    return j;
}

std::vector<dudoa::SmoothedEstimate>
smoothed_stream(const std::vector<dudoa::EstimateRow>& rows) {
    std::vector<dudoa::SmoothedEstimate> out;
    out.reserve(rows.size());
    for (const dudoa::EstimateRow& r : rows) {
        dudoa::SmoothedEstimate e;
        e.frame_index = r.block_index;
        e.time_s = r.time_s;
        e.direction = {r.smoothed_azimuth, r.smoothed_elevation};
        e.source = dudoa::smooth_source_from_string(r.source);
        out.push_back(e);
    }
    return out;
}

std::vector<dudoa::SmoothedEstimate>
raw_stream(const std::vector<dudoa::EstimateRow>& rows) {
    std::vector<dudoa::SmoothedEstimate> out;
    out.reserve(rows.size());
    for (const dudoa::EstimateRow& r : rows) {
        dudoa::SmoothedEstimate e;
        e.frame_index = r.block_index;
        e.time_s = r.time_s;
        e.direction = {r.raw_azimuth, r.raw_elevation};
        e.source = r.vad ? dudoa::SmoothSource::corrected
                         : dudoa::SmoothSource::predicted_only;
        out.push_back(e);
    }
    return out;
}

struct RunOptions {
    std::string config_path, preset, input, truth, out;
    std::string errors_out, srp_out, plot_dir;
    bool score_all = false;
    int workers = -1;
    double vad_threshold = -1.0;
};

int cmd_run(const RunOptions& opt) {
    dudoa::PipelineConfig cfg = resolve_config(opt.config_path, opt.preset);
    if (opt.workers >= 0) cfg.workers = static_cast<unsigned>(opt.workers);
    if (opt.vad_threshold >= 0.0) cfg.vad_threshold = opt.vad_threshold;

    const dudoa::MultichannelBuffer buffer = dudoa::read_wav(opt.input);
    const dudoa::PipelineResult result =
        dudoa::run_pipeline(cfg, buffer, !opt.srp_out.empty());
    for (const std::string& w : result.warnings)
        std::cerr << "warning: " << w << '\n';

    const std::vector<dudoa::EstimateRow> rows = dudoa::estimate_rows(result);
    dudoa::write_estimates_csv(opt.out, rows);
    if (!opt.srp_out.empty()) dudoa::write_srp_csv(opt.srp_out, result.srp_maps);

    json summary;
    summary["blocks"] = result.blocks.size();
    summary["samples_processed"] = result.samples_processed;
    summary["setup_seconds"] = result.setup_seconds;
    summary["processing_seconds"] = result.processing_seconds;
    summary["estimates_csv"] = opt.out;

    std::optional<dudoa::Trajectory> truth;
    if (!opt.truth.empty()) {
        truth = dudoa::read_truth_csv(opt.truth);
        const dudoa::ScoringMode mode = opt.score_all
                                            ? dudoa::ScoringMode::all_emitted
                                            : dudoa::ScoringMode::active_only;
        const bool with_el = result.mode == dudoa::TrackerMode::azimuth_elevation;
        std::vector<dudoa::BlockError> details;
        summary["scoring"] = dudoa::to_string(mode);
        summary["smoothed"] = report_to_json(dudoa::rmse(
            result.smoothed_series(), *truth, mode, with_el, &details));
        summary["raw"] =
            report_to_json(dudoa::rmse(result.raw_series(), *truth, mode, with_el));
        if (!opt.errors_out.empty()) dudoa::write_errors_csv(opt.errors_out, details);
    }
    if (!opt.plot_dir.empty()) {
        const bool with_el = result.mode == dudoa::TrackerMode::azimuth_elevation;
        summary["plots"] = dudoa::emit_plots(rows, truth, with_el, opt.plot_dir);
    }
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct SimOptions {
    std::string spec, out, truth;
};

int cmd_sim(const SimOptions& opt) {
    const dudoa::SceneSpec spec = dudoa::load_scene_spec(opt.spec);
    auto [buffer, trajectory] = dudoa::synthesize(spec);
    dudoa::write_wav(opt.out, buffer);
    if (!opt.truth.empty()) dudoa::write_truth_csv(opt.truth, trajectory);

    json summary;
    summary["channels"] = buffer.n_channels();
    summary["samples"] = buffer.n_samples();
    summary["sample_rate_hz"] = buffer.sample_rate_hz;
    summary["wav"] = opt.out;
    if (!opt.truth.empty()) summary["truth_csv"] = opt.truth;
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct ScoreOptions {
    std::string estimates, truth, errors_out;
    bool score_all = false;
    bool with_elevation = false;
};

int cmd_score(const ScoreOptions& opt) {
    const std::vector<dudoa::EstimateRow> rows =
        dudoa::read_estimates_csv(opt.estimates);
    const dudoa::Trajectory truth = dudoa::read_truth_csv(opt.truth);
    const dudoa::ScoringMode mode = opt.score_all ? dudoa::ScoringMode::all_emitted
                                                  : dudoa::ScoringMode::active_only;
    std::vector<dudoa::BlockError> details;
    json summary;
    summary["scoring"] = dudoa::to_string(mode);
    summary["smoothed"] = report_to_json(
        dudoa::rmse(smoothed_stream(rows), truth, mode, opt.with_elevation, &details));
    summary["raw"] =
        report_to_json(dudoa::rmse(raw_stream(rows), truth, mode, opt.with_elevation));
    if (!opt.errors_out.empty()) dudoa::write_errors_csv(opt.errors_out, details);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct PlotOptions {
    std::string estimates, truth, out_dir;
    bool with_elevation = false;
};

int cmd_plot(const PlotOptions& opt) {
    const std::vector<dudoa::EstimateRow> rows =
        dudoa::read_estimates_csv(opt.estimates);
    std::optional<dudoa::Trajectory> truth;
    if (!opt.truth.empty()) truth = dudoa::read_truth_csv(opt.truth);
    const std::vector<std::string> written =
        dudoa::emit_plots(rows, truth, opt.with_elevation, opt.out_dir);
    json summary;
    summary["plots"] = written;
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct BenchOptions {
    std::string preset = "spherical";
    double seconds = 30.0;
    int workers = -1;
    std::uint64_t seed = 7;
};

int cmd_bench(const BenchOptions& opt) {
    dudoa::PipelineConfig cfg = dudoa::preset_config(opt.preset);
    if (opt.workers >= 0) cfg.workers = static_cast<unsigned>(opt.workers);

    dudoa::SceneSpec scene;
    scene.geometry = cfg.geometry;
    scene.trajectory =
        cfg.geometry.kind == dudoa::GeometryKind::linear_azimuth_only
            ? dudoa::Trajectory::constant(60.0, 0.0)
            : dudoa::Trajectory::constant(40.0, 15.0);
    scene.source = dudoa::SourceKind::white_noise;
    scene.snr_db = 20.0;
    scene.duration_s = opt.seconds;
    scene.seed = opt.seed;
    auto [buffer, trajectory] = dudoa::synthesize(scene);

    const dudoa::PipelineResult result = dudoa::run_pipeline(cfg, buffer);
    const double sps =
        result.processing_seconds > 0.0
            ? static_cast<double>(result.samples_processed) / result.processing_seconds
            : 0.0;

    json summary;
    summary["preset"] = opt.preset;
    summary["workers"] = dudoa::effective_workers(cfg.workers);
    summary["mics"] = cfg.geometry.size();
    summary["grid_directions"] = result.grid.size();
    summary["scene_seconds"] = opt.seconds;
    summary["blocks"] = result.blocks.size();
    summary["samples_processed"] = result.samples_processed;
    summary["setup_seconds"] = result.setup_seconds;
    summary["processing_seconds"] = result.processing_seconds;
    summary["samples_per_second"] = sps;
    summary["realtime_factor"] = sps / buffer.sample_rate_hz;
    std::cout << summary.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"du-doa: broadband DOA estimation and tracking"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand(
        "run", "Run the estimation pipeline over a WAV recording");
    run->add_option("--config", run_opt.config_path, "Pipeline config JSON");
    run->add_option("--preset", run_opt.preset,
                    "Built-in preset: linear, robot-head, spherical");
    run->add_option("--input", run_opt.input, "Input multichannel WAV")->required();
    run->add_option("--truth", run_opt.truth, "Ground-truth CSV for scoring");
    run->add_option("--out", run_opt.out, "Estimates CSV to write")->required();
    run->add_option("--errors-out", run_opt.errors_out, "Per-block error CSV");
    run->add_option("--srp-out", run_opt.srp_out, "Raw SRP map dump CSV");
    run->add_option("--plot-dir", run_opt.plot_dir, "Directory for SVG plots");
    run->add_flag("--score-all", run_opt.score_all,
                  "Score all emitted blocks, not only VAD-corrected ones");
    run->add_option("--workers", run_opt.workers, "Worker thread count (0 = auto)");
    run->add_option("--vad-threshold", run_opt.vad_threshold,
                    "Override the config's VAD trace threshold");

    SimOptions sim_opt;
    CLI::App* sim = app.add_subcommand("sim", "Synthesize a scene WAV + truth CSV");
    sim->add_option("--spec", sim_opt.spec, "Scene spec JSON")->required();
    sim->add_option("--out", sim_opt.out, "Output WAV path")->required();
    sim->add_option("--truth", sim_opt.truth, "Output ground-truth CSV");

    ScoreOptions score_opt;
    CLI::App* score =
        app.add_subcommand("score", "Score an estimates CSV against truth");
    score->add_option("--estimates", score_opt.estimates, "Estimates CSV")->required();
    score->add_option("--truth", score_opt.truth, "Ground-truth CSV")->required();
    score->add_option("--errors-out", score_opt.errors_out, "Per-block error CSV");
    score->add_flag("--score-all", score_opt.score_all,
                    "Score all emitted blocks, not only VAD-corrected ones");
    score->add_flag("--with-elevation", score_opt.with_elevation,
                    "Also report elevation RMSE");

    PlotOptions plot_opt;
    CLI::App* plot = app.add_subcommand("plot", "Render SVG trajectory plots");
    plot->add_option("--estimates", plot_opt.estimates, "Estimates CSV")->required();
    plot->add_option("--truth", plot_opt.truth, "Ground-truth CSV");
    plot->add_option("--out-dir", plot_opt.out_dir, "Output directory")->required();
    plot->add_flag("--with-elevation", plot_opt.with_elevation,
                   "Also render the elevation plot");

    BenchOptions bench_opt;
    CLI::App* bench =
        app.add_subcommand("bench", "Measure pipeline throughput on a synthetic scene");
    bench->add_option("--preset", bench_opt.preset,
                      "Preset to benchmark (default spherical)");
    bench->add_option("--seconds", bench_opt.seconds, "Scene length in seconds");
    bench->add_option("--workers", bench_opt.workers, "Worker thread count (0 = auto)");
    bench->add_option("--seed", bench_opt.seed, "Scene seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opt);
        if (sim->parsed()) return cmd_sim(sim_opt);
        if (score->parsed()) return cmd_score(score_opt);
        if (plot->parsed()) return cmd_plot(plot_opt);
        if (bench->parsed()) return cmd_bench(bench_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
