#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beamtrack/analysis.hpp"
#include "beamtrack/image.hpp"
#include "beamtrack/locator.hpp"
#include "beamtrack/synth.hpp"
#include "beamtrack/tracker.hpp"

namespace beamtrack {

// Every tunable of the per-frame pipeline, with the project defaults.
struct PipelineConfig {
    int blur_window = 3;
    int mask_threshold = 20;
    int continuity_margin = 3;
    bool continuity_doubling = true;
    double separation_d = 10.0;
    int bend_candidates = 41;
    double gn_tol = 1e-8;
    int gn_max_iter = 20;
    double hysteresis_px = 2.0;
    double fps = 10.0;
    std::optional<double> scale_nm_per_px = 71.4;
    std::optional<Roi> roi;
    bool relocate_per_frame = false;
    double min_area_frac = 0.02;

    void validate() const;  // throws ConfigError
};

// Flat "key = value" file with '#' comments; unknown keys are rejected.
PipelineConfig parse_pipeline_config(const std::filesystem::path& path);
PipelineConfig parse_pipeline_config_text(const std::string& text);

// Synthetic scene description in the same key = value format.
struct SynthJob {
    SceneSpec scene;
    int n_frames = 100;
    std::uint64_t seed = 1;
};
SynthJob parse_synth_spec(const std::filesystem::path& path);
SynthJob parse_synth_spec_text(const std::string& text);

// Recording-level state computed once (or per frame when relocating).
struct TrackContext {
    LocateResult location;
    int track_row_begin = 0;  // first row strictly below the top clamp
    int track_row_end = 0;    // one past the last row strictly above the bottom clamp
    DenoiseConfig denoise;
    ContinuityConfig continuity;
    ParabolaBandConfig band;
};

TrackContext make_track_context(const PipelineConfig& cfg, LocateResult location,
                                int frame_width);

// Wall-clock seconds spent in each pipeline stage, for the bench command.
struct StageTimes {
    double denoise = 0.0;
    double maxima = 0.0;
    double continuity = 0.0;
    double parabola = 0.0;
    double fit = 0.0;
    double analysis = 0.0;

    double total() const { return denoise + maxima + continuity + parabola + fit + analysis; }
};

struct FrameResult {
    DeflectionSample sample;
    std::vector<TrackPoint> points;  // fully annotated, for overlays
};

// Runs denoise -> maxima -> continuity filter -> parabola filter -> fit ->
// deflection on one frame against a fixed context. Never throws for
// per-frame data problems; the sample's status reports them.
FrameResult process_frame(const Frame& frame, const PipelineConfig& cfg,
                          const TrackContext& ctx, StageTimes* timers = nullptr);

struct TrackOptions {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;
    PipelineConfig config;
    bool overlay = false;
    int threads = 1;
};

struct TrackOutput {
    std::vector<DeflectionSample> samples;
    std::optional<WellReport> report;
    int frames_ok = 0;
};

// Numbered PNGs from a directory, ordered by the number embedded in the
// file name (falling back to name order).
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

// Full track command: writes results.csv, summary.json and optional
// overlay frames into output_dir.
TrackOutput run_track(const TrackOptions& opts);

struct BenchReport {
    int frames = 0;
    double decode_s = 0.0;
    double locate_s = 0.0;
    StageTimes stages;

    double pipeline_fps() const { return frames / stages.total(); }
};

BenchReport run_bench(const std::filesystem::path& input_dir, const PipelineConfig& cfg);

// results.csv helpers (shared with the tests).
std::string csv_header();
std::string csv_row(const DeflectionSample& s);

}  // namespace beamtrack
