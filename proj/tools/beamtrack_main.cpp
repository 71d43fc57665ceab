#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "beamtrack/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNoOkFrames = 3;

beamtrack::PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return beamtrack::PipelineConfig{};
    return beamtrack::parse_pipeline_config(path);
}

int cmd_track(const std::string& input_dir, const std::string& config_path,
              const std::string& out_dir, bool overlay, bool relocate, int threads) {
    beamtrack::TrackOptions opts;
    opts.input_dir = input_dir;
    opts.output_dir = out_dir;
    opts.config = load_config(config_path);
    if (relocate) opts.config.relocate_per_frame = true;
    opts.overlay = overlay;
    opts.threads = threads;

    beamtrack::TrackOutput out = beamtrack::run_track(opts);
    std::printf("processed %zu frame(s), %d ok; results in %s\n", out.samples.size(),
                out.frames_ok, out_dir.c_str());
    if (out.report) {
        std::printf("classification=%s crossings=%d transition_rate_hz=%.4f\n",
                    beamtrack::to_string(out.report->classification).c_str(),
                    out.report->crossing_count, out.report->transition_rate_hz);
    }
    return out.frames_ok > 0 ? kExitOk : kExitNoOkFrames;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    beamtrack::SynthJob job = beamtrack::parse_synth_spec(spec_path);
    auto truths = beamtrack::render_sequence(job.scene, job.n_frames, job.scene.fps, job.seed,
                                             out_dir);
    std::printf("rendered %zu frame(s) of %dx%d into %s\n", truths.size(), job.scene.width,
                job.scene.height, out_dir.c_str());
    return kExitOk;
}

int cmd_bench(const std::string& input_dir, const std::string& config_path) {
    beamtrack::BenchReport rep = beamtrack::run_bench(input_dir, load_config(config_path));
    const beamtrack::StageTimes& st = rep.stages;
    std::printf("frames=%d\n", rep.frames);
    std::printf("decode_s=%.4f (excluded from pipeline timing)\n", rep.decode_s);
    std::printf("locate_s=%.4f (once per recording, excluded)\n", rep.locate_s);
    std::printf("stage_ms_per_frame denoise=%.3f maxima=%.3f continuity=%.3f parabola=%.3f "
                "fit=%.3f analysis=%.3f\n",
                1e3 * st.denoise / rep.frames, 1e3 * st.maxima / rep.frames,
                1e3 * st.continuity / rep.frames, 1e3 * st.parabola / rep.frames,
                1e3 * st.fit / rep.frames, 1e3 * st.analysis / rep.frames);
    std::printf("pipeline_s=%.4f\n", st.total());
    std::printf("pipeline_fps=%.2f\n", rep.pipeline_fps());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tracks a buckling beam through noisy grayscale PNG frames and reports its "
                 "deflection time series"};
    app.require_subcommand(1);

    std::string input_dir, config_path, out_dir = "beamtrack_out", spec_path;
    bool overlay = false, relocate = false;
    int threads = 1;

    CLI::App* track = app.add_subcommand("track", "run the tracking pipeline on a frame directory");
    track->add_option("input_dir", input_dir, "directory of numbered PNG frames")->required();
    track->add_option("--config", config_path, "pipeline config file (key = value lines)");
    track->add_option("--out", out_dir, "output directory");
    track->add_flag("--overlay", overlay, "write annotated overlay PNGs");
    track->add_flag("--relocate-per-frame", relocate, "recompute the central line on every frame");
    track->add_option("--threads", threads, "worker threads (results identical to sequential)");

    CLI::App* synth = app.add_subcommand("synth", "render a synthetic sequence with ground truth");
    synth->add_option("spec", spec_path, "scene spec file (key = value lines)")->required();
    synth->add_option("--out", out_dir, "output directory")->required();

    CLI::App* bench = app.add_subcommand("bench", "measure per-frame pipeline throughput");
    bench->add_option("input_dir", input_dir, "directory of numbered PNG frames")->required();
    bench->add_option("--config", config_path, "pipeline config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed()) return cmd_track(input_dir, config_path, out_dir, overlay, relocate, threads);
        if (synth->parsed()) return cmd_synth(spec_path, out_dir);
        if (bench->parsed()) return cmd_bench(input_dir, config_path);
    } catch (const beamtrack::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const beamtrack::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const beamtrack::LocateFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoOkFrames;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
