#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "beamtrack/image.hpp"

namespace beamtrack {

struct NoiseSpec {
    double salt_density = 0.0;        // fraction of pixels replaced by bright speckle
    double gaussian_sigma = 0.0;      // additive intensity noise
    double streak_probability = 0.0;  // per-row chance of a horizontal bright streak
    int streak_length = 18;
    int motion_blur_frames = 1;       // ghost positions blended into the beam; 1 = sharp

    void validate() const;
};

enum class TrajectoryKind { constant, square_wave, sinusoid };

// Mid-span deflection as a function of time. The rendered shape bends as
// skew_c1*sin(k*y) + (deflection/2)*(1 - cos(k*y)), which pins the beam to
// both clamp centers and peaks at mid-span.
struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::constant;
    double deflection_px = 0.0;  // constant value, square amplitude, or sinusoid baseline
    double amplitude_px = 0.0;   // sinusoid amplitude
    double rate_hz = 0.5;        // square-wave cycle rate or sinusoid frequency
    double skew_c1 = 0.0;

    double deflection_at(double t_s) const;
};

struct SceneSpec {
    int width = 105;
    int height = 350;
    Roi top_pad{17, 0, 71, 20};      // x, y, w, h
    Roi bottom_pad{17, 330, 71, 20};
    double beam_width_px = 2.0;      // full width at half maximum
    int beam_brightness = 180;
    int pad_brightness = 230;
    int background_level = 8;
    double fps = 10.0;
    double scale_nm_per_px = 71.4;
    TrajectorySpec trajectory;
    NoiseSpec noise;
    std::map<std::string, std::string> frame_metadata;  // copied onto every frame

    void validate() const;
    double pad_center_row(const Roi& pad) const { return pad.y + (pad.height - 1) / 2.0; }
    double pad_center_col(const Roi& pad) const { return pad.x + (pad.width - 1) / 2.0; }
};

struct GroundTruth {
    int frame_index = 0;
    double deflection_px = 0.0;  // signed, via the same dense row scan the tracker reports
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    int first_beam_row = 0;
    std::vector<double> beam_col;  // exact beam center column per row, noiseless
};

struct RenderedFrame {
    Frame frame;
    GroundTruth truth;
};

// Deterministic for a fixed (spec, frame_index, seed); noise draws are
// independent per frame so sequences can render in parallel.
RenderedFrame render_frame(const SceneSpec& spec, int frame_index, std::uint64_t seed);

// Writes frame_%05d.png for each frame plus ground_truth.csv
// (frame,deflection_px,c1,c2,c3) into out_dir.
std::vector<GroundTruth> render_sequence(const SceneSpec& spec, int n_frames, double fps,
                                         std::uint64_t seed,
                                         const std::filesystem::path& out_dir);

}  // namespace beamtrack
