#include "beamtrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "beamtrack/png_io.hpp"

namespace beamtrack {

void NoiseSpec::validate() const {
    if (salt_density < 0 || salt_density > 1)
        throw ConfigError("NoiseSpec: salt_density must be in [0,1]");
    if (streak_probability < 0 || streak_probability > 1)
        throw ConfigError("NoiseSpec: streak_probability must be in [0,1]");
    if (gaussian_sigma < 0) throw ConfigError("NoiseSpec: gaussian_sigma must be >= 0");
    if (streak_length < 1) throw ConfigError("NoiseSpec: streak_length must be >= 1");
    if (motion_blur_frames < 1) throw ConfigError("NoiseSpec: motion_blur_frames must be >= 1");
}

double TrajectorySpec::deflection_at(double t_s) const {
    switch (kind) {
        case TrajectoryKind::constant:
            return deflection_px;
        case TrajectoryKind::square_wave: {
            double phase = t_s * rate_hz - std::floor(t_s * rate_hz);
            return phase < 0.5 ? deflection_px : -deflection_px;
        }
        case TrajectoryKind::sinusoid:
            return deflection_px + amplitude_px * std::sin(2.0 * std::numbers::pi * rate_hz * t_s);
    }
    return deflection_px;
}

void SceneSpec::validate() const {
    if (width < 8 || height < 16) throw ConfigError("SceneSpec: patch too small");
    auto check_pad = [&](const Roi& p, const char* name) {
        if (p.x < 0 || p.y < 0 || p.width < 1 || p.height < 1 || p.x + p.width > width ||
            p.y + p.height > height)
            throw ConfigError(std::string("SceneSpec: ") + name + " pad outside the patch");
    };
    check_pad(top_pad, "top");
    check_pad(bottom_pad, "bottom");
    if (!(pad_center_row(top_pad) < pad_center_row(bottom_pad)))
        throw ConfigError("SceneSpec: top pad must sit above the bottom pad");
    if (beam_width_px <= 0) throw ConfigError("SceneSpec: beam_width_px must be positive");
    if (beam_brightness < 1 || beam_brightness > 255 || pad_brightness < 1 ||
        pad_brightness > 255 || background_level < 0 || background_level > 255)
        throw ConfigError("SceneSpec: intensities must be in range");
    if (fps <= 0) throw ConfigError("SceneSpec: fps must be positive");
    noise.validate();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct ShapeCoeffs {
    double c1, c2, c3, k;
};

// Offset from the central line; zero at both clamp rows.
double shape_offset(const ShapeCoeffs& s, double y) {
    return s.c1 * std::sin(s.k * y) + s.c2 * std::cos(s.k * y) + s.c3;
}

}  // namespace

RenderedFrame render_frame(const SceneSpec& spec, int frame_index, std::uint64_t seed) {
    spec.validate();
    if (frame_index < 0) throw std::invalid_argument("render_frame: negative frame index");

    const int w = spec.width, h = spec.height;
    const double top_row = spec.pad_center_row(spec.top_pad);
    const double top_col = spec.pad_center_col(spec.top_pad);
    const double bot_row = spec.pad_center_row(spec.bottom_pad);
    const double bot_col = spec.pad_center_col(spec.bottom_pad);
    const double span_r = bot_row - top_row;
    const double length = std::hypot(span_r, bot_col - top_col);
    const double k = 2.0 * std::numbers::pi / length;
    const double t_s = frame_index / spec.fps;

    std::mt19937_64 rng(splitmix64(seed) ^ splitmix64(0x5eedf00dULL + frame_index));

    std::vector<double> img(static_cast<std::size_t>(w) * h,
                            static_cast<double>(spec.background_level));
    auto px = [&](int r, int c) -> double& { return img[static_cast<std::size_t>(r) * w + c]; };

    for (const Roi* pad : {&spec.top_pad, &spec.bottom_pad})
        for (int r = pad->y; r < pad->y + pad->height; ++r)
            for (int c = pad->x; c < pad->x + pad->width; ++c)
                px(r, c) = spec.pad_brightness;

    // beam layer: mean of motion-blur ghosts, max-composited over the scene
    const double delta = spec.trajectory.deflection_at(t_s);
    ShapeCoeffs shape{spec.trajectory.skew_c1, -delta / 2.0, delta / 2.0, k};

    const int r0 = static_cast<int>(std::ceil(top_row));
    const int r1 = static_cast<int>(std::floor(bot_row));
    const double sigma = spec.beam_width_px / 2.355;  // width given as FWHM
    const int reach = std::max(2, static_cast<int>(std::ceil(4.0 * sigma)));
    const int ghosts = spec.noise.motion_blur_frames;

    std::vector<double> beam(static_cast<std::size_t>(w) * h, 0.0);
    for (int g = 0; g < ghosts; ++g) {
        double tg = t_s - g / (spec.fps * ghosts);
        double dg = g == 0 ? delta : spec.trajectory.deflection_at(std::max(0.0, tg));
        ShapeCoeffs sg{spec.trajectory.skew_c1, -dg / 2.0, dg / 2.0, k};
        for (int r = r0; r <= r1; ++r) {
            double y = r - top_row;
            double line_col = top_col + (bot_col - top_col) * y / span_r;
            double xc = line_col + shape_offset(sg, y);
            int c_lo = std::max(0, static_cast<int>(std::floor(xc)) - reach);
            int c_hi = std::min(w - 1, static_cast<int>(std::ceil(xc)) + reach);
            for (int c = c_lo; c <= c_hi; ++c) {
                double d = (c - xc) / sigma;
                beam[static_cast<std::size_t>(r) * w + c] +=
                    spec.beam_brightness * std::exp(-0.5 * d * d) / ghosts;
            }
        }
    }
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = std::max(img[i], beam[i]);

    if (spec.noise.gaussian_sigma > 0) {
        std::normal_distribution<double> gauss(0.0, spec.noise.gaussian_sigma);
        for (double& v : img) v += gauss(rng);
    }
    if (spec.noise.salt_density > 0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::uniform_int_distribution<int> bright(100, 230);
        for (double& v : img)
            if (coin(rng) < spec.noise.salt_density) v = bright(rng);
    }
    if (spec.noise.streak_probability > 0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::uniform_int_distribution<int> bright(100, 210);
        std::uniform_int_distribution<int> start(0, std::max(0, w - spec.noise.streak_length));
        for (int r = 0; r < h; ++r) {
            if (coin(rng) >= spec.noise.streak_probability) continue;
            int c0 = start(rng);
            double v = bright(rng);
            for (int c = c0; c < std::min(w, c0 + spec.noise.streak_length); ++c)
                px(r, c) = std::max(px(r, c), v);
        }
    }

    std::vector<std::uint8_t> bytes(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(img[i]), 0, 255));

    RenderedFrame out{Frame(w, h, std::move(bytes)), GroundTruth{}};
    out.frame.index = frame_index;
    out.frame.timestamp_s = t_s;
    out.frame.scale_nm_per_px = spec.scale_nm_per_px;
    out.frame.metadata = spec.frame_metadata;

    GroundTruth& gt = out.truth;
    gt.frame_index = frame_index;
    gt.c1 = shape.c1;
    gt.c2 = shape.c2;
    gt.c3 = shape.c3;
    gt.first_beam_row = r0;
    gt.beam_col.reserve(r1 - r0 + 1);
    double best = 0.0;
    const double ortho = span_r / length;
    for (int r = r0; r <= r1; ++r) {
        double y = r - top_row;
        double off = shape_offset(shape, y);
        gt.beam_col.push_back(top_col + (bot_col - top_col) * y / span_r + off);
        if (std::abs(off) > std::abs(best)) best = off;
    }
    gt.deflection_px = best * ortho;
    return out;
}

std::vector<GroundTruth> render_sequence(const SceneSpec& spec, int n_frames, double fps,
                                         std::uint64_t seed,
                                         const std::filesystem::path& out_dir) {
    if (n_frames < 1) throw std::invalid_argument("render_sequence: need at least one frame");
    SceneSpec seq_spec = spec;
    seq_spec.fps = fps;
    seq_spec.validate();

    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir / "ground_truth.csv");
    if (!csv) throw IoError("cannot write " + (out_dir / "ground_truth.csv").string());
    csv << "frame,deflection_px,c1,c2,c3\n";

    std::vector<GroundTruth> truths;
    truths.reserve(n_frames);
    char name[32];
    for (int i = 0; i < n_frames; ++i) {
        RenderedFrame rf = render_frame(seq_spec, i, seed);
        std::snprintf(name, sizeof(name), "frame_%05d.png", i);
        write_png_gray(out_dir / name, rf.frame.width(), rf.frame.height(), rf.frame.pixels());
        char row[256];
        std::snprintf(row, sizeof(row), "%d,%.6f,%.6f,%.6f,%.6f\n", i, rf.truth.deflection_px,
                      rf.truth.c1, rf.truth.c2, rf.truth.c3);
        csv << row;
        truths.push_back(std::move(rf.truth));
    }
    return truths;
}

}  // namespace beamtrack
