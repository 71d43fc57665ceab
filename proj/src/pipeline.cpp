#include "beamtrack/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "beamtrack/fitter.hpp"
#include "beamtrack/png_io.hpp"

namespace beamtrack {

void PipelineConfig::validate() const {
    if (blur_window < 1 || blur_window % 2 == 0)
        throw ConfigError("blur_window must be odd and positive");
    if (mask_threshold < 0 || mask_threshold > 255)
        throw ConfigError("mask_threshold must be in [0,255]");
    if (continuity_margin < 1) throw ConfigError("continuity_margin must be >= 1");
    if (!(separation_d > 0)) throw ConfigError("separation_d must be > 0");
    if (bend_candidates < 1) throw ConfigError("bend_candidates must be >= 1");
    if (!(gn_tol > 0)) throw ConfigError("gn_tol must be > 0");
    if (gn_max_iter < 1) throw ConfigError("gn_max_iter must be >= 1");
    if (hysteresis_px < 0) throw ConfigError("hysteresis_px must be >= 0");
    if (!(fps > 0)) throw ConfigError("fps must be > 0");
    if (scale_nm_per_px && !(*scale_nm_per_px > 0))
        throw ConfigError("scale_nm_per_px must be > 0");
    if (min_area_frac < 0 || min_area_frac > 1)
        throw ConfigError("min_area_frac must be in [0,1]");
    if (roi && (roi->width < 1 || roi->height < 1 || roi->x < 0 || roi->y < 0))
        throw ConfigError("roi must have positive size and non-negative origin");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// "key = value" lines, '#' starts a comment.
std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int n = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return n;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

Roi to_roi(const std::string& key, const std::string& v) {
    Roi roi;
    int vals[4];
    std::istringstream ss(v);
    std::string part;
    for (int i = 0; i < 4; ++i) {
        if (!std::getline(ss, part, ','))
            throw ConfigError(key + ": expected x,y,width,height");
        vals[i] = to_int(key, trim(part));
    }
    if (std::getline(ss, part, ',')) throw ConfigError(key + ": expected exactly four values");
    roi.x = vals[0];
    roi.y = vals[1];
    roi.width = vals[2];
    roi.height = vals[3];
    return roi;
}

}  // namespace

PipelineConfig parse_pipeline_config_text(const std::string& text) {
    PipelineConfig cfg;
    for (const auto& [key, value] : parse_kv(text)) {
        if (key == "blur_window") cfg.blur_window = to_int(key, value);
        else if (key == "mask_threshold") cfg.mask_threshold = to_int(key, value);
        else if (key == "continuity_margin") cfg.continuity_margin = to_int(key, value);
        else if (key == "continuity_doubling") cfg.continuity_doubling = to_bool(key, value);
        else if (key == "separation_d") cfg.separation_d = to_double(key, value);
        else if (key == "bend_candidates") cfg.bend_candidates = to_int(key, value);
        else if (key == "gn_tol") cfg.gn_tol = to_double(key, value);
        else if (key == "gn_max_iter") cfg.gn_max_iter = to_int(key, value);
        else if (key == "hysteresis_px") cfg.hysteresis_px = to_double(key, value);
        else if (key == "fps") cfg.fps = to_double(key, value);
        else if (key == "scale_nm_per_px")
            cfg.scale_nm_per_px = value == "none" ? std::nullopt
                                                  : std::optional<double>(to_double(key, value));
        else if (key == "roi") cfg.roi = to_roi(key, value);
        else if (key == "relocate_per_frame") cfg.relocate_per_frame = to_bool(key, value);
        else if (key == "min_area_frac") cfg.min_area_frac = to_double(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

PipelineConfig parse_pipeline_config(const std::filesystem::path& path) {
    return parse_pipeline_config_text(read_file(path));
}

SynthJob parse_synth_spec_text(const std::string& text) {
    SynthJob job;
    for (const auto& [key, value] : parse_kv(text)) {
        SceneSpec& s = job.scene;
        if (key == "width") s.width = to_int(key, value);
        else if (key == "height") s.height = to_int(key, value);
        else if (key == "top_pad") s.top_pad = to_roi(key, value);
        else if (key == "bottom_pad") s.bottom_pad = to_roi(key, value);
        else if (key == "beam_width_px") s.beam_width_px = to_double(key, value);
        else if (key == "beam_brightness") s.beam_brightness = to_int(key, value);
        else if (key == "pad_brightness") s.pad_brightness = to_int(key, value);
        else if (key == "background_level") s.background_level = to_int(key, value);
        else if (key == "fps") s.fps = to_double(key, value);
        else if (key == "scale_nm_per_px") s.scale_nm_per_px = to_double(key, value);
        else if (key == "trajectory") {
            if (value == "constant") s.trajectory.kind = TrajectoryKind::constant;
            else if (value == "square") s.trajectory.kind = TrajectoryKind::square_wave;
            else if (value == "sine") s.trajectory.kind = TrajectoryKind::sinusoid;
            else throw ConfigError("trajectory: expected constant | square | sine");
        }
        else if (key == "deflection_px") s.trajectory.deflection_px = to_double(key, value);
        else if (key == "amplitude_px") s.trajectory.amplitude_px = to_double(key, value);
        else if (key == "rate_hz") s.trajectory.rate_hz = to_double(key, value);
        else if (key == "skew_c1") s.trajectory.skew_c1 = to_double(key, value);
        else if (key == "salt_density") s.noise.salt_density = to_double(key, value);
        else if (key == "gaussian_sigma") s.noise.gaussian_sigma = to_double(key, value);
        else if (key == "streak_probability") s.noise.streak_probability = to_double(key, value);
        else if (key == "streak_length") s.noise.streak_length = to_int(key, value);
        else if (key == "motion_blur_frames") s.noise.motion_blur_frames = to_int(key, value);
        else if (key == "n_frames") job.n_frames = to_int(key, value);
        else if (key == "seed") job.seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key.rfind("metadata.", 0) == 0)
            s.frame_metadata[key.substr(9)] = value;
        else throw ConfigError("unknown synth key '" + key + "'");
    }
    if (job.n_frames < 1) throw ConfigError("n_frames must be >= 1");
    job.scene.validate();
    return job;
}

SynthJob parse_synth_spec(const std::filesystem::path& path) {
    return parse_synth_spec_text(read_file(path));
}

TrackContext make_track_context(const PipelineConfig& cfg, LocateResult location,
                                int frame_width) {
    TrackContext ctx{std::move(location), 0, 0, {}, {}, {}};
    ctx.track_row_begin = ctx.location.top_clamp.max_row + 1;
    ctx.track_row_end = ctx.location.bottom_clamp.min_row;
    ctx.denoise.mask_threshold = cfg.mask_threshold;
    ctx.continuity.margin = cfg.continuity_margin;
    ctx.continuity.doubling = cfg.continuity_doubling;
    ctx.band = make_parabola_config(ctx.location.line, frame_width, cfg.bend_candidates,
                                    cfg.separation_d);
    return ctx;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

FrameResult process_frame(const Frame& frame, const PipelineConfig& cfg,
                          const TrackContext& ctx, StageTimes* timers) {
    FrameResult result;
    DeflectionSample& s = result.sample;
    s.frame_index = frame.index;
    s.time_s = frame.timestamp_s;

    auto t0 = Clock::now();
    Frame denoised = denoise_mask(frame, ctx.denoise);
    if (timers) timers->denoise += seconds_since(t0);

    t0 = Clock::now();
    std::vector<TrackPoint> points = row_maxima(denoised);
    std::erase_if(points, [&](const TrackPoint& p) {
        return p.row < ctx.track_row_begin || p.row >= ctx.track_row_end;
    });
    if (timers) timers->maxima += seconds_since(t0);

    t0 = Clock::now();
    points = continuity_filter(points, ctx.continuity);
    if (timers) timers->continuity += seconds_since(t0);

    t0 = Clock::now();
    bool have_live = std::any_of(points.begin(), points.end(), [](const TrackPoint& p) {
        return p.status == PointStatus::candidate;
    });
    if (have_live) points = parabola_band_filter(points, ctx.band, ctx.location.line);
    if (timers) timers->parabola += seconds_since(t0);

    result.points = points;
    std::vector<TrackPoint> kept;
    for (const TrackPoint& p : points)
        if (p.status == PointStatus::kept) kept.push_back(p);
    s.point_count_kept = static_cast<int>(kept.size());

    t0 = Clock::now();
    try {
        s.fit = gauss_newton_fit(kept, ctx.location.line, cfg.gn_max_iter, cfg.gn_tol);
    } catch (const FitFailure&) {
        s.status = SampleStatus::fit_failed;
        if (timers) timers->fit += seconds_since(t0);
        return result;
    }
    if (timers) timers->fit += seconds_since(t0);
    if (!s.fit.converged) {
        s.status = SampleStatus::fit_failed;
        return result;
    }

    t0 = Clock::now();
    s.deflection_px = deflection(s.fit, ctx.location.line);
    if (frame.scale_nm_per_px)
        s.deflection_nm = to_nm(s.deflection_px, frame.scale_nm_per_px);
    s.status = SampleStatus::ok;
    if (timers) timers->analysis += seconds_since(t0);
    return result;
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");

    std::vector<std::pair<long long, fs::path>> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        fs::path p = e.path();
        std::string ext = p.extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (ext != ".png") continue;
        // order by the last digit run in the stem, name as tiebreak
        std::string stem = p.stem().string();
        long long number = -1;
        auto it = std::find_if(stem.rbegin(), stem.rend(),
                               [](unsigned char c) { return std::isdigit(c); });
        if (it != stem.rend()) {
            auto end = it.base();
            auto begin = end;
            while (begin != stem.begin() && std::isdigit(static_cast<unsigned char>(*(begin - 1))))
                --begin;
            number = std::stoll(std::string(begin, end));
        }
        entries.emplace_back(number, std::move(p));
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.filename().string() < b.second.filename().string();
    });

    std::vector<fs::path> out;
    out.reserve(entries.size());
    for (auto& [n, p] : entries) out.push_back(std::move(p));
    return out;
}

namespace {

Frame load_frame(const std::filesystem::path& path, const PipelineConfig& cfg, int index) {
    Frame f = to_grayscale(read_png(path));
    f.index = index;
    f.timestamp_s = index / cfg.fps;
    f.scale_nm_per_px = cfg.scale_nm_per_px;
    if (cfg.roi) {
        if (cfg.roi->x + cfg.roi->width > f.width() || cfg.roi->y + cfg.roi->height > f.height())
            throw ConfigError("roi exceeds the frame bounds");
        f = crop(f, *cfg.roi);
    }
    return f;
}

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

void draw_point(std::vector<std::uint8_t>& rgb, int w, int h, int row, int col,
                std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            int rr = row + dr, cc = col + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            std::size_t i = (static_cast<std::size_t>(rr) * w + cc) * 3;
            rgb[i] = r;
            rgb[i + 1] = g;
            rgb[i + 2] = b;
        }
    }
}

void write_overlay(const std::filesystem::path& path, const Frame& frame,
                   const FrameResult& res, const TrackContext& ctx) {
    const int w = frame.width(), h = frame.height();
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < frame.pixels().size(); ++i) {
        rgb[i * 3] = rgb[i * 3 + 1] = rgb[i * 3 + 2] = frame.pixels()[i];
    }

    const CentralLine& line = ctx.location.line;
    for (int r = static_cast<int>(std::ceil(line.top_row()));
         r <= static_cast<int>(std::floor(line.bottom_row())); ++r) {
        int c = static_cast<int>(std::lround(line.column_at(r)));
        if (c < 0 || c >= w) continue;
        std::size_t i = (static_cast<std::size_t>(r) * w + c) * 3;
        rgb[i] = 0;
        rgb[i + 1] = 200;
        rgb[i + 2] = 255;
    }

    for (const TrackPoint& p : res.points) {
        int col = static_cast<int>(std::lround(p.col));
        switch (p.status) {
            case PointStatus::kept: draw_point(rgb, w, h, p.row, col, 0, 255, 0); break;
            case PointStatus::removed_by_continuity:
                draw_point(rgb, w, h, p.row, col, 255, 60, 60);
                break;
            case PointStatus::removed_by_parabola:
                draw_point(rgb, w, h, p.row, col, 255, 170, 0);
                break;
            case PointStatus::candidate:
                draw_point(rgb, w, h, p.row, col, 130, 130, 255);
                break;
        }
    }

    if (res.sample.status == SampleStatus::ok) {
        for (int r = static_cast<int>(std::ceil(line.top_row()));
             r <= static_cast<int>(std::floor(line.bottom_row())); ++r) {
            int c = static_cast<int>(std::lround(model_eval(res.sample.fit, line, r)));
            if (c < 0 || c >= w) continue;
            std::size_t i = (static_cast<std::size_t>(r) * w + c) * 3;
            rgb[i] = 255;
            rgb[i + 1] = 255;
            rgb[i + 2] = 0;
        }
    }
    write_png_rgb(path, w, h, rgb);
}

void write_summary(const std::filesystem::path& path, const std::optional<WellReport>& rep,
                   int total, int ok) {
    nlohmann::json j;
    if (rep) {
        j["classification"] = to_string(rep->classification);
        j["crossing_count"] = rep->crossing_count;
        j["transition_rate_hz"] = rep->transition_rate_hz;
        j["mean_abs_deflection_px"] = rep->mean_abs_deflection_px;
        j["duration_s"] = rep->duration_s;
        j["dwell_mean_s_positive"] = rep->dwell_mean_s_positive;
        j["dwell_mean_s_negative"] = rep->dwell_mean_s_negative;
        j["fraction_positive"] = rep->fraction_positive;
        j["fraction_negative"] = rep->fraction_negative;
    } else {
        j["classification"] = to_string(WellClass::indeterminate);
    }
    j["ok_samples"] = ok;
    j["total_samples"] = total;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace

std::string csv_header() {
    return "frame,time_s,status,deflection_px,deflection_nm,c1,c2,c3,k,residual_rms,"
           "points_kept,iterations";
}

std::string csv_row(const DeflectionSample& s) {
    std::ostringstream row;
    row << s.frame_index << ',' << format_double(s.time_s, "%.4f") << ','
        << to_string(s.status) << ',';
    if (s.status == SampleStatus::ok) {
        row << format_double(s.deflection_px, "%.6f") << ',';
        if (s.deflection_nm) row << format_double(*s.deflection_nm, "%.6f");
        row << ',' << format_double(s.fit.c1, "%.6f") << ',' << format_double(s.fit.c2, "%.6f")
            << ',' << format_double(s.fit.c3, "%.6f") << ',' << format_double(s.fit.k, "%.8f")
            << ',' << format_double(s.fit.residual_rms, "%.6f") << ',' << s.point_count_kept
            << ',' << s.fit.iterations;
    } else {
        row << ",,,,,,," << s.point_count_kept << ',';
    }
    return row.str();
}

TrackOutput run_track(const TrackOptions& opts) {
    opts.config.validate();
    if (opts.threads < 1) throw ConfigError("threads must be >= 1");

    std::vector<std::filesystem::path> files = list_frames(opts.input_dir);
    if (files.empty()) throw IoError("no PNG frames in " + opts.input_dir.string());

    const int n = static_cast<int>(files.size());
    std::vector<FrameResult> results(n);
    std::vector<std::optional<TrackContext>> frame_ctx(opts.config.relocate_per_frame ? n : 0);

    std::optional<TrackContext> shared_ctx;
    if (!opts.config.relocate_per_frame) {
        // one central line per recording: first frame that locates wins
        for (int i = 0; i < n && !shared_ctx; ++i) {
            try {
                Frame f = load_frame(files[i], opts.config, i);
                std::int64_t min_area = static_cast<std::int64_t>(
                    opts.config.min_area_frac * f.width() * f.height());
                shared_ctx = make_track_context(
                    opts.config, locate_full(f, opts.config.blur_window, min_area), f.width());
            } catch (const LocateFailure&) {
            } catch (const DegenerateInput&) {
            }
        }
    }

    auto worker_body = [&](int i) {
        Frame f = load_frame(files[i], opts.config, i);
        const TrackContext* ctx = nullptr;
        std::optional<TrackContext> local;
        if (opts.config.relocate_per_frame) {
            try {
                std::int64_t min_area = static_cast<std::int64_t>(
                    opts.config.min_area_frac * f.width() * f.height());
                local = make_track_context(
                    opts.config, locate_full(f, opts.config.blur_window, min_area), f.width());
                ctx = &*local;
            } catch (const LocateFailure&) {
            } catch (const DegenerateInput&) {
            }
        } else if (shared_ctx) {
            ctx = &*shared_ctx;
        }

        if (!ctx) {
            results[i].sample.frame_index = i;
            results[i].sample.time_s = f.timestamp_s;
            results[i].sample.status = SampleStatus::locate_failed;
            return;
        }
        results[i] = process_frame(f, opts.config, *ctx);
        if (opts.overlay) {
            char name[32];
            std::snprintf(name, sizeof(name), "overlay_%05d.png", i);
            write_overlay(opts.output_dir / "overlays" / name, f, results[i], *ctx);
        }
    };

    std::filesystem::create_directories(opts.output_dir);
    if (opts.overlay) std::filesystem::create_directories(opts.output_dir / "overlays");

    if (opts.threads == 1) {
        for (int i = 0; i < n; ++i) worker_body(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        std::atomic<bool> failed{false};
        std::string error_message;
        std::mutex error_mutex;
        for (int t = 0; t < opts.threads; ++t) {
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        worker_body(i);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        failed = true;
                        if (error_message.empty()) error_message = e.what();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failed) throw IoError(error_message);
    }

    TrackOutput out;
    out.samples.reserve(n);
    for (const FrameResult& r : results) {
        out.samples.push_back(r.sample);
        if (r.sample.status == SampleStatus::ok) ++out.frames_ok;
    }

    std::ofstream csv(opts.output_dir / "results.csv");
    if (!csv) throw IoError("cannot write results.csv");
    csv << csv_header() << "\n";
    for (const DeflectionSample& s : out.samples) csv << csv_row(s) << "\n";
    csv.close();

    if (out.frames_ok >= 2) {
        try {
            out.report = classify_wells(out.samples, opts.config.fps, opts.config.hysteresis_px);
        } catch (const DegenerateInput&) {
        }
    }
    write_summary(opts.output_dir / "summary.json", out.report, n, out.frames_ok);
    return out;
}

BenchReport run_bench(const std::filesystem::path& input_dir, const PipelineConfig& cfg) {
    cfg.validate();
    std::vector<std::filesystem::path> files = list_frames(input_dir);
    if (files.empty()) throw IoError("no PNG frames in " + input_dir.string());

    BenchReport rep;
    rep.frames = static_cast<int>(files.size());

    std::vector<Frame> frames;
    frames.reserve(files.size());
    auto t0 = Clock::now();
    for (int i = 0; i < rep.frames; ++i) frames.push_back(load_frame(files[i], cfg, i));
    rep.decode_s = seconds_since(t0);

    t0 = Clock::now();
    std::optional<TrackContext> ctx;
    for (const Frame& f : frames) {
        try {
            std::int64_t min_area =
                static_cast<std::int64_t>(cfg.min_area_frac * f.width() * f.height());
            ctx = make_track_context(cfg, locate_full(f, cfg.blur_window, min_area), f.width());
            break;
        } catch (const LocateFailure&) {
        } catch (const DegenerateInput&) {
        }
    }
    rep.locate_s = seconds_since(t0);
    if (!ctx) throw LocateFailure("bench: no frame in " + input_dir.string() + " locates");

    for (const Frame& f : frames) process_frame(f, cfg, *ctx, &rep.stages);
    return rep;
}

}  // namespace beamtrack
