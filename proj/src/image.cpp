#include "beamtrack/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace beamtrack {

namespace {

void copy_meta(Frame& dst, const Frame& src) {
    dst.scale_nm_per_px = src.scale_nm_per_px;
    dst.index = src.index;
    dst.timestamp_s = src.timestamp_s;
    dst.metadata = src.metadata;
}

}  // namespace

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ < 1 || height_ < 1)
        throw std::invalid_argument("Frame: dimensions must be at least 1x1");
    if (pixels_.size() != static_cast<std::size_t>(width_) * height_)
        throw std::invalid_argument("Frame: pixel count does not match dimensions");
}

void DenoiseConfig::validate() const {
    if (kernel_rows < 1 || kernel_cols < 1)
        throw ConfigError("DenoiseConfig: kernel dimensions must be positive");
    if (normalizer != kernel_rows * kernel_cols)
        throw ConfigError("DenoiseConfig: normalizer must equal kernel_rows * kernel_cols");
    if (mask_threshold < 0 || mask_threshold > 255)
        throw ConfigError("DenoiseConfig: mask_threshold must be in [0,255]");
}

Frame to_grayscale(const RawImage& raw) {
    if (raw.channels != 1 && raw.channels != 3)
        throw std::invalid_argument("to_grayscale: expected 1 or 3 channels, got " +
                                    std::to_string(raw.channels));
    if (raw.data.size() != static_cast<std::size_t>(raw.width) * raw.height * raw.channels)
        throw std::invalid_argument("to_grayscale: data size does not match dimensions");

    if (raw.channels == 1)
        return Frame(raw.width, raw.height, raw.data);

    std::vector<std::uint8_t> gray(static_cast<std::size_t>(raw.width) * raw.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const std::uint8_t* p = &raw.data[i * 3];
        double y = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        gray[i] = static_cast<std::uint8_t>(std::lround(y));
    }
    return Frame(raw.width, raw.height, std::move(gray));
}

Frame crop(const Frame& frame, const Roi& roi) {
    if (roi.width < 1 || roi.height < 1)
        throw std::invalid_argument("crop: roi must be at least 1x1");
    if (roi.x < 0 || roi.y < 0 || roi.x + roi.width > frame.width() ||
        roi.y + roi.height > frame.height())
        throw std::invalid_argument("crop: roi exceeds frame bounds");

    std::vector<std::uint8_t> out(static_cast<std::size_t>(roi.width) * roi.height);
    for (int r = 0; r < roi.height; ++r) {
        const std::uint8_t* src = &frame.pixels()[static_cast<std::size_t>(roi.y + r) * frame.width() + roi.x];
        std::copy(src, src + roi.width, &out[static_cast<std::size_t>(r) * roi.width]);
    }
    Frame result(roi.width, roi.height, std::move(out));
    copy_meta(result, frame);
    return result;
}

Frame median_blur(const Frame& frame, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("median_blur: window must be odd and positive");
    if (window == 1)
        return frame;

    const int w = frame.width(), h = frame.height(), half = window / 2;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h);
    std::vector<std::uint8_t> win;
    win.reserve(static_cast<std::size_t>(window) * window);
    for (int r = 0; r < h; ++r) {
        const int r0 = std::max(0, r - half), r1 = std::min(h - 1, r + half);
        for (int c = 0; c < w; ++c) {
            const int c0 = std::max(0, c - half), c1 = std::min(w - 1, c + half);
            win.clear();
            for (int rr = r0; rr <= r1; ++rr)
                for (int cc = c0; cc <= c1; ++cc)
                    win.push_back(frame.at(rr, cc));
            auto mid = win.begin() + win.size() / 2;
            std::nth_element(win.begin(), mid, win.end());
            out[static_cast<std::size_t>(r) * w + c] = *mid;
        }
    }
    Frame result(w, h, std::move(out));
    copy_meta(result, frame);
    return result;
}

namespace {

// Intra-class sum of squared deviations for one threshold, as an exact
// rational scaled/den pair so candidate thresholds compare without
// floating-point ties. num/den = n_bg*var_bg + n_fg*var_fg.
struct ObjectiveValue {
    __int128 num = 0;
    std::int64_t den = 1;
};

ObjectiveValue intra_class_objective(std::int64_t n_bg, std::int64_t s_bg, std::int64_t q_bg,
                                     std::int64_t n_fg, std::int64_t s_fg, std::int64_t q_fg) {
    // per class: sum (p - mean)^2 = q - s^2/n, i.e. (n*q - s^2) / n
    ObjectiveValue v;
    if (n_bg > 0 && n_fg > 0) {
        v.num = static_cast<__int128>(n_fg) * (n_bg * q_bg - s_bg * s_bg) +
                static_cast<__int128>(n_bg) * (n_fg * q_fg - s_fg * s_fg);
        v.den = n_bg * n_fg;
    } else if (n_bg > 0) {
        v.num = static_cast<__int128>(n_bg) * q_bg - static_cast<__int128>(s_bg) * s_bg;
        v.den = n_bg;
    } else if (n_fg > 0) {
        v.num = static_cast<__int128>(n_fg) * q_fg - static_cast<__int128>(s_fg) * s_fg;
        v.den = n_fg;
    }
    return v;
}

bool less_than(const ObjectiveValue& a, const ObjectiveValue& b) {
    return a.num * b.den < b.num * a.den;
}

}  // namespace

int otsu_threshold(const Frame& frame) {
    std::array<std::int64_t, 256> hist{};
    for (std::uint8_t p : frame.pixels()) ++hist[p];

    int distinct = 0;
    for (auto c : hist)
        if (c) ++distinct;
    if (distinct < 2)
        throw DegenerateInput("otsu_threshold: constant image has no valid split");

    // prefix sums over the histogram; background = pixels < t
    std::int64_t n_total = static_cast<std::int64_t>(frame.pixels().size());
    std::int64_t s_total = 0, q_total = 0;
    for (int v = 0; v < 256; ++v) {
        s_total += hist[v] * v;
        q_total += hist[v] * v * v;
    }

    int best_t = 1;
    ObjectiveValue best{};
    std::int64_t n_bg = 0, s_bg = 0, q_bg = 0;
    bool have_best = false;
    for (int t = 1; t <= 255; ++t) {
        n_bg += hist[t - 1];
        s_bg += hist[t - 1] * (t - 1);
        q_bg += hist[t - 1] * (t - 1) * (t - 1);
        ObjectiveValue obj = intra_class_objective(n_bg, s_bg, q_bg, n_total - n_bg,
                                                   s_total - s_bg, q_total - q_bg);
        if (!have_best || less_than(obj, best)) {
            best = obj;
            best_t = t;
            have_best = true;
        }
    }
    return best_t;
}

BinaryImage binarize(const Frame& frame, int threshold) {
    if (threshold < 1 || threshold > 255)
        throw std::invalid_argument("binarize: threshold must be in [1,255]");
    BinaryImage out;
    out.width = frame.width();
    out.height = frame.height();
    out.bits.resize(frame.pixels().size());
    for (std::size_t i = 0; i < out.bits.size(); ++i)
        out.bits[i] = frame.pixels()[i] >= threshold ? 1 : 0;
    return out;
}

std::vector<std::int64_t> window_sums(const Frame& frame, const DenoiseConfig& cfg) {
    cfg.validate();
    const int w = frame.width(), h = frame.height();
    if (h < cfg.kernel_rows || w < cfg.kernel_cols)
        throw std::invalid_argument("window_sums: frame smaller than kernel");

    // integral image; out-of-bounds window cells contribute zero
    std::vector<std::int64_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int r = 0; r < h; ++r) {
        std::int64_t row_sum = 0;
        for (int c = 0; c < w; ++c) {
            row_sum += frame.at(r, c);
            integral[static_cast<std::size_t>(r + 1) * (w + 1) + c + 1] =
                integral[static_cast<std::size_t>(r) * (w + 1) + c + 1] + row_sum;
        }
    }
    auto rect_sum = [&](int r0, int c0, int r1, int c1) {  // half-open [r0,r1) x [c0,c1)
        r0 = std::max(r0, 0); c0 = std::max(c0, 0);
        r1 = std::min(r1, h); c1 = std::min(c1, w);
        return integral[static_cast<std::size_t>(r1) * (w + 1) + c1] -
               integral[static_cast<std::size_t>(r0) * (w + 1) + c1] -
               integral[static_cast<std::size_t>(r1) * (w + 1) + c0] +
               integral[static_cast<std::size_t>(r0) * (w + 1) + c0];
    };

    const int hr = cfg.kernel_rows / 2, hc = cfg.kernel_cols / 2;
    std::vector<std::int64_t> sums(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            sums[static_cast<std::size_t>(r) * w + c] =
                rect_sum(r - hr, c - hc, r - hr + cfg.kernel_rows, c - hc + cfg.kernel_cols);
    return sums;
}

Frame neighborhood_sum(const Frame& frame, const DenoiseConfig& cfg) {
    std::vector<std::int64_t> sums = window_sums(frame, cfg);
    std::vector<std::uint8_t> out(sums.size());
    const std::int64_t norm = cfg.normalizer;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        std::int64_t v = (2 * sums[i] + norm) / (2 * norm);  // round half up
        out[i] = static_cast<std::uint8_t>(std::min<std::int64_t>(v, 255));
    }
    Frame result(frame.width(), frame.height(), std::move(out));
    copy_meta(result, frame);
    return result;
}

Frame denoise_mask(const Frame& frame, const DenoiseConfig& cfg) {
    Frame sums = neighborhood_sum(frame, cfg);
    std::vector<std::uint8_t> out(frame.pixels().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = sums.pixels()[i] >= cfg.mask_threshold ? frame.pixels()[i] : 0;
    Frame result(frame.width(), frame.height(), std::move(out));
    copy_meta(result, frame);
    return result;
}

}  // namespace beamtrack
