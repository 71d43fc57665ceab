#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beamtrack/errors.hpp"

namespace beamtrack {

// Interleaved 8-bit image straight out of the decoder, 1 or 3 channels.
struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;  // row-major, channel-interleaved
};

// One grayscale video frame plus its acquisition metadata.
class Frame {
public:
    Frame() = default;
    Frame(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

    std::uint8_t at(int row, int col) const { return pixels_[static_cast<std::size_t>(row) * width_ + col]; }
    std::uint8_t& at(int row, int col) { return pixels_[static_cast<std::size_t>(row) * width_ + col]; }

    std::optional<double> scale_nm_per_px;
    int index = 0;
    double timestamp_s = 0.0;
    std::map<std::string, std::string> metadata;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

// Foreground/background split of a frame.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 = background, 1 = foreground

    bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
};

// Rectangular region, x = column of left edge, y = row of top edge.
struct Roi {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

// Box kernel for the neighborhood-sum denoiser. The 7x3 shape favors
// vertically continuous structures over isolated speckle.
struct DenoiseConfig {
    int kernel_rows = 7;
    int kernel_cols = 3;
    int normalizer = 21;  // must equal kernel_rows * kernel_cols
    int mask_threshold = 20;

    void validate() const;
};

// Collapses 1- or 3-channel data to grayscale (Rec.601 luma for RGB).
Frame to_grayscale(const RawImage& raw);

Frame crop(const Frame& frame, const Roi& roi);

// Median of the window x window neighborhood; windows truncated at the
// frame border (median = sorted[n/2] of the in-bounds samples).
Frame median_blur(const Frame& frame, int window);

// Threshold in [1,255] minimizing population-weighted intra-class variance;
// ties resolved toward the smallest threshold. Throws DegenerateInput on a
// constant image.
int otsu_threshold(const Frame& frame);

// pixel >= t -> foreground.
BinaryImage binarize(const Frame& frame, int threshold);

// Raw (unnormalized) box-window sums with zero padding, one per pixel.
// Exposed separately so the normalizer-free linearity of the kernel can be
// checked without rounding in the way.
std::vector<std::int64_t> window_sums(const Frame& frame, const DenoiseConfig& cfg);

// Box-kernel mean per pixel, rounded half-up, clamped to [0,255].
Frame neighborhood_sum(const Frame& frame, const DenoiseConfig& cfg);

// Keeps pixels whose neighborhood mean reaches cfg.mask_threshold, zeroes
// the rest.
Frame denoise_mask(const Frame& frame, const DenoiseConfig& cfg);

}  // namespace beamtrack
