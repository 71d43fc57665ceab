#pragma once

#include <filesystem>

#include "beamtrack/image.hpp"

namespace beamtrack {

// Decodes an 8-bit grayscale or 24-bit RGB PNG. Anything else (palette,
// 16-bit, alpha) is rejected as an unsupported format.
RawImage read_png(const std::filesystem::path& path);

void write_png_gray(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels);

void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

}  // namespace beamtrack
