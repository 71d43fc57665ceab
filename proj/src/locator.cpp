#include "beamtrack/locator.hpp"

#include <algorithm>
#include <cmath>

namespace beamtrack {

CentralLine::CentralLine(double top_row, double top_col, double bottom_row, double bottom_col)
    : top_row_(top_row), top_col_(top_col), bottom_row_(bottom_row), bottom_col_(bottom_col) {
    if (!(top_row_ < bottom_row_))
        throw std::invalid_argument("CentralLine: top row must be above bottom row");
    length_px_ = std::hypot(bottom_row_ - top_row_, bottom_col_ - top_col_);
}

std::vector<Contour> find_contours(const BinaryImage& bin) {
    const int w = bin.width, h = bin.height;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);
    std::vector<Contour> contours;
    std::vector<PixelCoord> stack;

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!bin.at(r, c) || visited[static_cast<std::size_t>(r) * w + c]) continue;

            Contour contour;
            stack.clear();
            stack.push_back({r, c});
            visited[static_cast<std::size_t>(r) * w + c] = 1;
            std::int64_t sum_r = 0, sum_c = 0;
            contour.min_row = contour.max_row = r;
            contour.min_col = contour.max_col = c;
            while (!stack.empty()) {
                PixelCoord p = stack.back();
                stack.pop_back();
                contour.pixels.push_back(p);
                sum_r += p.row;
                sum_c += p.col;
                contour.min_row = std::min(contour.min_row, p.row);
                contour.max_row = std::max(contour.max_row, p.row);
                contour.min_col = std::min(contour.min_col, p.col);
                contour.max_col = std::max(contour.max_col, p.col);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        int rr = p.row + dr, cc = p.col + dc;
                        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                        std::size_t idx = static_cast<std::size_t>(rr) * w + cc;
                        if (bin.bits[idx] && !visited[idx]) {
                            visited[idx] = 1;
                            stack.push_back({rr, cc});
                        }
                    }
                }
            }
            contour.area = static_cast<std::int64_t>(contour.pixels.size());
            contour.centroid_row = static_cast<double>(sum_r) / contour.area;
            contour.centroid_col = static_cast<double>(sum_c) / contour.area;
            contours.push_back(std::move(contour));
        }
    }

    std::stable_sort(contours.begin(), contours.end(), [](const Contour& a, const Contour& b) {
        if (a.area != b.area) return a.area > b.area;
        if (a.min_row != b.min_row) return a.min_row < b.min_row;
        return a.min_col < b.min_col;
    });
    return contours;
}

std::pair<Contour, Contour> select_clamps(const std::vector<Contour>& contours,
                                          std::int64_t min_area) {
    std::vector<const Contour*> qualifying;
    for (const Contour& c : contours)
        if (c.area >= min_area) qualifying.push_back(&c);
    if (qualifying.size() < 2)
        throw LocateFailure("select_clamps: found " + std::to_string(qualifying.size()) +
                            " contour(s) above the area minimum, need 2");

    auto by_row = [](const Contour* a, const Contour* b) {
        return a->centroid_row < b->centroid_row;
    };
    const Contour* top = *std::min_element(qualifying.begin(), qualifying.end(), by_row);
    const Contour* bottom = *std::max_element(qualifying.begin(), qualifying.end(), by_row);
    return {*top, *bottom};
}

CentralLine central_line(const Contour& top, const Contour& bottom) {
    if (!(top.centroid_row < bottom.centroid_row))
        throw std::invalid_argument("central_line: top centroid must be above bottom centroid");
    return CentralLine(top.centroid_row, top.centroid_col, bottom.centroid_row,
                       bottom.centroid_col);
}

LocateResult locate_full(const Frame& frame, int blur_window, std::int64_t min_area) {
    if (min_area < 0)
        min_area = static_cast<std::int64_t>(
            0.02 * static_cast<double>(frame.width()) * frame.height());

    Frame blurred = median_blur(frame, blur_window);
    int t = otsu_threshold(blurred);
    BinaryImage bin = binarize(blurred, t);
    std::vector<Contour> contours = find_contours(bin);
    auto [top, bottom] = select_clamps(contours, min_area);
    CentralLine line = central_line(top, bottom);
    return LocateResult{line, std::move(top), std::move(bottom)};
}

CentralLine locate(const Frame& frame, int blur_window, std::int64_t min_area) {
    return locate_full(frame, blur_window, min_area).line;
}

}  // namespace beamtrack
