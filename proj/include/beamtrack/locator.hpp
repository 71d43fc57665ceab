#pragma once

#include <utility>
#include <vector>

#include "beamtrack/image.hpp"

namespace beamtrack {

struct PixelCoord {
    int row = 0;
    int col = 0;
    bool operator==(const PixelCoord&) const = default;
};

// One 8-connected foreground component, kept as its full pixel set (the
// pipeline only needs areas and centers, not boundary chains).
struct Contour {
    std::vector<PixelCoord> pixels;
    std::int64_t area = 0;
    double centroid_row = 0.0;
    double centroid_col = 0.0;
    int min_row = 0, max_row = 0, min_col = 0, max_col = 0;  // bounding box
};

// Segment joining the two clamp centers; the deflection datum.
class CentralLine {
public:
    CentralLine(double top_row, double top_col, double bottom_row, double bottom_col);

    double top_row() const { return top_row_; }
    double top_col() const { return top_col_; }
    double bottom_row() const { return bottom_row_; }
    double bottom_col() const { return bottom_col_; }
    double length_px() const { return length_px_; }

    // Column of the line at a given row (linear interpolation, extrapolates
    // beyond the endpoints).
    double column_at(double row) const {
        return top_col_ + (row - top_row_) * (bottom_col_ - top_col_) / (bottom_row_ - top_row_);
    }

    // Ratio of vertical extent to length; converts a column offset into an
    // orthogonal distance.
    double orthogonal_factor() const { return (bottom_row_ - top_row_) / length_px_; }

private:
    double top_row_, top_col_, bottom_row_, bottom_col_;
    double length_px_;
};

// All 8-connected foreground components, largest area first (ties by
// topmost, then leftmost bounding box corner).
std::vector<Contour> find_contours(const BinaryImage& bin);

// Picks the clamp pads: among contours with area >= min_area, the one with
// the smallest centroid row and the one with the largest. Throws
// LocateFailure if fewer than two qualify.
std::pair<Contour, Contour> select_clamps(const std::vector<Contour>& contours,
                                          std::int64_t min_area);

CentralLine central_line(const Contour& top, const Contour& bottom);

struct LocateResult {
    CentralLine line;
    Contour top_clamp;
    Contour bottom_clamp;
};

// blur -> otsu -> binarize -> contours -> clamp selection. min_area < 0
// means "2% of the frame's pixel count".
LocateResult locate_full(const Frame& frame, int blur_window = 3, std::int64_t min_area = -1);

CentralLine locate(const Frame& frame, int blur_window = 3, std::int64_t min_area = -1);

}  // namespace beamtrack
