#pragma once

#include <vector>

#include "beamtrack/image.hpp"
#include "beamtrack/locator.hpp"

namespace beamtrack {

enum class PointStatus {
    candidate,
    removed_by_continuity,
    removed_by_parabola,
    kept,
};

// One per-row beam candidate: row is the independent variable, column the
// dependent one. At most one point per row. row_maxima produces integral
// columns; the type is real-valued so exact model samples can flow through
// the fitter.
struct TrackPoint {
    int row = 0;
    double col = 0.0;
    std::uint8_t intensity = 0;
    PointStatus status = PointStatus::candidate;
};

struct ContinuityConfig {
    int margin = 3;       // cone half-width per row of gap
    bool doubling = true; // margin doubles after each consecutive removal

    void validate() const;
};

struct ParabolaBandConfig {
    double separation_d = 10.0;          // gap between the two bounding parabolas
    std::vector<double> bend_candidates; // quadratic coefficients to scan
    double vertex_row = 0.0;             // row of the parabola apex

    void validate() const;
};

// Candidate coefficients whose apex offsets sweep [-max_apex_offset,
// +max_apex_offset] uniformly. vertex_row defaults to mid-span of the line.
ParabolaBandConfig make_parabola_config(const CentralLine& line, double patch_width,
                                        int candidate_count = 41, double separation_d = 10.0);

// Brightest column of each row (ties toward the smaller column); all-zero
// rows emit nothing.
std::vector<TrackPoint> row_maxima(const Frame& frame);

// Cone-of-safety outlier rejection, run from the top row downward and from
// the bottom row upward; a point survives only if both passes accept it.
// Input must be sorted by row. Returns the full list annotated; points
// already removed by an earlier stage pass through untouched.
std::vector<TrackPoint> continuity_filter(const std::vector<TrackPoint>& points,
                                          const ContinuityConfig& cfg);

// Scans cfg.bend_candidates for the parabola whose band of width
// separation_d around x(y) = line_col(y) + a*(y - top_row)*(y - bottom_row)
// holds the most candidates; everything outside the winning band is
// removed. Ties prefer the least-bent candidate (smaller |a|, then smaller
// a). Survivors are marked kept.
std::vector<TrackPoint> parabola_band_filter(const std::vector<TrackPoint>& points,
                                             const ParabolaBandConfig& cfg,
                                             const CentralLine& line);

// Column of the band's center parabola at a given row.
double parabola_column(const CentralLine& line, double bend, double vertex_row, double row);

// Winning bend coefficient of the last scan (same selection logic exposed
// for diagnostics / tests).
double parabola_band_best_bend(const std::vector<TrackPoint>& points,
                               const ParabolaBandConfig& cfg, const CentralLine& line);

// Points that are still alive (candidate or kept).
std::vector<TrackPoint> survivors(const std::vector<TrackPoint>& points);

}  // namespace beamtrack
