#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beamtrack/fitter.hpp"

namespace beamtrack {

enum class SampleStatus { ok, locate_failed, fit_failed };

std::string to_string(SampleStatus s);

// One frame's tracking outcome.
struct DeflectionSample {
    int frame_index = 0;
    double time_s = 0.0;
    double deflection_px = 0.0;  // signed; positive = right of the central line
    std::optional<double> deflection_nm;
    BeamFit fit;
    int point_count_kept = 0;
    SampleStatus status = SampleStatus::ok;
};

enum class WellClass { intra_well, inter_well, indeterminate };

std::string to_string(WellClass c);

// Series-level classification of the motion between the two buckled states.
struct WellReport {
    WellClass classification = WellClass::indeterminate;
    int crossing_count = 0;
    double transition_rate_hz = 0.0;  // crossing_count / (2 * duration_s)
    double mean_abs_deflection_px = 0.0;
    double duration_s = 0.0;
    double dwell_mean_s_positive = 0.0;  // mean time between confirmed crossings, per side
    double dwell_mean_s_negative = 0.0;
    double fraction_positive = 0.0;      // fraction of ok samples on each confirmed side
    double fraction_negative = 0.0;
    int ok_samples = 0;
    int total_samples = 0;
};

// Signed offset of maximum magnitude between the fitted curve and the
// central line, scanned one sample per pixel row and converted from a
// column offset to an orthogonal distance.
double deflection(const BeamFit& fit, const CentralLine& line);

// Counts centerline crossings with hysteresis: a crossing registers only
// once |deflection| exceeds hysteresis_px on the new side. Needs at least
// two ok samples.
WellReport classify_wells(const std::vector<DeflectionSample>& samples, double fps,
                          double hysteresis_px);

double to_nm(double px, std::optional<double> scale_nm_per_px);

}  // namespace beamtrack
