#include "beamtrack/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace beamtrack {

std::string to_string(SampleStatus s) {
    switch (s) {
        case SampleStatus::ok: return "ok";
        case SampleStatus::locate_failed: return "locate_failed";
        case SampleStatus::fit_failed: return "fit_failed";
    }
    return "unknown";
}

std::string to_string(WellClass c) {
    switch (c) {
        case WellClass::intra_well: return "intra-well";
        case WellClass::inter_well: return "inter-well";
        case WellClass::indeterminate: return "indeterminate";
    }
    return "unknown";
}

double deflection(const BeamFit& fit, const CentralLine& line) {
    if (!fit.converged)
        throw std::invalid_argument("deflection: fit did not converge");
    const int r0 = static_cast<int>(std::ceil(line.top_row()));
    const int r1 = static_cast<int>(std::floor(line.bottom_row()));
    double best = 0.0;
    for (int r = r0; r <= r1; ++r) {
        double off = model_offset(fit, line, r);
        if (std::abs(off) > std::abs(best)) best = off;
    }
    return best * line.orthogonal_factor();
}

WellReport classify_wells(const std::vector<DeflectionSample>& samples, double fps,
                          double hysteresis_px) {
    if (fps <= 0) throw std::invalid_argument("classify_wells: fps must be positive");
    if (hysteresis_px < 0) throw std::invalid_argument("classify_wells: hysteresis must be >= 0");

    std::vector<const DeflectionSample*> ok;
    for (const auto& s : samples)
        if (s.status == SampleStatus::ok) ok.push_back(&s);
    if (ok.size() < 2)
        throw DegenerateInput("classify_wells: need at least 2 ok samples, got " +
                              std::to_string(ok.size()));

    WellReport rep;
    rep.ok_samples = static_cast<int>(ok.size());
    rep.total_samples = static_cast<int>(samples.size());
    rep.duration_s = ok.back()->time_s - ok.front()->time_s + 1.0 / fps;

    double abs_sum = 0.0;
    int side = 0;  // confirmed side: -1, 0 (none yet), +1
    double last_cross_t = ok.front()->time_s;
    double dwell_sum[2] = {0.0, 0.0};  // [negative, positive]
    int dwell_n[2] = {0, 0};
    int side_count[2] = {0, 0};
    for (const DeflectionSample* s : ok) {
        abs_sum += std::abs(s->deflection_px);
        if (std::abs(s->deflection_px) > hysteresis_px) {
            int new_side = s->deflection_px > 0 ? 1 : -1;
            if (side == 0) {
                side = new_side;
                last_cross_t = s->time_s;
            } else if (new_side != side) {
                ++rep.crossing_count;
                dwell_sum[side > 0] += s->time_s - last_cross_t;
                ++dwell_n[side > 0];
                last_cross_t = s->time_s;
                side = new_side;
            }
        }
        if (side > 0) ++side_count[1];
        else if (side < 0) ++side_count[0];
    }
    rep.mean_abs_deflection_px = abs_sum / static_cast<double>(ok.size());
    rep.transition_rate_hz = rep.crossing_count / (2.0 * rep.duration_s);
    rep.dwell_mean_s_positive = dwell_n[1] ? dwell_sum[1] / dwell_n[1] : 0.0;
    rep.dwell_mean_s_negative = dwell_n[0] ? dwell_sum[0] / dwell_n[0] : 0.0;
    rep.fraction_positive = static_cast<double>(side_count[1]) / ok.size();
    rep.fraction_negative = static_cast<double>(side_count[0]) / ok.size();

    if (rep.crossing_count >= 2)
        rep.classification = WellClass::inter_well;
    else if (rep.crossing_count == 0 && rep.mean_abs_deflection_px > hysteresis_px)
        rep.classification = WellClass::intra_well;
    else
        rep.classification = WellClass::indeterminate;
    return rep;
}

double to_nm(double px, std::optional<double> scale_nm_per_px) {
    if (!scale_nm_per_px.has_value())
        throw std::invalid_argument("to_nm: no pixel scale available");
    if (*scale_nm_per_px <= 0)
        throw std::invalid_argument("to_nm: scale must be positive");
    return px * *scale_nm_per_px;
}

}  // namespace beamtrack
