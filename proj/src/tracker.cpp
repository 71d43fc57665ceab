#include "beamtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace beamtrack {

void ContinuityConfig::validate() const {
    if (margin < 1) throw ConfigError("ContinuityConfig: margin must be >= 1");
}

void ParabolaBandConfig::validate() const {
    if (!(separation_d > 0)) throw ConfigError("ParabolaBandConfig: separation_d must be > 0");
    if (bend_candidates.empty())
        throw ConfigError("ParabolaBandConfig: bend_candidates must be non-empty");
}

ParabolaBandConfig make_parabola_config(const CentralLine& line, double patch_width,
                                        int candidate_count, double separation_d) {
    if (candidate_count < 1) throw ConfigError("make_parabola_config: candidate_count must be >= 1");
    ParabolaBandConfig cfg;
    cfg.separation_d = separation_d;
    cfg.vertex_row = 0.5 * (line.top_row() + line.bottom_row());
    double half_span = std::max(cfg.vertex_row - line.top_row(), line.bottom_row() - cfg.vertex_row);
    double max_apex = patch_width / 2.0;
    cfg.bend_candidates.reserve(candidate_count);
    for (int i = 0; i < candidate_count; ++i) {
        double apex = candidate_count == 1
                          ? 0.0
                          : -max_apex + i * (2.0 * max_apex) / (candidate_count - 1);
        cfg.bend_candidates.push_back(-apex / (half_span * half_span));
    }
    return cfg;
}

std::vector<TrackPoint> row_maxima(const Frame& frame) {
    std::vector<TrackPoint> points;
    points.reserve(frame.height());
    for (int r = 0; r < frame.height(); ++r) {
        int best_col = -1;
        std::uint8_t best_val = 0;
        for (int c = 0; c < frame.width(); ++c) {
            std::uint8_t v = frame.at(r, c);
            if (v > best_val) {
                best_val = v;
                best_col = c;
            }
        }
        if (best_col >= 0)
            points.push_back(TrackPoint{r, static_cast<double>(best_col), best_val,
                                        PointStatus::candidate});
    }
    return points;
}

namespace {

// One directional pass of the cone-of-safety filter over live points in the
// given order. Returns the accepted indices (into the sequence).
std::set<std::size_t> cone_pass(const std::vector<const TrackPoint*>& seq,
                                const ContinuityConfig& cfg) {
    std::set<std::size_t> accepted;
    const TrackPoint* last = nullptr;
    double margin = cfg.margin;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const TrackPoint* p = seq[i];
        if (last == nullptr) {
            accepted.insert(i);
            last = p;
            continue;
        }
        double gap = std::abs(static_cast<double>(p->row) - last->row);
        if (std::abs(p->col - last->col) <= margin * gap) {
            accepted.insert(i);
            last = p;
            margin = cfg.margin;
        } else if (cfg.doubling) {
            margin *= 2;
        }
    }
    return accepted;
}

}  // namespace

std::vector<TrackPoint> continuity_filter(const std::vector<TrackPoint>& points,
                                          const ContinuityConfig& cfg) {
    cfg.validate();
    std::vector<TrackPoint> out = points;

    std::vector<const TrackPoint*> live;
    std::vector<std::size_t> live_idx;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].status == PointStatus::candidate) {
            live.push_back(&points[i]);
            live_idx.push_back(i);
        }
    }
    if (live.empty()) return out;

    std::set<std::size_t> down = cone_pass(live, cfg);
    std::vector<const TrackPoint*> reversed(live.rbegin(), live.rend());
    std::set<std::size_t> up_rev = cone_pass(reversed, cfg);

    for (std::size_t i = 0; i < live.size(); ++i) {
        bool keep = down.count(i) && up_rev.count(live.size() - 1 - i);
        if (!keep) out[live_idx[i]].status = PointStatus::removed_by_continuity;
    }
    return out;
}

double parabola_column(const CentralLine& line, double bend, double vertex_row, double row) {
    // Parabola with apex at vertex_row, anchored so its offset from the line
    // vanishes at the farther clamp row (both clamps when the vertex sits at
    // mid-span).
    double half_span = std::max(vertex_row - line.top_row(), line.bottom_row() - vertex_row);
    double dy = row - vertex_row;
    return line.column_at(row) + bend * (dy * dy - half_span * half_span);
}

namespace {

std::size_t count_in_band(const std::vector<const TrackPoint*>& pts, const CentralLine& line,
                          double bend, double vertex_row, double half_d) {
    std::size_t n = 0;
    for (const TrackPoint* p : pts)
        if (std::abs(p->col - parabola_column(line, bend, vertex_row, p->row)) <= half_d) ++n;
    return n;
}

double best_bend(const std::vector<const TrackPoint*>& pts, const ParabolaBandConfig& cfg,
                 const CentralLine& line) {
    double half_d = cfg.separation_d / 2.0;
    double winner = cfg.bend_candidates.front();
    std::size_t winner_count = 0;
    bool first = true;
    for (double a : cfg.bend_candidates) {
        std::size_t n = count_in_band(pts, line, a, cfg.vertex_row, half_d);
        bool better = first || n > winner_count ||
                      (n == winner_count && (std::abs(a) < std::abs(winner) ||
                                             (std::abs(a) == std::abs(winner) && a < winner)));
        if (better) {
            winner = a;
            winner_count = n;
            first = false;
        }
    }
    return winner;
}

}  // namespace

double parabola_band_best_bend(const std::vector<TrackPoint>& points,
                               const ParabolaBandConfig& cfg, const CentralLine& line) {
    cfg.validate();
    std::vector<const TrackPoint*> live;
    for (const TrackPoint& p : points)
        if (p.status == PointStatus::candidate) live.push_back(&p);
    if (live.empty()) throw std::invalid_argument("parabola_band: no live points");
    return best_bend(live, cfg, line);
}

std::vector<TrackPoint> parabola_band_filter(const std::vector<TrackPoint>& points,
                                             const ParabolaBandConfig& cfg,
                                             const CentralLine& line) {
    cfg.validate();
    std::vector<TrackPoint> out = points;
    std::vector<const TrackPoint*> live;
    std::vector<std::size_t> live_idx;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].status == PointStatus::candidate) {
            live.push_back(&points[i]);
            live_idx.push_back(i);
        }
    }
    if (live.empty()) throw std::invalid_argument("parabola_band_filter: no live points");

    double a = best_bend(live, cfg, line);
    double half_d = cfg.separation_d / 2.0;
    for (std::size_t i = 0; i < live.size(); ++i) {
        double dist = std::abs(live[i]->col - parabola_column(line, a, cfg.vertex_row, live[i]->row));
        out[live_idx[i]].status = dist <= half_d ? PointStatus::kept
                                                 : PointStatus::removed_by_parabola;
    }
    return out;
}

std::vector<TrackPoint> survivors(const std::vector<TrackPoint>& points) {
    std::vector<TrackPoint> out;
    for (const TrackPoint& p : points)
        if (p.status == PointStatus::candidate || p.status == PointStatus::kept)
            out.push_back(p);
    return out;
}

}  // namespace beamtrack
