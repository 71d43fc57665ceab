// Brute-force reference implementations the tests compare against. These
// deliberately recompute everything from first principles instead of reusing
// the library's optimized paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "beamtrack/image.hpp"
#include "beamtrack/locator.hpp"
#include "beamtrack/tracker.hpp"

namespace oracles {

// Exhaustive threshold scan: for every candidate t rebuild both classes by
// walking all pixels, score n_bg*var_bg + n_fg*var_fg as an exact rational,
// keep the smallest minimizing t.
inline int otsu_brute_force(const beamtrack::Frame& frame) {
    struct Ratio {
        __int128 num;
        std::int64_t den;
    };
    auto score = [&](int t) -> Ratio {
        std::int64_t n[2] = {0, 0}, s[2] = {0, 0}, q[2] = {0, 0};
        for (std::uint8_t p : frame.pixels()) {
            int cls = p >= t ? 1 : 0;
            ++n[cls];
            s[cls] += p;
            q[cls] += static_cast<std::int64_t>(p) * p;
        }
        Ratio r{0, 1};
        for (int cls = 0; cls < 2; ++cls) {
            if (n[cls] == 0) continue;
            // n*var = q - s^2/n  ->  (n*q - s^2)/n
            __int128 num = static_cast<__int128>(n[cls]) * q[cls] -
                           static_cast<__int128>(s[cls]) * s[cls];
            r = Ratio{r.num * n[cls] + num * r.den, r.den * n[cls]};
        }
        return r;
    };
    int best_t = 1;
    Ratio best = score(1);
    for (int t = 2; t <= 255; ++t) {
        Ratio v = score(t);
        if (v.num * best.den < best.num * v.den) {
            best = v;
            best_t = t;
        }
    }
    return best_t;
}

// 8-connected labeling by breadth-first flood fill; labels start at 1.
inline std::vector<int> flood_fill_labels(const beamtrack::BinaryImage& bin, int* n_labels) {
    const int w = bin.width, h = bin.height;
    std::vector<int> labels(static_cast<std::size_t>(w) * h, 0);
    int next = 0;
    std::deque<std::pair<int, int>> queue;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!bin.at(r, c) || labels[static_cast<std::size_t>(r) * w + c]) continue;
            ++next;
            queue.push_back({r, c});
            labels[static_cast<std::size_t>(r) * w + c] = next;
            while (!queue.empty()) {
                auto [rr, cc] = queue.front();
                queue.pop_front();
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        int r2 = rr + dr, c2 = cc + dc;
                        if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) continue;
                        std::size_t i = static_cast<std::size_t>(r2) * w + c2;
                        if (bin.bits[i] && !labels[i]) {
                            labels[i] = next;
                            queue.push_back({r2, c2});
                        }
                    }
                }
            }
        }
    }
    *n_labels = next;
    return labels;
}

inline double fit_sse(const std::vector<beamtrack::TrackPoint>& pts,
                      const beamtrack::CentralLine& line, double k, double c1, double c2,
                      double c3) {
    double sse = 0.0;
    for (const auto& p : pts) {
        double y = p.row - line.top_row();
        double model = c1 * std::sin(k * y) + c2 * std::cos(k * y) + c3;
        double r = (p.col - line.column_at(p.row)) - model;
        sse += r * r;
    }
    return sse;
}

struct GridFitResult {
    double c1 = 0, c2 = 0, c3 = 0, sse = 0;
};

// Coarse lattice search over coefficient space.
inline GridFitResult grid_search_fit(const std::vector<beamtrack::TrackPoint>& pts,
                                     const beamtrack::CentralLine& line, double k, double lo,
                                     double hi, int steps) {
    GridFitResult best;
    bool first = true;
    for (int i = 0; i < steps; ++i) {
        double c1 = lo + i * (hi - lo) / (steps - 1);
        for (int j = 0; j < steps; ++j) {
            double c2 = lo + j * (hi - lo) / (steps - 1);
            for (int m = 0; m < steps; ++m) {
                double c3 = lo + m * (hi - lo) / (steps - 1);
                double sse = fit_sse(pts, line, k, c1, c2, c3);
                if (first || sse < best.sse) {
                    best = {c1, c2, c3, sse};
                    first = false;
                }
            }
        }
    }
    return best;
}

// Independent scan for the band coefficient holding the most points; the
// band geometry is recomputed here rather than taken from the library.
inline double parabola_scan(const std::vector<beamtrack::TrackPoint>& pts,
                            const beamtrack::CentralLine& line,
                            const std::vector<double>& candidates, double vertex_row,
                            double separation_d) {
    double half_span = std::max(vertex_row - line.top_row(), line.bottom_row() - vertex_row);
    double best_a = 0.0;
    long best_count = -1;
    for (double a : candidates) {
        long count = 0;
        for (const auto& p : pts) {
            double dy = p.row - vertex_row;
            double x = line.column_at(p.row) + a * (dy * dy - half_span * half_span);
            if (std::fabs(p.col - x) <= separation_d / 2.0) ++count;
        }
        bool better = count > best_count ||
                      (count == best_count &&
                       (std::fabs(a) < std::fabs(best_a) ||
                        (std::fabs(a) == std::fabs(best_a) && a < best_a)));
        if (better) {
            best_a = a;
            best_count = count;
        }
    }
    return best_a;
}

}  // namespace oracles
