#pragma once

#include <vector>

#include "beamtrack/locator.hpp"
#include "beamtrack/tracker.hpp"

namespace beamtrack {

// Post-buckling shape coefficients. Offsets from the central line are
// modeled as c1*sin(k*y) + c2*cos(k*y) + c3 with y measured down from the
// line's top endpoint and k pinned to 2*pi / line length.
struct BeamFit {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double k = 0.0;
    bool converged = false;
    int iterations = 0;
    double residual_rms = 0.0;
};

enum class NormalSolve {
    qr,            // orthogonal decomposition of the Jacobian
    explicit_inverse,  // (Z^T Z)^{-1} Z^T D, kept to cross-check the qr path
};

// Model offset from the central line at a given absolute row.
double model_offset(const BeamFit& fit, const CentralLine& line, double row);

// Absolute column predicted by the fit at a given row.
double model_eval(const BeamFit& fit, const CentralLine& line, double row);

// Gauss-Newton regression of the post-buckling model onto the points'
// column offsets. k is fixed, so the model is linear in (c1,c2,c3) and one
// applied step reaches the optimum; the iteration structure is kept for the
// general contract. Throws FitFailure if fewer than three points are given
// or the system is rank-deficient.
BeamFit gauss_newton_fit(const std::vector<TrackPoint>& points, const CentralLine& line,
                         int max_iter = 20, double tol = 1e-8,
                         NormalSolve method = NormalSolve::qr);

// Root-mean-square column-offset residual of the fit over the given points.
double residual_rms(const BeamFit& fit, const CentralLine& line,
                    const std::vector<TrackPoint>& points);

}  // namespace beamtrack
