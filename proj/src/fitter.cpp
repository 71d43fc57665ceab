#include "beamtrack/fitter.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace beamtrack {

double model_offset(const BeamFit& fit, const CentralLine& line, double row) {
    double y = row - line.top_row();
    return fit.c1 * std::sin(fit.k * y) + fit.c2 * std::cos(fit.k * y) + fit.c3;
}

double model_eval(const BeamFit& fit, const CentralLine& line, double row) {
    return line.column_at(row) + model_offset(fit, line, row);
}

BeamFit gauss_newton_fit(const std::vector<TrackPoint>& points, const CentralLine& line,
                         int max_iter, double tol, NormalSolve method) {
    const std::size_t n = points.size();
    if (n < 3)
        throw FitFailure("gauss_newton_fit: need at least 3 points, got " + std::to_string(n));

    BeamFit fit;
    fit.k = 2.0 * std::numbers::pi / line.length_px();

    Eigen::MatrixXd Z(n, 3);
    Eigen::VectorXd x_offsets(n);
    for (std::size_t i = 0; i < n; ++i) {
        double y = points[i].row - line.top_row();
        Z(i, 0) = std::sin(fit.k * y);
        Z(i, 1) = std::cos(fit.k * y);
        Z(i, 2) = 1.0;
        x_offsets(i) = points[i].col - line.column_at(points[i].row);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    qr.setThreshold(1e-10);
    if (qr.rank() < 3)
        throw FitFailure("gauss_newton_fit: rank-deficient system (points do not span the basis)");

    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    while (fit.iterations < max_iter) {
        Eigen::VectorXd d = x_offsets - Z * c;
        Eigen::Vector3d delta;
        if (method == NormalSolve::qr) {
            delta = qr.solve(d);
        } else {
            Eigen::Matrix3d ztz = Z.transpose() * Z;
            delta = ztz.inverse() * (Z.transpose() * d);
        }
        if (delta.cwiseAbs().maxCoeff() < tol) {
            fit.converged = true;
            break;
        }
        c += delta;
        ++fit.iterations;
    }
    fit.c1 = c(0);
    fit.c2 = c(1);
    fit.c3 = c(2);
    fit.residual_rms = residual_rms(fit, line, points);
    return fit;
}

double residual_rms(const BeamFit& fit, const CentralLine& line,
                    const std::vector<TrackPoint>& points) {
    if (points.empty())
        throw std::invalid_argument("residual_rms: empty point list");
    double ss = 0.0;
    for (const TrackPoint& p : points) {
        double r = p.col - model_eval(fit, line, p.row);
        ss += r * r;
    }
    return std::sqrt(ss / static_cast<double>(points.size()));
}

}  // namespace beamtrack
