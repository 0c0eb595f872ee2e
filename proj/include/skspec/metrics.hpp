#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dynamics.hpp"
#include "ops.hpp"

namespace skspec {

/// sup over common steps of ||u_a - u_b||_{H^s}.
inline double path_distance(const Trajectory& a, const Trajectory& b, double s) {
    if (a.times.size() != b.times.size() || a.times.empty())
        throw std::invalid_argument("path_distance: time grids differ");
    double sup = 0.0;
    for (std::size_t j = 0; j < a.times.size(); ++j) {
        if (a.times[j] != b.times[j]) throw std::invalid_argument("path_distance: time grids differ");
        sup = std::max(sup, sobolev_norm(a.u[j] - b.u[j], s));
    }
    return sup;
}

/// (parameter, distance) pairs plus the fitted log-log slope.
struct ConvergenceReport {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    bool monotone_decreasing = false;
};

/// Least-squares slope of log(distance) against log(parameter).
inline double fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [p, d] : points) {
        if (!(p > 0.0) || !(d > 0.0))
            throw std::invalid_argument("fit_rate: parameters and distances must be positive");
        const double x = std::log(p), y = std::log(d);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = double(points.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline ConvergenceReport make_convergence_report(std::vector<std::pair<double, double>> points) {
    ConvergenceReport rep;
    rep.points = std::move(points);
    rep.slope = fit_rate(rep.points);
    rep.monotone_decreasing = true;
    for (std::size_t i = 1; i < rep.points.size(); ++i)
        if (!(rep.points[i].second < rep.points[i - 1].second)) rep.monotone_decreasing = false;
    return rep;
}

}  // namespace skspec
