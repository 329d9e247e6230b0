#include "proxloc/pathloss.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "proxloc/errors.hpp"

namespace proxloc {

void PathLossModel::validate() const {
    if (!(n > 0.0)) throw std::invalid_argument("path-loss model: n must be > 0");
    if (!(d0 > 0.0)) throw std::invalid_argument("path-loss model: d0 must be > 0");
    if (!std::isfinite(c)) throw std::invalid_argument("path-loss model: c must be finite");
}

const char* zone_name(ProximityZone z) {
    switch (z) {
        case ProximityZone::Immediate: return "immediate";
        case ProximityZone::Near: return "near";
        case ProximityZone::Far: return "far";
        case ProximityZone::Unknown: return "unknown";
    }
    return "unknown";
}

PathLossFit fit_path_loss(const std::vector<CalibrationPoint>& points, double d0) {
    if (!(d0 > 0.0)) throw std::invalid_argument("fit_path_loss: d0 must be > 0");

    std::set<double> distinct;
    for (const auto& p : points) {
        if (!(p.distance > 0.0))
            throw std::invalid_argument(
                "fit_path_loss: distances must be > 0 (substitute 0.0001 for 0 m rows)");
        if (!std::isfinite(p.mean_rssi))
            throw std::invalid_argument("fit_path_loss: mean_rssi must be finite");
        distinct.insert(p.distance);
    }
    if (distinct.size() < 2)
        throw NumericError("fit_path_loss: need at least 2 points with distinct distances");

    // OLS of y = rssi on x = log10(d/d0).
    const double m = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        sx += std::log10(p.distance / d0);
        sy += p.mean_rssi;
    }
    const double xbar = sx / m;
    const double ybar = sy / m;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log10(p.distance / d0) - xbar;
        const double dy = p.mean_rssi - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }

    const double slope = sxy / sxx;
    const double intercept = ybar - slope * xbar;

    PathLossFit fit;
    fit.model.n = -slope / 10.0;
    fit.model.c = intercept;
    fit.model.d0 = d0;

    double sse = 0.0;
    for (const auto& p : points) {
        const double pred = slope * std::log10(p.distance / d0) + intercept;
        const double r = p.mean_rssi - pred;
        sse += r * r;
    }
    fit.r2 = (syy > 0.0) ? 1.0 - sse / syy : 1.0;
    return fit;
}

double predict_rssi(const PathLossModel& model, double d) {
    model.validate();
    if (!(d > 0.0)) throw std::invalid_argument("predict_rssi: d must be > 0");
    return -10.0 * model.n * std::log10(d / model.d0) + model.c;
}

double invert_rssi(const PathLossModel& model, double rssi) {
    model.validate();
    return model.d0 * std::pow(10.0, (model.c - rssi) / (10.0 * model.n));
}

ProximityZone classify_zone(double d) {
    if (d < 0.0) throw std::invalid_argument("classify_zone: negative distance");
    if (d < 1.0) return ProximityZone::Immediate;
    if (d <= 3.0) return ProximityZone::Near;  // 1.0 and 3.0 both map to Near
    return ProximityZone::Far;
}

}  // namespace proxloc
