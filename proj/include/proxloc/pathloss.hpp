#pragma once

#include <vector>

namespace proxloc {

// Log-distance path-loss model: rssi = -10 * n * log10(d / d0) + c.
// n is the environment's path-loss exponent, c the mean RSSI (dBm) at the
// reference distance d0 (meters, 1.0 for BLE beacons).
struct PathLossModel {
    double n = 2.0;
    double c = -60.0;
    double d0 = 1.0;

    void validate() const;
};

// One site-survey row: averaged RSSI observed at a known distance.
struct CalibrationPoint {
    double distance;   // meters, > 0
    double mean_rssi;  // dBm
};

// Proximity zones by distance: Immediate < 1 m, Near 1-3 m (closed on both
// ends), Far > 3 m, Unknown when the device is not ranged.
enum class ProximityZone { Immediate, Near, Far, Unknown };

const char* zone_name(ProximityZone z);

struct PathLossFit {
    PathLossModel model;
    double r2;  // 1 - SSE/SST on the calibration points
};

// Ordinary least squares of mean_rssi against log10(distance / d0):
// slope = -10n, intercept = c. The model is linear in (n, c), so OLS is the
// exact least-squares fit. Throws NumericError when fewer than two distinct
// distances are given, std::invalid_argument on non-positive distances
// (survey rows taken at 0 m must be substituted with a small positive
// distance, e.g. 0.0001, by the caller).
PathLossFit fit_path_loss(const std::vector<CalibrationPoint>& points, double d0 = 1.0);

// Expected RSSI at distance d (meters). d must be > 0.
double predict_rssi(const PathLossModel& model, double d);

// Exact algebraic inverse of predict_rssi: d = d0 * 10^((c - rssi) / (10 n)).
// Every finite RSSI maps to a positive distance.
double invert_rssi(const PathLossModel& model, double rssi);

// Distance to zone per the iBeacon convention. Negative distances throw;
// use classify_not_ranged() for the unknown/not-ranged case.
ProximityZone classify_zone(double d);
inline ProximityZone classify_not_ranged() { return ProximityZone::Unknown; }

}  // namespace proxloc
