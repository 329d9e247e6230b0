#pragma once

#include <array>
#include <vector>

namespace proxloc {

// 2x2 matrices are all this filter ever needs; plain arrays keep it
// dependency-free and easy to audit against the update equations.
using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

// Filter over the state [rssi, rate-of-change-of-rssi] with
// F = [[1, dt], [0, 1]] and H = [1 0]. Defaults are the calibrated
// constants: dt = 0.2, Q = diag(0.001), R = 0.10, P0 = diag(100).
struct KalmanParams {
    double dt = 0.2;
    Mat2 q{{{0.001, 0.0}, {0.0, 0.001}}};
    double r = 0.10;
    Mat2 p0{{{100.0, 0.0}, {0.0, 100.0}}};

    void validate() const;
};

struct KalmanState {
    Vec2 x{0.0, 0.0};  // [y dBm, dy dBm/step]
    Mat2 p{{{0.0, 0.0}, {0.0, 0.0}}};

    double rssi() const { return x[0]; }
    double rate() const { return x[1]; }
};

// Anchors the state on the first observation: x = [first_rssi, 0], p = p0.
KalmanState kf_new(const KalmanParams& params, double first_rssi);

// x <- F x, p <- F p F^T + Q.
KalmanState kf_predict(const KalmanState& state, const KalmanParams& params);

// K = p H^T (H p H^T + R)^-1; x <- x + K (z - H x); p <- (I - K H) p, then
// symmetrized. Throws NumericError when the innovation covariance is zero.
KalmanState kf_update(const KalmanState& state, const KalmanParams& params, double z);

// One predict followed by one update; each arriving sample advances one step
// regardless of wall-clock spacing (dt is a tuning constant).
KalmanState kf_step(const KalmanState& state, const KalmanParams& params, double z);

// Batch convenience: output[i] is the filtered rssi after series[0..=i].
// The first sample only initializes the filter.
std::vector<double> kf_smooth_series(const KalmanParams& params,
                                     const std::vector<double>& series);

}  // namespace proxloc
