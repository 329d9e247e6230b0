#include "proxloc/kalman.hpp"

#include <cmath>
#include <stdexcept>

#include "proxloc/errors.hpp"

namespace proxloc {

namespace {

void check_psd(const Mat2& m, const char* name) {
    if (std::abs(m[0][1] - m[1][0]) > 1e-12)
        throw std::invalid_argument(std::string("kalman params: ") + name + " must be symmetric");
    if (m[0][0] < 0.0 || m[1][1] < 0.0 || m[0][0] * m[1][1] - m[0][1] * m[1][0] < -1e-12)
        throw std::invalid_argument(std::string("kalman params: ") + name +
                                    " must be positive semidefinite");
}

}  // namespace

void KalmanParams::validate() const {
    if (!std::isfinite(dt)) throw std::invalid_argument("kalman params: dt must be finite");
    check_psd(q, "Q");
    check_psd(p0, "P0");
    if (!(r > 0.0)) throw std::invalid_argument("kalman params: R must be > 0");
}

KalmanState kf_new(const KalmanParams& params, double first_rssi) {
    params.validate();
    KalmanState s;
    s.x = {first_rssi, 0.0};
    s.p = params.p0;
    return s;
}

KalmanState kf_predict(const KalmanState& state, const KalmanParams& params) {
    const double dt = params.dt;
    KalmanState out;
    out.x = {state.x[0] + dt * state.x[1], state.x[1]};

    // F p F^T with F = [[1, dt], [0, 1]], expanded by hand.
    const Mat2& p = state.p;
    out.p[0][0] = p[0][0] + dt * (p[1][0] + p[0][1]) + dt * dt * p[1][1] + params.q[0][0];
    out.p[0][1] = p[0][1] + dt * p[1][1] + params.q[0][1];
    out.p[1][0] = p[1][0] + dt * p[1][1] + params.q[1][0];
    out.p[1][1] = p[1][1] + params.q[1][1];
    return out;
}

KalmanState kf_update(const KalmanState& state, const KalmanParams& params, double z) {
    const Mat2& p = state.p;
    const double s = p[0][0] + params.r;  // H p H^T + R with H = [1 0]
    if (s == 0.0) throw NumericError("kf_update: singular innovation covariance");

    const double k0 = p[0][0] / s;
    const double k1 = p[1][0] / s;
    const double innovation = z - state.x[0];

    KalmanState out;
    out.x = {state.x[0] + k0 * innovation, state.x[1] + k1 * innovation};

    // (I - K H) p, H = [1 0].
    out.p[0][0] = (1.0 - k0) * p[0][0];
    out.p[0][1] = (1.0 - k0) * p[0][1];
    out.p[1][0] = p[1][0] - k1 * p[0][0];
    out.p[1][1] = p[1][1] - k1 * p[0][1];

    // Keep p exactly symmetric across long runs.
    const double off = 0.5 * (out.p[0][1] + out.p[1][0]);
    out.p[0][1] = off;
    out.p[1][0] = off;
    return out;
}

KalmanState kf_step(const KalmanState& state, const KalmanParams& params, double z) {
    return kf_update(kf_predict(state, params), params, z);
}

std::vector<double> kf_smooth_series(const KalmanParams& params,
                                     const std::vector<double>& series) {
    std::vector<double> out;
    out.reserve(series.size());
    if (series.empty()) return out;

    KalmanState s = kf_new(params, series.front());
    out.push_back(s.rssi());
    for (std::size_t i = 1; i < series.size(); ++i) {
        s = kf_step(s, params, series[i]);
        out.push_back(s.rssi());
    }
    return out;
}

}  // namespace proxloc
