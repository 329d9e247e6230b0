#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "proxloc/kalman.hpp"
#include "proxloc/pathloss.hpp"

namespace proxloc {

enum class ProximityMode { Baseline, Sra, Skf };

const char* mode_name(ProximityMode m);

struct ProximityDecision {
    ProximityZone instantaneous_zone = ProximityZone::Unknown;
    ProximityZone decided_zone = ProximityZone::Unknown;
    double est_distance = 0.0;   // meters
    double filtered_rssi = 0.0;  // window mean (Baseline/SRA) or KF output (SKF)
};

// Streaming zone classifier for one (device, beacon) RSSI stream.
//
//   Baseline  mean of the last 10 raw samples, inverted through a free-space
//             model (n = 2, same reference RSSI), classified instantly.
//   Sra       same 10-sample mean, inverted through the calibrated model,
//             with the 3-consecutive debounce below.
//   Skf       per-sample Kalman smoothing of the raw RSSI, inverted through
//             the calibrated model, same debounce.
//
// Debounce: the decided zone moves to zone x only once the last three
// instantaneous classifications all equal x; otherwise it keeps its previous
// value (initially Unknown).
//
// An RSSI of exactly 0 is the stream-end sentinel: it closes the pipeline,
// and this and all later steps return nullopt.
class ProximityPipeline {
public:
    static constexpr std::size_t kWindowCapacity = 10;
    static constexpr int kDebounceLength = 3;

    ProximityPipeline(ProximityMode mode, PathLossModel model,
                      KalmanParams kf_params = KalmanParams{});

    std::optional<ProximityDecision> step(double rssi);

    // Folds step over the series; stops early if the stream closes.
    std::vector<ProximityDecision> run(const std::vector<double>& series);

    ProximityZone decided() const { return decided_; }
    bool closed() const { return closed_; }
    ProximityMode mode() const { return mode_; }

private:
    double window_mean_push(double rssi);

    ProximityMode mode_;
    PathLossModel model_;
    PathLossModel baseline_model_;  // free-space exponent, environment's C
    KalmanParams kf_params_;
    std::optional<KalmanState> kf_;

    std::array<double, kWindowCapacity> window_{};
    std::size_t window_size_ = 0;
    std::size_t window_next_ = 0;

    std::array<ProximityZone, kDebounceLength> history_{};
    int history_size_ = 0;

    ProximityZone decided_ = ProximityZone::Unknown;
    bool closed_ = false;
};

}  // namespace proxloc
