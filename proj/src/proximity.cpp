#include "proxloc/proximity.hpp"

namespace proxloc {

const char* mode_name(ProximityMode m) {
    switch (m) {
        case ProximityMode::Baseline: return "baseline";
        case ProximityMode::Sra: return "sra";
        case ProximityMode::Skf: return "skf";
    }
    return "baseline";
}

ProximityPipeline::ProximityPipeline(ProximityMode mode, PathLossModel model,
                                     KalmanParams kf_params)
    : mode_(mode), model_(model), kf_params_(kf_params) {
    model_.validate();
    kf_params_.validate();
    // The benchmark path ignores the surveyed exponent and assumes free
    // space; only the 1 m reference RSSI comes from the environment.
    baseline_model_ = model_;
    baseline_model_.n = 2.0;
}

double ProximityPipeline::window_mean_push(double rssi) {
    window_[window_next_] = rssi;
    window_next_ = (window_next_ + 1) % kWindowCapacity;
    if (window_size_ < kWindowCapacity) ++window_size_;

    double sum = 0.0;
    for (std::size_t i = 0; i < window_size_; ++i) sum += window_[i];
    return sum / static_cast<double>(window_size_);
}

std::optional<ProximityDecision> ProximityPipeline::step(double rssi) {
    if (closed_) return std::nullopt;
    if (rssi == 0.0) {
        closed_ = true;
        return std::nullopt;
    }

    double filtered = 0.0;
    const PathLossModel* inversion_model = &model_;
    switch (mode_) {
        case ProximityMode::Baseline:
            filtered = window_mean_push(rssi);
            inversion_model = &baseline_model_;
            break;
        case ProximityMode::Sra:
            filtered = window_mean_push(rssi);
            break;
        case ProximityMode::Skf:
            // First sample initializes the filter; every later one advances
            // a predict/update step.
            if (!kf_) {
                kf_ = kf_new(kf_params_, rssi);
            } else {
                *kf_ = kf_step(*kf_, kf_params_, rssi);
            }
            filtered = kf_->rssi();
            break;
    }

    ProximityDecision d;
    d.filtered_rssi = filtered;
    d.est_distance = invert_rssi(*inversion_model, filtered);
    d.instantaneous_zone = classify_zone(d.est_distance);

    if (mode_ == ProximityMode::Baseline) {
        decided_ = d.instantaneous_zone;
    } else {
        if (history_size_ < kDebounceLength) {
            history_[history_size_++] = d.instantaneous_zone;
        } else {
            history_[0] = history_[1];
            history_[1] = history_[2];
            history_[2] = d.instantaneous_zone;
        }
        if (history_size_ == kDebounceLength && history_[0] == history_[1] &&
            history_[1] == history_[2]) {
            decided_ = history_[2];
        }
    }

    d.decided_zone = decided_;
    return d;
}

std::vector<ProximityDecision> ProximityPipeline::run(const std::vector<double>& series) {
    std::vector<ProximityDecision> out;
    out.reserve(series.size());
    for (double rssi : series) {
        auto d = step(rssi);
        if (!d) break;  // sentinel closed the stream
        out.push_back(*d);
    }
    return out;
}

}  // namespace proxloc
