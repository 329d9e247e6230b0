#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "proxloc/geometry.hpp"
#include "proxloc/kalman.hpp"
#include "proxloc/pathloss.hpp"

namespace proxloc {

struct Particle {
    Vec3 pos{0.0, 0.0, 0.0};
    double w = 0.0;
};

struct ParticleSet {
    std::vector<Particle> particles;
    int dim = 2;

    double weight_sum() const;
    // Effective sample size 1/sum(w^2) for normalized weights.
    double ess() const;
};

struct PfConfig {
    int n_particles = 1000;
    Box bounds;
    double motion_sigma = 0.25;      // meters per step per axis
    double likelihood_sigma = 1.0;   // meters, width of the ranging likelihood
    double ess_threshold = 0.5;      // fraction of n_particles triggering resample
    std::uint64_t seed = 0;

    void validate() const;
};

// One ranging observation: a beacon id and the distance estimate obtained by
// inverting its RSSI through that beacon's path-loss model.
struct BeaconObservation {
    std::string beacon_id;
    double est_distance;  // meters, > 0
};

using Rng = std::mt19937_64;
// Ordered by id so likelihood products accumulate in a fixed order no matter
// how callers assembled the map.
using BeaconPositions = std::map<std::string, Vec3>;
using BeaconModels = std::map<std::string, PathLossModel>;

struct WeightUpdateOutcome {
    bool weights_reset = false;  // all raw weights underflowed; reset uniform
    bool empty_obs = false;      // no observations; set returned unchanged
};

// n_particles drawn uniformly over the bounds, weights 1/N.
ParticleSet pf_init(const PfConfig& config, Rng& rng);

// Bounded random walk: independent zero-mean Gaussian per axis with
// motion_sigma, clamped to the bounds. Weights unchanged.
ParticleSet pf_predict(const ParticleSet& set, const PfConfig& config, Rng& rng);

// Multiplies each weight by the Gaussian ranging likelihood of every
// observation, then normalizes to sum 1. All-zero raw weights are recovered
// by a uniform reset (reported through outcome). Unknown beacon ids throw.
ParticleSet pf_update_weights(const ParticleSet& set,
                              const std::vector<BeaconObservation>& obs,
                              const BeaconPositions& beacons,
                              const PfConfig& config,
                              WeightUpdateOutcome* outcome = nullptr);

// Systematic resampling to N equal-weight particles, triggered only when
// ESS < ess_threshold * N; otherwise the set is returned unchanged.
ParticleSet pf_resample(const ParticleSet& set, const PfConfig& config, Rng& rng);

// Weighted mean position.
Vec3 pf_estimate(const ParticleSet& set);

// One tracked target. Owns its particle set, its RNG and (for the cascaded
// mode) one RSSI Kalman filter per beacon, created lazily the first time the
// beacon is seen. Deterministic for a fixed (config, seed, input trace).
class LocalizationEngine {
public:
    struct StepResult {
        Vec3 position{0.0, 0.0, 0.0};
        bool stale = false;          // empty snapshot; previous estimate returned
        bool weights_reset = false;  // degenerate weights recovered this step
    };

    LocalizationEngine(PfConfig config, BeaconPositions beacons,
                       KalmanParams kf_params = KalmanParams{});

    // Plain particle filter step: RSSI -> distance (per-beacon model) ->
    // predict -> weight -> resample -> estimate.
    StepResult pf_step(const std::map<std::string, double>& rssi_snapshot,
                       const BeaconModels& models);

    // Cascaded step: each beacon's RSSI is smoothed by its own Kalman filter
    // before entering the pf_step path.
    StepResult kfpf_step(const std::map<std::string, double>& rssi_snapshot,
                         const BeaconModels& models);

    const ParticleSet& particles() const { return set_; }
    const PfConfig& config() const { return config_; }

private:
    StepResult run_step(const std::vector<BeaconObservation>& obs);

    PfConfig config_;
    BeaconPositions beacons_;
    KalmanParams kf_params_;
    std::map<std::string, KalmanState> filters_;
    ParticleSet set_;
    Rng rng_;
    Vec3 last_estimate_{0.0, 0.0, 0.0};
};

}  // namespace proxloc
