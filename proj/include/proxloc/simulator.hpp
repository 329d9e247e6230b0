#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proxloc/geometry.hpp"
#include "proxloc/kalman.hpp"
#include "proxloc/metrics.hpp"
#include "proxloc/particle_filter.hpp"
#include "proxloc/pathloss.hpp"
#include "proxloc/trace_io.hpp"

namespace proxloc {

struct BeaconSpec {
    std::string id;
    Vec3 pos{0.0, 0.0, 0.0};
    PathLossModel model;
};

struct Deployment {
    std::vector<BeaconSpec> beacons;
    Box bounds;

    void validate() const;
    BeaconPositions positions(std::size_t first_n = 0) const;  // 0 = all
    BeaconModels models() const;
};

// Additive Gaussian RSSI noise plus sample dropout. The crowding fields are
// an optional knob emulating beacon self-interference: once a deployment has
// at least crowding_threshold beacons, sigma is multiplied by crowding_factor
// (threshold 0 disables this).
struct NoiseSpec {
    double sigma = 3.0;    // dB
    double dropout_p = 0.0;
    std::uint64_t seed = 0;
    int crowding_threshold = 0;
    double crowding_factor = 1.0;

    void validate() const;
    double effective_sigma(std::size_t beacon_count) const;
};

struct Waypoint {
    std::int64_t t_ms = 0;
    Vec3 pos{0.0, 0.0, 0.0};
};

// Piecewise-linear path through waypoints with strictly increasing t_ms.
struct Trajectory {
    std::vector<Waypoint> waypoints;

    static Trajectory stationary(const Vec3& pos, std::int64_t duration_ms);
    Vec3 position_at(std::int64_t t_ms) const;
    std::int64_t end_ms() const;
    void validate(const Box& bounds) const;
};

// Synthesizes the RSSI trace a receiver moving along the trajectory would
// observe: one sample per beacon per period_ms tick, rssi = path-loss
// prediction at the true distance (floored at 0.01 m) plus Gaussian noise.
// Each beacon gets its own noise stream derived from (seed, beacon id), so
// adding or removing beacons leaves the others' samples untouched.
std::vector<RssiSample> generate_trace(const Deployment& deployment,
                                       const Trajectory& trajectory,
                                       const NoiseSpec& noise,
                                       std::int64_t period_ms = 100);

struct PfTuning {
    double motion_sigma = 0.25;
    double likelihood_sigma = 1.0;
    double ess_threshold = 0.5;
};

struct SweepSpec {
    std::vector<int> beacon_counts;    // each cell uses the first b beacons
    std::vector<int> particle_counts;
    int repetitions = 10;    // independent stationary targets per cell
    int steps_per_run = 60;  // trace length in ticks
    int eval_samples = 10;   // trailing estimates entering the error metric
    std::int64_t period_ms = 100;
    PfTuning pf;
    KalmanParams kf;  // cascade smoothing constants

    void validate(const Deployment& deployment) const;
};

struct SweepCell {
    int particles = 0;
    int beacons = 0;
    double pf_mean = 0.0, pf_std = 0.0;
    double kfpf_mean = 0.0, kfpf_std = 0.0;
};

// Cells ordered particles-major: for each particle count, every beacon count.
struct ScenarioResult {
    std::vector<SweepCell> cells;
};

// For every (beacon count, particle count) cell: `repetitions` stationary
// targets drawn from the master seed (the same targets across all cells), a
// fresh trace per target, and a plain-PF and a cascaded engine run on the
// identical trace with identical seeds. The per-target error is the 2D (or
// 3D, per deployment dim) localization error of the last eval_samples
// estimates against the true position; cells aggregate mean and sample std.
// Cells are independent; jobs > 1 computes them on that many threads with
// results identical to the single-threaded order.
ScenarioResult run_sweep(const Deployment& deployment, const SweepSpec& sweep,
                         const NoiseSpec& noise, std::uint64_t seed, int jobs = 1);

struct ProximityExperimentResult {
    ConfusionMatrix3 baseline;
    ConfusionMatrix3 sra;
    ConfusionMatrix3 skf;
};

// Streams synthetic RSSI at each test distance through all three proximity
// pipelines and scores their decided zones against classify_zone(distance).
// Each distance gets a fresh pipeline and `warmup` uncounted samples (the
// debounce and the Kalman filter need a settling period) followed by
// samples_per_distance counted decisions. Distances of exactly 0 are
// rejected; substitute a small positive value such as 0.0001.
ProximityExperimentResult proximity_experiment(const PathLossModel& model,
                                               const std::vector<double>& distances,
                                               int samples_per_distance,
                                               const NoiseSpec& noise,
                                               int warmup = 20,
                                               const KalmanParams& kf_params = KalmanParams{});

}  // namespace proxloc
