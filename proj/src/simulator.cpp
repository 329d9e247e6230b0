#include "proxloc/simulator.hpp"

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

#include "proxloc/errors.hpp"
#include "proxloc/proximity.hpp"
#include "proxloc/seed.hpp"

namespace proxloc {

namespace {

// Seed-path tags keeping the derived streams of the different consumers
// disjoint (see seed.hpp for the scheme).
constexpr std::uint64_t kTagTargets = 1;
constexpr std::uint64_t kTagTrace = 2;
constexpr std::uint64_t kTagEngine = 3;
constexpr std::uint64_t kTagProximity = 4;

constexpr double kMinRangingDistance = 0.01;  // floor before the path-loss model

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

void Deployment::validate() const {
    bounds.validate();
    if (beacons.empty()) throw std::invalid_argument("deployment: needs at least one beacon");
    std::set<std::string> ids;
    for (const auto& b : beacons) {
        if (b.id.empty()) throw std::invalid_argument("deployment: empty beacon id");
        if (b.id.find_first_of(",\n\r") != std::string::npos)
            throw std::invalid_argument("deployment: beacon id '" + b.id +
                                        "' contains CSV delimiter characters");
        if (!ids.insert(b.id).second)
            throw std::invalid_argument("deployment: duplicate beacon id '" + b.id + "'");
        if (!bounds.contains(b.pos))
            throw std::invalid_argument("deployment: beacon '" + b.id + "' outside bounds");
        b.model.validate();
    }
}

BeaconPositions Deployment::positions(std::size_t first_n) const {
    const std::size_t n = (first_n == 0) ? beacons.size() : std::min(first_n, beacons.size());
    BeaconPositions out;
    for (std::size_t i = 0; i < n; ++i) out[beacons[i].id] = beacons[i].pos;
    return out;
}

BeaconModels Deployment::models() const {
    BeaconModels out;
    for (const auto& b : beacons) out[b.id] = b.model;
    return out;
}

void NoiseSpec::validate() const {
    if (!(sigma >= 0.0)) throw std::invalid_argument("noise: sigma must be >= 0");
    if (dropout_p < 0.0 || dropout_p > 1.0)
        throw std::invalid_argument("noise: dropout_p must be in [0, 1]");
    if (crowding_threshold < 0)
        throw std::invalid_argument("noise: crowding_threshold must be >= 0");
    if (!(crowding_factor >= 0.0))
        throw std::invalid_argument("noise: crowding_factor must be >= 0");
}

double NoiseSpec::effective_sigma(std::size_t beacon_count) const {
    if (crowding_threshold > 0 &&
        beacon_count >= static_cast<std::size_t>(crowding_threshold))
        return sigma * crowding_factor;
    return sigma;
}

Trajectory Trajectory::stationary(const Vec3& pos, std::int64_t duration_ms) {
    Trajectory t;
    t.waypoints.push_back({0, pos});
    if (duration_ms > 0) t.waypoints.push_back({duration_ms, pos});
    return t;
}

Vec3 Trajectory::position_at(std::int64_t t_ms) const {
    if (waypoints.empty()) throw std::invalid_argument("trajectory: no waypoints");
    if (t_ms <= waypoints.front().t_ms) return waypoints.front().pos;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        if (t_ms <= waypoints[i].t_ms) {
            const auto& a = waypoints[i - 1];
            const auto& b = waypoints[i];
            const double f = static_cast<double>(t_ms - a.t_ms) /
                             static_cast<double>(b.t_ms - a.t_ms);
            return {a.pos[0] + f * (b.pos[0] - a.pos[0]),
                    a.pos[1] + f * (b.pos[1] - a.pos[1]),
                    a.pos[2] + f * (b.pos[2] - a.pos[2])};
        }
    }
    return waypoints.back().pos;
}

std::int64_t Trajectory::end_ms() const {
    return waypoints.empty() ? 0 : waypoints.back().t_ms;
}

void Trajectory::validate(const Box& bounds) const {
    if (waypoints.empty()) throw std::invalid_argument("trajectory: no waypoints");
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        if (waypoints[i].t_ms < 0)
            throw std::invalid_argument("trajectory: t_ms must be >= 0");
        if (i > 0 && waypoints[i].t_ms <= waypoints[i - 1].t_ms)
            throw std::invalid_argument("trajectory: t_ms must be strictly increasing");
        if (!bounds.contains(waypoints[i].pos))
            throw std::invalid_argument("trajectory: waypoint " + std::to_string(i) +
                                        " outside bounds");
    }
}

std::vector<RssiSample> generate_trace(const Deployment& deployment,
                                       const Trajectory& trajectory,
                                       const NoiseSpec& noise,
                                       std::int64_t period_ms) {
    deployment.validate();
    noise.validate();
    trajectory.validate(deployment.bounds);
    if (period_ms <= 0) throw std::invalid_argument("generate_trace: period_ms must be > 0");

    const double sigma = noise.effective_sigma(deployment.beacons.size());

    struct Stream {
        Rng rng;
        std::uniform_real_distribution<double> uniform{0.0, 1.0};
        std::normal_distribution<double> gauss{0.0, 1.0};
    };
    std::vector<Stream> streams;
    streams.reserve(deployment.beacons.size());
    for (const auto& b : deployment.beacons)
        streams.push_back({Rng(derive_seed(noise.seed, {fnv1a64(b.id)})), {}, {}});

    std::vector<RssiSample> trace;
    const int dim = deployment.bounds.dim;
    for (std::int64_t t = 0; t <= trajectory.end_ms(); t += period_ms) {
        const Vec3 pos = trajectory.position_at(t);
        for (std::size_t i = 0; i < deployment.beacons.size(); ++i) {
            auto& st = streams[i];
            const double drop = st.uniform(st.rng);
            const double g = st.gauss(st.rng);
            if (drop < noise.dropout_p) continue;

            const auto& b = deployment.beacons[i];
            const double d = std::max(kMinRangingDistance, distance(pos, b.pos, dim));
            trace.push_back({t, b.id, predict_rssi(b.model, d) + sigma * g});
        }
    }
    return trace;
}

void SweepSpec::validate(const Deployment& deployment) const {
    if (particle_counts.empty()) throw std::invalid_argument("sweep: empty particle list");
    if (beacon_counts.empty()) throw std::invalid_argument("sweep: empty beacon-count list");
    for (int p : particle_counts)
        if (p < 1) throw std::invalid_argument("sweep: particle counts must be >= 1");
    for (int b : beacon_counts)
        if (b < 1 || static_cast<std::size_t>(b) > deployment.beacons.size())
            throw std::invalid_argument("sweep: beacon count " + std::to_string(b) +
                                        " exceeds deployment size");
    if (repetitions < 1) throw std::invalid_argument("sweep: repetitions must be >= 1");
    if (steps_per_run < 1) throw std::invalid_argument("sweep: steps_per_run must be >= 1");
    if (eval_samples < 1 || eval_samples > steps_per_run)
        throw std::invalid_argument("sweep: eval_samples must be in [1, steps_per_run]");
    if (period_ms <= 0) throw std::invalid_argument("sweep: period_ms must be > 0");
}

namespace {

// Per-tick beacon_id -> rssi snapshots, in timestamp order.
std::vector<std::map<std::string, double>> group_by_tick(const std::vector<RssiSample>& trace) {
    std::map<std::int64_t, std::map<std::string, double>> by_t;
    for (const auto& s : trace) by_t[s.t_ms][s.beacon_id] = s.rssi;
    std::vector<std::map<std::string, double>> out;
    out.reserve(by_t.size());
    for (auto& [t, snap] : by_t) out.push_back(std::move(snap));
    return out;
}

struct CellTask {
    int particles;
    int beacons;
    std::size_t index;
};

}  // namespace

ScenarioResult run_sweep(const Deployment& deployment, const SweepSpec& sweep,
                         const NoiseSpec& noise, std::uint64_t seed, int jobs) {
    deployment.validate();
    noise.validate();
    sweep.validate(deployment);
    if (jobs < 1) jobs = 1;

    // The same stationary targets are reused in every cell, so cells differ
    // only by beacon count, particle count and their own engine streams.
    std::vector<Vec3> targets(static_cast<std::size_t>(sweep.repetitions));
    {
        Rng target_rng(derive_seed(seed, {kTagTargets}));
        for (auto& t : targets) {
            for (int a = 0; a < deployment.bounds.dim; ++a) {
                std::uniform_real_distribution<double> u(deployment.bounds.lo[a],
                                                         deployment.bounds.hi[a]);
                t[a] = u(target_rng);
            }
        }
    }

    std::vector<CellTask> tasks;
    for (int p : sweep.particle_counts)
        for (int b : sweep.beacon_counts)
            tasks.push_back({p, b, tasks.size()});

    ScenarioResult result;
    result.cells.resize(tasks.size());

    auto run_cell = [&](const CellTask& task) {
        Deployment sub = deployment;
        sub.beacons.assign(deployment.beacons.begin(),
                           deployment.beacons.begin() + task.beacons);
        const auto positions = sub.positions();
        const auto models = sub.models();

        PfConfig config;
        config.n_particles = task.particles;
        config.bounds = deployment.bounds;
        config.motion_sigma = sweep.pf.motion_sigma;
        config.likelihood_sigma = sweep.pf.likelihood_sigma;
        config.ess_threshold = sweep.pf.ess_threshold;

        std::vector<double> pf_errors, kfpf_errors;
        pf_errors.reserve(targets.size());
        kfpf_errors.reserve(targets.size());

        for (std::size_t rep = 0; rep < targets.size(); ++rep) {
            NoiseSpec rep_noise = noise;
            rep_noise.seed = derive_seed(seed, {kTagTrace, rep});

            const auto duration =
                static_cast<std::int64_t>(sweep.steps_per_run - 1) * sweep.period_ms;
            const auto trace = generate_trace(
                sub, Trajectory::stationary(targets[rep], duration), rep_noise,
                sweep.period_ms);
            const auto snapshots = group_by_tick(trace);

            config.seed = derive_seed(seed, {kTagEngine, rep,
                                             static_cast<std::uint64_t>(task.beacons),
                                             static_cast<std::uint64_t>(task.particles)});
            LocalizationEngine pf_engine(config, positions, sweep.kf);
            LocalizationEngine kfpf_engine(config, positions, sweep.kf);

            std::vector<Vec3> pf_est, kfpf_est;
            pf_est.reserve(snapshots.size());
            kfpf_est.reserve(snapshots.size());
            for (const auto& snap : snapshots) {
                pf_est.push_back(pf_engine.pf_step(snap, models).position);
                kfpf_est.push_back(kfpf_engine.kfpf_step(snap, models).position);
            }

            const std::size_t n_eval =
                std::min<std::size_t>(pf_est.size(), sweep.eval_samples);
            if (n_eval == 0) continue;  // fully dropped-out trace
            const std::vector<Vec3> actual(n_eval, targets[rep]);
            const std::vector<Vec3> pf_tail(pf_est.end() - n_eval, pf_est.end());
            const std::vector<Vec3> kfpf_tail(kfpf_est.end() - n_eval, kfpf_est.end());

            if (deployment.bounds.dim == 3) {
                pf_errors.push_back(error_3d(actual, pf_tail));
                kfpf_errors.push_back(error_3d(actual, kfpf_tail));
            } else {
                pf_errors.push_back(error_2d(actual, pf_tail));
                kfpf_errors.push_back(error_2d(actual, kfpf_tail));
            }
        }

        SweepCell cell;
        cell.particles = task.particles;
        cell.beacons = task.beacons;
        if (!pf_errors.empty()) {
            double s = 0.0;
            for (double e : pf_errors) s += e;
            cell.pf_mean = s / static_cast<double>(pf_errors.size());
            cell.pf_std = sample_std(pf_errors, cell.pf_mean);
            s = 0.0;
            for (double e : kfpf_errors) s += e;
            cell.kfpf_mean = s / static_cast<double>(kfpf_errors.size());
            cell.kfpf_std = sample_std(kfpf_errors, cell.kfpf_mean);
        }
        result.cells[task.index] = cell;
    };

    if (jobs == 1 || tasks.size() == 1) {
        for (const auto& task : tasks) run_cell(task);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                run_cell(tasks[i]);
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min<int>(jobs, static_cast<int>(tasks.size()));
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return result;
}

ProximityExperimentResult proximity_experiment(const PathLossModel& model,
                                               const std::vector<double>& distances,
                                               int samples_per_distance,
                                               const NoiseSpec& noise,
                                               int warmup,
                                               const KalmanParams& kf_params) {
    model.validate();
    noise.validate();
    if (samples_per_distance < 1)
        throw std::invalid_argument("proximity_experiment: samples_per_distance must be >= 1");
    if (warmup < ProximityPipeline::kDebounceLength)
        throw std::invalid_argument("proximity_experiment: warmup must cover the debounce");

    std::vector<ProximityZone> actual;
    std::vector<ProximityZone> predicted_baseline, predicted_sra, predicted_skf;

    for (std::size_t di = 0; di < distances.size(); ++di) {
        const double d = distances[di];
        if (d == 0.0)
            throw std::invalid_argument(
                "proximity_experiment: distance 0 is not rangeable; substitute 0.0001");
        const ProximityZone truth = classify_zone(d);

        Rng rng(derive_seed(noise.seed, {kTagProximity, di}));
        std::normal_distribution<double> gauss(0.0, 1.0);

        ProximityPipeline baseline(ProximityMode::Baseline, model, kf_params);
        ProximityPipeline sra(ProximityMode::Sra, model, kf_params);
        ProximityPipeline skf(ProximityMode::Skf, model, kf_params);

        const double clean = predict_rssi(model, d);
        for (int i = 0; i < warmup + samples_per_distance; ++i) {
            const double rssi = clean + noise.sigma * gauss(rng);
            const auto db = baseline.step(rssi);
            const auto ds = sra.step(rssi);
            const auto dk = skf.step(rssi);
            if (i < warmup) continue;

            if (ds->decided_zone == ProximityZone::Unknown ||
                dk->decided_zone == ProximityZone::Unknown)
                throw NumericError(
                    "proximity_experiment: pipeline undecided after warm-up; "
                    "increase warmup or reduce noise");
            actual.push_back(truth);
            predicted_baseline.push_back(db->decided_zone);
            predicted_sra.push_back(ds->decided_zone);
            predicted_skf.push_back(dk->decided_zone);
        }
    }

    ProximityExperimentResult r;
    r.baseline = confusion_build(actual, predicted_baseline);
    r.sra = confusion_build(actual, predicted_sra);
    r.skf = confusion_build(actual, predicted_skf);
    return r;
}

}  // namespace proxloc
