#include "proxloc/particle_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace proxloc {

double ParticleSet::weight_sum() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.w;
    return s;
}

double ParticleSet::ess() const {
    double s2 = 0.0;
    for (const auto& p : particles) s2 += p.w * p.w;
    return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

void PfConfig::validate() const {
    if (n_particles < 1) throw std::invalid_argument("pf config: n_particles must be >= 1");
    bounds.validate();
    if (!(motion_sigma > 0.0))
        throw std::invalid_argument("pf config: motion_sigma must be > 0");
    if (!(likelihood_sigma > 0.0))
        throw std::invalid_argument("pf config: likelihood_sigma must be > 0");
    if (!(ess_threshold > 0.0) || ess_threshold > 1.0)
        throw std::invalid_argument("pf config: ess_threshold must be in (0, 1]");
}

ParticleSet pf_init(const PfConfig& config, Rng& rng) {
    config.validate();
    ParticleSet set;
    set.dim = config.bounds.dim;
    set.particles.resize(static_cast<std::size_t>(config.n_particles));
    const double w = 1.0 / static_cast<double>(config.n_particles);
    for (auto& p : set.particles) {
        for (int a = 0; a < set.dim; ++a) {
            std::uniform_real_distribution<double> u(config.bounds.lo[a], config.bounds.hi[a]);
            p.pos[a] = u(rng);
        }
        p.w = w;
    }
    return set;
}

ParticleSet pf_predict(const ParticleSet& set, const PfConfig& config, Rng& rng) {
    ParticleSet out = set;
    std::normal_distribution<double> gauss(0.0, config.motion_sigma);
    for (auto& p : out.particles) {
        for (int a = 0; a < out.dim; ++a) p.pos[a] += gauss(rng);
        p.pos = config.bounds.clamp(p.pos);
    }
    return out;
}

ParticleSet pf_update_weights(const ParticleSet& set,
                              const std::vector<BeaconObservation>& obs,
                              const BeaconPositions& beacons,
                              const PfConfig& config,
                              WeightUpdateOutcome* outcome) {
    if (outcome) *outcome = WeightUpdateOutcome{};
    if (obs.empty()) {
        if (outcome) outcome->empty_obs = true;
        return set;
    }

    // Resolve ids once; likelihood order then follows the sorted beacon map.
    std::vector<std::pair<const Vec3*, double>> ranged;
    ranged.reserve(obs.size());
    for (const auto& o : obs) {
        auto it = beacons.find(o.beacon_id);
        if (it == beacons.end())
            throw std::invalid_argument("pf_update_weights: unknown beacon id '" +
                                        o.beacon_id + "'");
        if (!(o.est_distance > 0.0))
            throw std::invalid_argument("pf_update_weights: est_distance must be > 0");
        ranged.emplace_back(&it->second, o.est_distance);
    }

    ParticleSet out = set;
    const double inv_two_sigma2 =
        1.0 / (2.0 * config.likelihood_sigma * config.likelihood_sigma);
    double sum = 0.0;
    for (auto& p : out.particles) {
        double log_like = 0.0;
        for (const auto& [beacon_pos, est_d] : ranged) {
            const double d = distance(p.pos, *beacon_pos, out.dim);
            const double resid = est_d - d;
            log_like -= resid * resid * inv_two_sigma2;
        }
        p.w *= std::exp(log_like);
        sum += p.w;
    }

    if (sum <= 0.0 || !std::isfinite(sum)) {
        // Every particle underflowed: the target is far outside the plausible
        // region. Recover with a uniform reset instead of killing the trace.
        const double w = 1.0 / static_cast<double>(out.particles.size());
        for (auto& p : out.particles) p.w = w;
        if (outcome) outcome->weights_reset = true;
        return out;
    }

    for (auto& p : out.particles) p.w /= sum;
    return out;
}

ParticleSet pf_resample(const ParticleSet& set, const PfConfig& config, Rng& rng) {
    const auto n = set.particles.size();
    if (set.ess() >= config.ess_threshold * static_cast<double>(n)) return set;

    ParticleSet out;
    out.dim = set.dim;
    out.particles.reserve(n);

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double step = 1.0 / static_cast<double>(n);
    double target = u01(rng) * step;
    double cum = 0.0;
    std::size_t i = 0;
    const double w = step;
    for (std::size_t j = 0; j < n; ++j) {
        while (cum + set.particles[i].w < target && i + 1 < n) {
            cum += set.particles[i].w;
            ++i;
        }
        out.particles.push_back({set.particles[i].pos, w});
        target += step;
    }
    return out;
}

Vec3 pf_estimate(const ParticleSet& set) {
    Vec3 e{0.0, 0.0, 0.0};
    for (const auto& p : set.particles) {
        for (int a = 0; a < set.dim; ++a) e[a] += p.w * p.pos[a];
    }
    return e;
}

LocalizationEngine::LocalizationEngine(PfConfig config, BeaconPositions beacons,
                                       KalmanParams kf_params)
    : config_(std::move(config)),
      beacons_(std::move(beacons)),
      kf_params_(kf_params),
      rng_(config_.seed) {
    config_.validate();
    kf_params_.validate();
    set_ = pf_init(config_, rng_);
    last_estimate_ = pf_estimate(set_);
}

LocalizationEngine::StepResult LocalizationEngine::run_step(
    const std::vector<BeaconObservation>& obs) {
    set_ = pf_predict(set_, config_, rng_);
    WeightUpdateOutcome outcome;
    set_ = pf_update_weights(set_, obs, beacons_, config_, &outcome);
    set_ = pf_resample(set_, config_, rng_);

    StepResult r;
    // The weighted mean can overshoot the box by an ulp when particles sit
    // exactly on a face; clamp so reported estimates always stay in bounds.
    r.position = config_.bounds.clamp(pf_estimate(set_));
    r.weights_reset = outcome.weights_reset;
    last_estimate_ = r.position;
    return r;
}

LocalizationEngine::StepResult LocalizationEngine::pf_step(
    const std::map<std::string, double>& rssi_snapshot, const BeaconModels& models) {
    if (rssi_snapshot.empty()) return {last_estimate_, true, false};

    std::vector<BeaconObservation> obs;
    obs.reserve(rssi_snapshot.size());
    for (const auto& [id, rssi] : rssi_snapshot) {
        auto model = models.find(id);
        if (model == models.end())
            throw std::invalid_argument("pf_step: no path-loss model for beacon '" + id + "'");
        obs.push_back({id, invert_rssi(model->second, rssi)});
    }
    return run_step(obs);
}

LocalizationEngine::StepResult LocalizationEngine::kfpf_step(
    const std::map<std::string, double>& rssi_snapshot, const BeaconModels& models) {
    if (rssi_snapshot.empty()) return {last_estimate_, true, false};

    std::vector<BeaconObservation> obs;
    obs.reserve(rssi_snapshot.size());
    for (const auto& [id, rssi] : rssi_snapshot) {
        auto model = models.find(id);
        if (model == models.end())
            throw std::invalid_argument("kfpf_step: no path-loss model for beacon '" + id + "'");

        auto [it, inserted] = filters_.try_emplace(id, KalmanState{});
        if (inserted) {
            it->second = kf_new(kf_params_, rssi);  // first sight anchors the filter
        } else {
            it->second = kf_step(it->second, kf_params_, rssi);
        }
        obs.push_back({id, invert_rssi(model->second, it->second.rssi())});
    }
    return run_step(obs);
}

}  // namespace proxloc
