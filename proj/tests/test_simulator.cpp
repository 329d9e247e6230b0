#include "proxloc/simulator.hpp"

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "proxloc/errors.hpp"
#include "test_data.hpp"

using namespace proxloc;

namespace {

Deployment one_beacon_deployment() {
    Deployment dep;
    dep.bounds.lo = {0.0, 0.0, 0.0};
    dep.bounds.hi = {10.0, 10.0, 0.0};
    dep.bounds.dim = 2;
    dep.beacons.push_back({"b1", {0.0, 0.0, 0.0}, testdata::env1_model()});
    return dep;
}

Deployment six_beacon_deployment() {
    Deployment dep;
    dep.bounds.lo = {0.0, 0.0, 0.0};
    dep.bounds.hi = {7.0, 6.0, 0.0};
    dep.bounds.dim = 2;
    const Vec3 spots[] = {{0.2, 0.2, 0.0}, {6.8, 0.2, 0.0}, {6.8, 5.8, 0.0},
                          {0.2, 5.8, 0.0}, {3.5, 0.2, 0.0}, {3.5, 5.8, 0.0}};
    int i = 1;
    for (const auto& s : spots)
        dep.beacons.push_back({"b" + std::to_string(i++), s, testdata::env1_model()});
    return dep;
}

}  // namespace

TEST_CASE("a noiseless stationary target at the reference distance") {
    auto dep = one_beacon_deployment();
    NoiseSpec noise;
    noise.sigma = 0.0;
    const auto trace =
        generate_trace(dep, Trajectory::stationary({1.0, 0.0, 0.0}, 1000), noise, 100);
    REQUIRE(trace.size() == 11);  // ticks 0..1000 inclusive
    for (const auto& s : trace) {
        CHECK(s.beacon_id == "b1");
        CHECK(s.rssi == -62.78);  // exactly the reference RSSI
    }
}

TEST_CASE("full dropout produces an empty trace") {
    auto dep = one_beacon_deployment();
    NoiseSpec noise;
    noise.dropout_p = 1.0;
    const auto trace =
        generate_trace(dep, Trajectory::stationary({1.0, 1.0, 0.0}, 1000), noise, 100);
    CHECK(trace.empty());
}

TEST_CASE("traces are byte-identical per seed") {
    auto dep = six_beacon_deployment();
    NoiseSpec noise;
    noise.seed = 99;
    const auto traj = Trajectory::stationary({2.0, 3.0, 0.0}, 2000);
    const auto t1 = generate_trace(dep, traj, noise, 100);
    const auto t2 = generate_trace(dep, traj, noise, 100);
    CHECK(t1 == t2);

    std::stringstream a, b;
    write_trace(t1, a);
    write_trace(t2, b);
    CHECK(a.str() == b.str());

    noise.seed = 100;
    CHECK(generate_trace(dep, traj, noise, 100) != t1);
}

TEST_CASE("adding beacons does not perturb existing noise streams") {
    auto full = six_beacon_deployment();
    auto first_three = full;
    first_three.beacons.resize(3);

    NoiseSpec noise;
    noise.seed = 31;
    const auto traj = Trajectory::stationary({2.0, 3.0, 0.0}, 3000);
    const auto small = generate_trace(first_three, traj, noise, 100);
    const auto big = generate_trace(full, traj, noise, 100);

    std::vector<RssiSample> big_subset;
    for (const auto& s : big)
        if (s.beacon_id == "b1" || s.beacon_id == "b2" || s.beacon_id == "b3")
            big_subset.push_back(s);
    CHECK(big_subset == small);
}

TEST_CASE("empirical noise matches the specification") {
    auto dep = one_beacon_deployment();
    NoiseSpec noise;
    noise.sigma = 3.0;
    noise.seed = 8;
    const auto trace = generate_trace(
        dep, Trajectory::stationary({4.0, 0.0, 0.0}, 100 * 20000), noise, 100);
    REQUIRE(trace.size() >= 10000);
    double mean = 0.0;
    for (const auto& s : trace) mean += s.rssi;
    mean /= static_cast<double>(trace.size());
    double var = 0.0;
    for (const auto& s : trace) var += (s.rssi - mean) * (s.rssi - mean);
    var /= static_cast<double>(trace.size() - 1);
    CHECK(std::abs(std::sqrt(var) - 3.0) < 0.15);  // within 5%
}

TEST_CASE("the crowding knob inflates sigma above the threshold") {
    auto dep = six_beacon_deployment();
    NoiseSpec noise;
    noise.sigma = 2.0;
    noise.crowding_threshold = 4;
    noise.crowding_factor = 2.5;
    CHECK(noise.effective_sigma(3) == 2.0);
    CHECK(noise.effective_sigma(4) == 5.0);
    CHECK(noise.effective_sigma(dep.beacons.size()) == 5.0);

    NoiseSpec off = noise;
    off.crowding_threshold = 0;
    CHECK(off.effective_sigma(100) == 2.0);
}

TEST_CASE("trace generation validates its inputs") {
    auto dep = one_beacon_deployment();
    NoiseSpec noise;
    CHECK_THROWS_AS(
        generate_trace(dep, Trajectory::stationary({20.0, 0.0, 0.0}, 1000), noise, 100),
        std::invalid_argument);
    CHECK_THROWS_AS(
        generate_trace(dep, Trajectory::stationary({1.0, 1.0, 0.0}, 1000), noise, 0),
        std::invalid_argument);

    Trajectory bad;
    bad.waypoints = {{100, {1.0, 1.0, 0.0}}, {100, {2.0, 2.0, 0.0}}};
    CHECK_THROWS_AS(generate_trace(dep, bad, noise, 100), std::invalid_argument);

    NoiseSpec bad_noise;
    bad_noise.dropout_p = 1.5;
    CHECK_THROWS_AS(
        generate_trace(dep, Trajectory::stationary({1.0, 1.0, 0.0}, 100), bad_noise, 100),
        std::invalid_argument);
}

TEST_CASE("a moving target follows the waypoints") {
    auto dep = one_beacon_deployment();
    Trajectory traj;
    traj.waypoints = {{0, {1.0, 0.0, 0.0}}, {1000, {3.0, 0.0, 0.0}}};
    NoiseSpec noise;
    noise.sigma = 0.0;
    const auto trace = generate_trace(dep, traj, noise, 500);
    REQUIRE(trace.size() == 3);
    CHECK(trace[0].rssi == doctest::Approx(predict_rssi(testdata::env1_model(), 1.0)));
    CHECK(trace[1].rssi == doctest::Approx(predict_rssi(testdata::env1_model(), 2.0)));
    CHECK(trace[2].rssi == doctest::Approx(predict_rssi(testdata::env1_model(), 3.0)));
}

TEST_CASE("run_sweep on a noiseless cell localizes both ways") {
    auto dep = six_beacon_deployment();
    SweepSpec sweep;
    sweep.beacon_counts = {6};
    sweep.particle_counts = {1000};
    sweep.repetitions = 1;
    sweep.steps_per_run = 40;
    sweep.eval_samples = 10;
    NoiseSpec noise;
    noise.sigma = 0.0;

    const auto result = run_sweep(dep, sweep, noise, 4242, 1);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.cells[0].pf_mean < 0.3);
    CHECK(result.cells[0].kfpf_mean < 0.3);
}

TEST_CASE("run_sweep is deterministic and fills the full grid") {
    auto dep = six_beacon_deployment();
    SweepSpec sweep;
    sweep.beacon_counts = {3, 4, 5};
    sweep.particle_counts = {200, 400};
    sweep.repetitions = 2;
    sweep.steps_per_run = 20;
    sweep.eval_samples = 5;
    NoiseSpec noise;

    const auto r1 = run_sweep(dep, sweep, noise, 7, 1);
    const auto r2 = run_sweep(dep, sweep, noise, 7, 2);
    REQUIRE(r1.cells.size() == 6);  // |particles| x |beacons|
    for (std::size_t i = 0; i < r1.cells.size(); ++i) {
        CHECK(r1.cells[i].pf_mean == r2.cells[i].pf_mean);
        CHECK(r1.cells[i].kfpf_mean == r2.cells[i].kfpf_mean);
        CHECK(r1.cells[i].pf_std == r2.cells[i].pf_std);
        CHECK(r1.cells[i].kfpf_std == r2.cells[i].kfpf_std);
    }
    // particles-major ordering
    CHECK(r1.cells[0].particles == 200);
    CHECK(r1.cells[0].beacons == 3);
    CHECK(r1.cells[2].beacons == 5);
    CHECK(r1.cells[3].particles == 400);

    SweepSpec bad = sweep;
    bad.particle_counts.clear();
    CHECK_THROWS_AS(run_sweep(dep, bad, noise, 7, 1), std::invalid_argument);
}

TEST_CASE("zero-noise proximity experiment separates the methods") {
    NoiseSpec noise;
    noise.sigma = 0.0;
    const std::vector<double> distances{0.0001, 0.6, 1.8, 2.4, 4.3, 5.5};
    const auto r = proximity_experiment(testdata::env1_model(), distances, 20, noise);

    CHECK(r.sra.total() == 120);  // 6 distances x 20 decisions
    CHECK(r.skf.total() == 120);
    CHECK(r.baseline.total() == 120);

    CHECK(accuracy(r.sra) == 1.0);
    CHECK(accuracy(r.skf) == 1.0);
    CHECK(accuracy(r.baseline) < 1.0);
    // The free-space benchmark compresses the two Far distances into Near.
    CHECK(r.baseline.counts[2][1] == 40);
    CHECK(accuracy(r.baseline) == doctest::Approx(80.0 / 120.0));
}

TEST_CASE("proximity experiment rejects a literal zero distance") {
    NoiseSpec noise;
    CHECK_THROWS_AS(proximity_experiment(testdata::env1_model(), {0.0, 1.0}, 5, noise),
                    std::invalid_argument);
}

TEST_CASE("noisy proximity experiment keeps the calibrated methods ahead") {
    const std::vector<double> distances{0.0001, 0.6, 1.8, 2.4, 4.3, 5.5};
    double base_acc = 0.0, sra_acc = 0.0, skf_acc = 0.0;
    for (std::uint64_t run = 0; run < 5; ++run) {
        NoiseSpec noise;
        noise.sigma = 3.0;
        noise.seed = 600 + run;
        const auto r = proximity_experiment(testdata::env1_model(), distances, 20, noise);
        base_acc += accuracy(r.baseline);
        sra_acc += accuracy(r.sra);
        skf_acc += accuracy(r.skf);
    }
    CHECK(sra_acc > base_acc);
    CHECK(skf_acc > base_acc);
}
