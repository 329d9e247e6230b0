#include "proxloc/trace_io.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "proxloc/errors.hpp"
#include "proxloc/scenario_io.hpp"

using namespace proxloc;

namespace {

std::vector<RssiSample> seeded_samples(std::size_t n) {
    std::mt19937_64 rng(1337);
    std::uniform_real_distribution<double> rssi(-95.0, -25.0);
    std::uniform_int_distribution<int> beacon(1, 5);
    std::vector<RssiSample> samples;
    for (std::size_t i = 0; i < n; ++i) {
        samples.push_back({static_cast<std::int64_t>(i * 100),
                           "b" + std::to_string(beacon(rng)), rssi(rng)});
    }
    return samples;
}

}  // namespace

TEST_CASE("trace round-trips exactly") {
    const auto samples = seeded_samples(1000);
    std::stringstream buf;
    write_trace(samples, buf);
    const auto back = read_trace(buf);
    CHECK(back == samples);
}

TEST_CASE("empty trace file with header yields an empty list") {
    std::stringstream buf("t_ms,beacon_id,rssi_dbm\n");
    CHECK(read_trace(buf).empty());
}

TEST_CASE("sentinel zero rows are rejected with their row number") {
    std::stringstream buf("t_ms,beacon_id,rssi_dbm\n5,b1,0\n");
    try {
        read_trace(buf);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("malformed rows name row and column") {
    std::stringstream buf("t_ms,beacon_id,rssi_dbm\n100,b1,-60\n200,b2,spam\n");
    try {
        read_trace(buf);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 3") != std::string::npos);
        CHECK(msg.find("column 3") != std::string::npos);
    }

    std::stringstream missing("t_ms,beacon_id,rssi_dbm\n100,b1\n");
    CHECK_THROWS_AS(read_trace(missing), ParseError);

    std::stringstream no_header("100,b1,-60\n");
    CHECK_THROWS_AS(read_trace(no_header), ParseError);
}

TEST_CASE("CRLF and comment lines are accepted") {
    std::stringstream buf("# format_version 1\r\nt_ms,beacon_id,rssi_dbm\r\n0,b1,-60.5\r\n");
    const auto samples = read_trace(buf);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].beacon_id == "b1");
    CHECK(samples[0].rssi == -60.5);
}

TEST_CASE("non-monotonic timestamps warn per beacon but still parse") {
    std::stringstream buf(
        "t_ms,beacon_id,rssi_dbm\n200,b1,-60\n100,b1,-61\n150,b2,-62\n300,b2,-63\n");
    std::vector<std::string> warnings;
    const auto samples = read_trace(buf, &warnings);
    CHECK(samples.size() == 4);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("b1") != std::string::npos);
}

TEST_CASE("model record round-trips and tolerates a missing r2") {
    PathLossFit fit{{0.9116, -62.78, 1.0}, 0.9915};
    std::stringstream buf;
    write_model(fit, buf);
    const auto back = read_model(buf);
    CHECK(back.model.n == fit.model.n);
    CHECK(back.model.c == fit.model.c);
    CHECK(back.model.d0 == fit.model.d0);
    CHECK(back.r2 == fit.r2);

    std::stringstream minimal("n=2, c=-60\n");
    const auto m = read_model(minimal);
    CHECK(m.model.d0 == 1.0);
    CHECK(std::isnan(m.r2));

    std::stringstream junk("nonsense\n");
    CHECK_THROWS_AS(read_model(junk), ParseError);
    std::stringstream missing("n=2, d0=1\n");
    CHECK_THROWS_AS(read_model(missing), ParseError);
}

TEST_CASE("calibration reader parses survey rows") {
    std::stringstream buf("distance_m,rssi_dbm\n1,-59.9565\n2,-64.4782\n");
    const auto points = read_calibration(buf);
    REQUIRE(points.size() == 2);
    CHECK(points[0].distance == 1.0);
    CHECK(points[1].mean_rssi == -64.4782);
}

TEST_CASE("deployment JSON parses a minimal file") {
    std::stringstream buf(R"({
        "bounds": {"x": [0, 7], "y": [0, 6]},
        "beacons": [{"id": "b1", "x": 1, "y": 2, "n": 0.9116, "c": -62.78}]
    })");
    const auto dep = read_deployment(buf);
    CHECK(dep.bounds.dim == 2);
    REQUIRE(dep.beacons.size() == 1);
    CHECK(dep.beacons[0].model.d0 == 1.0);  // defaulted
}

TEST_CASE("deployment JSON rejects duplicates and out-of-bounds beacons") {
    std::stringstream dup(R"({
        "bounds": {"x": [0, 7], "y": [0, 6]},
        "beacons": [{"id": "b1", "x": 1, "y": 2, "n": 1, "c": -60},
                    {"id": "b1", "x": 2, "y": 2, "n": 1, "c": -60}]
    })");
    CHECK_THROWS_WITH_AS(read_deployment(dup),
                         "deployment: duplicate beacon id 'b1'", ParseError);

    std::stringstream outside(R"({
        "bounds": {"x": [0, 7], "y": [0, 6]},
        "beacons": [{"id": "b1", "x": 9, "y": 2, "n": 1, "c": -60}]
    })");
    CHECK_THROWS_WITH_AS(read_deployment(outside),
                         "deployment: beacon 'b1' outside bounds", ParseError);
}

TEST_CASE("deployment JSON errors carry the field path") {
    std::stringstream missing(R"({
        "bounds": {"x": [0, 7], "y": [0, 6]},
        "beacons": [{"id": "b1", "x": 1, "y": 2, "c": -60}]
    })");
    try {
        read_deployment(missing);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()) == "beacons[0].n: missing");
    }

    std::stringstream z_in_2d(R"({
        "bounds": {"x": [0, 7], "y": [0, 6]},
        "beacons": [{"id": "b1", "x": 1, "y": 2, "z": 1, "n": 1, "c": -60}]
    })");
    CHECK_THROWS_AS(read_deployment(z_in_2d), ParseError);
}

TEST_CASE("3D deployments carry z bounds and beacon heights") {
    std::stringstream buf(R"({
        "bounds": {"x": [0, 7], "y": [0, 6], "z": [0, 3]},
        "beacons": [{"id": "b1", "x": 1, "y": 2, "z": 2.5, "n": 1, "c": -60}]
    })");
    const auto dep = read_deployment(buf);
    CHECK(dep.bounds.dim == 3);
    CHECK(dep.beacons[0].pos[2] == 2.5);
}

TEST_CASE("trajectory JSON parses waypoints and checks the dimension") {
    std::stringstream buf(R"({"waypoints": [
        {"t_ms": 0, "pos": [1.0, 2.0]},
        {"t_ms": 1000, "pos": [3.0, 4.0]}
    ]})");
    const auto traj = read_trajectory(buf, 2);
    REQUIRE(traj.waypoints.size() == 2);
    CHECK(traj.waypoints[1].pos[0] == 3.0);

    std::stringstream wrong_dim(R"({"waypoints": [{"t_ms": 0, "pos": [1.0, 2.0]}]})");
    CHECK_THROWS_AS(read_trajectory(wrong_dim, 3), ParseError);
}

TEST_CASE("sweep report shapes") {
    ScenarioResult result;
    result.cells = {{400, 3, 1.5, 0.2, 1.2, 0.1},
                    {400, 4, 1.4, 0.2, 1.1, 0.1},
                    {800, 3, 1.3, 0.2, 1.0, 0.1},
                    {800, 4, 1.2, 0.2, 0.9, 0.1}};

    std::stringstream md;
    write_sweep_report(result, md, ReportFormat::Markdown);
    int data_rows = 0;
    std::string line;
    while (std::getline(md, line)) {
        if (line.rfind("| 4", 0) == 0 || line.rfind("| 8", 0) == 0) ++data_rows;
    }
    CHECK(data_rows == 4);

    std::stringstream csv;
    write_sweep_report(result, csv, ReportFormat::Csv);
    std::getline(csv, line);  // version comment
    std::getline(csv, line);
    CHECK(line == "particles,beacons,pf_mean,pf_std,kfpf_mean,kfpf_std,improvement_pct");
    std::getline(csv, line);
    CHECK(line.rfind("400,3,1.5,0.2,1.2,0.1,", 0) == 0);
}

TEST_CASE("zone report marks undefined ratios") {
    ConfusionMatrix3 cm;
    cm.counts = {{{10, 0, 0}, {0, 10, 0}, {0, 0, 0}}};  // Far never seen
    std::stringstream csv;
    write_zone_report({{"sra", cm}}, csv, ReportFormat::Csv);
    const std::string text = csv.str();
    CHECK(text.find("undef") != std::string::npos);
    CHECK(text.find("sra,immediate,10,10,0,0,1,1,1,0,0,0,1") != std::string::npos);

    std::stringstream md;
    write_zone_report({{"sra", cm}}, md, ReportFormat::Markdown);
    CHECK(md.str().find("| Sensitivity |") != std::string::npos);
}

TEST_CASE("format_number emits exact shortest decimals") {
    CHECK(format_number(0.4901) == "0.4901");
    CHECK(format_number(-62.78) == "-62.78");
    CHECK(format_number(1.0) == "1");
    const double v = -60.123456789012345;
    CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(0.658333, 4) == "0.6583");
}
