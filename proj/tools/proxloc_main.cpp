// proxloc: RSSI proximity and indoor-localization toolkit.
//
// Subcommands cover the full pipeline: fit a path-loss model from a site
// survey, smooth RSSI traces, classify proximity zones, localize with a
// particle filter (plain or Kalman-cascaded), synthesize traces, evaluate
// predictions, and run particles-by-beacons sweeps.
//
// Exit codes: 0 success, 2 input/parse error, 3 numeric/degenerate input,
// 64 usage error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxloc/errors.hpp"
#include "proxloc/kalman.hpp"
#include "proxloc/metrics.hpp"
#include "proxloc/particle_filter.hpp"
#include "proxloc/pathloss.hpp"
#include "proxloc/proximity.hpp"
#include "proxloc/scenario_io.hpp"
#include "proxloc/simulator.hpp"
#include "proxloc/trace_io.hpp"

namespace {

using namespace proxloc;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    return out;
}

// Writes to the file when given, otherwise to stdout.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
    } else {
        auto out = open_output(path);
        fn(out);
    }
}

Vec3 parse_point(const std::string& text, int dim) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            parts.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw ParseError("'" + text + "': expected comma-separated numbers");
        }
    }
    if (static_cast<int>(parts.size()) != dim)
        throw ParseError("'" + text + "': expected " + std::to_string(dim) +
                         " coordinates for this deployment");
    Vec3 p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = parts[static_cast<std::size_t>(a)];
    return p;
}

ProximityZone parse_zone(const std::string& s, int row) {
    if (s == "immediate") return ProximityZone::Immediate;
    if (s == "near") return ProximityZone::Near;
    if (s == "far") return ProximityZone::Far;
    if (s == "unknown") return ProximityZone::Unknown;
    throw ParseError("row " + std::to_string(row) + ": unknown zone label '" + s + "'");
}

std::vector<ProximityZone> read_zone_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "' for reading");
    std::vector<ProximityZone> zones;
    std::string line;
    int row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "zone")
                throw ParseError(path + ": row " + std::to_string(row) +
                                 ": expected header 'zone'");
            header_seen = true;
            continue;
        }
        zones.push_back(parse_zone(line, row));
    }
    if (!header_seen) throw ParseError(path + ": missing header 'zone'");
    return zones;
}

// Accepts `x_m,y_m[,z_m]` with an optional leading `t_ms` column.
std::vector<Vec3> read_position_file(const std::string& path, int* dim_out) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "' for reading");
    std::vector<Vec3> points;
    std::string line;
    int row = 0;
    int dim = 0;
    bool has_time = false;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line == "x_m,y_m") {
                dim = 2;
            } else if (line == "x_m,y_m,z_m") {
                dim = 3;
            } else if (line == "t_ms,x_m,y_m") {
                dim = 2;
                has_time = true;
            } else if (line == "t_ms,x_m,y_m,z_m") {
                dim = 3;
                has_time = true;
            } else {
                throw ParseError(path + ": row " + std::to_string(row) +
                                 ": expected a position header like 'x_m,y_m[,z_m]'");
            }
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ss, field, ',')) {
            try {
                vals.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ParseError(path + ": row " + std::to_string(row) + ": '" + field +
                                 "' is not a number");
            }
        }
        const std::size_t expected = static_cast<std::size_t>(dim) + (has_time ? 1 : 0);
        if (vals.size() != expected)
            throw ParseError(path + ": row " + std::to_string(row) + ": expected " +
                             std::to_string(expected) + " fields");
        const std::size_t off = has_time ? 1 : 0;
        Vec3 p{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = vals[off + static_cast<std::size_t>(a)];
        points.push_back(p);
    }
    if (!header_seen) throw ParseError(path + ": missing position header");
    if (dim_out) *dim_out = dim;
    return points;
}

std::vector<std::pair<std::int64_t, std::map<std::string, double>>> snapshots_by_tick(
    const std::vector<RssiSample>& trace) {
    std::map<std::int64_t, std::map<std::string, double>> by_t;
    for (const auto& s : trace) by_t[s.t_ms][s.beacon_id] = s.rssi;
    return {by_t.begin(), by_t.end()};
}

// ---------------------------------------------------------------------------
// Subcommand payloads
// ---------------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string output;
    double d0 = 1.0;
};

int cmd_fit(const FitArgs& a) {
    const auto points = read_calibration_file(a.input);
    if (points.empty()) throw ParseError(a.input + ": no calibration rows");
    const PathLossFit fit = fit_path_loss(points, a.d0);
    std::cout << "n=" << format_number(fit.model.n, 6) << ", c=" << format_number(fit.model.c, 6)
              << ", d0=" << format_number(fit.model.d0, 6)
              << ", r2=" << format_number(fit.r2, 6) << '\n';
    if (!a.output.empty()) write_model_file(fit, a.output);
    return kExitOk;
}

struct SmoothArgs {
    std::string input;
    std::string output;
    KalmanParams params;
};

int cmd_smooth(const SmoothArgs& a) {
    std::vector<std::string> warnings;
    const auto trace = read_trace_file(a.input, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    std::map<std::string, KalmanState> filters;
    with_output(a.output, [&](std::ostream& out) {
        out << "# format_version 1\n";
        out << "t_ms,beacon_id,rssi_dbm,rssi_filtered_dbm\n";
        for (const auto& s : trace) {
            auto [it, inserted] = filters.try_emplace(s.beacon_id, KalmanState{});
            if (inserted) {
                it->second = kf_new(a.params, s.rssi);
            } else {
                it->second = kf_step(it->second, a.params, s.rssi);
            }
            out << s.t_ms << ',' << s.beacon_id << ',' << format_number(s.rssi) << ','
                << format_number(it->second.rssi()) << '\n';
        }
    });
    return kExitOk;
}

struct ClassifyArgs {
    std::string mode = "sra";
    std::string model_path;
    std::string input;
    std::string output;
};

int cmd_classify(const ClassifyArgs& a) {
    const PathLossFit fit = read_model_file(a.model_path);
    ProximityMode mode = ProximityMode::Sra;
    if (a.mode == "baseline") mode = ProximityMode::Baseline;
    else if (a.mode == "sra") mode = ProximityMode::Sra;
    else if (a.mode == "skf") mode = ProximityMode::Skf;

    std::vector<std::string> warnings;
    const auto trace = read_trace_file(a.input, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    std::map<std::string, ProximityPipeline> pipelines;
    with_output(a.output, [&](std::ostream& out) {
        out << "# format_version 1\n";
        out << "t_ms,beacon_id,inst_zone,decided_zone,est_distance_m\n";
        for (const auto& s : trace) {
            auto it = pipelines.find(s.beacon_id);
            if (it == pipelines.end())
                it = pipelines.emplace(s.beacon_id, ProximityPipeline(mode, fit.model)).first;
            const auto d = it->second.step(s.rssi);
            if (!d) continue;  // stream closed by sentinel
            out << s.t_ms << ',' << s.beacon_id << ',' << zone_name(d->instantaneous_zone)
                << ',' << zone_name(d->decided_zone) << ','
                << format_number(d->est_distance, 6) << '\n';
        }
    });
    return kExitOk;
}

struct LocalizeArgs {
    std::string deployment;
    std::string input;
    std::string output;
    std::string algo = "kfpf";
    int particles = 1000;
    std::uint64_t seed = 0;
    double motion_sigma = 0.25;
    double likelihood_sigma = 1.0;
    double ess_threshold = 0.5;
};

int cmd_localize(const LocalizeArgs& a) {
    const Deployment dep = read_deployment_file(a.deployment);
    std::vector<std::string> warnings;
    const auto trace = read_trace_file(a.input, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    PfConfig config;
    config.n_particles = a.particles;
    config.bounds = dep.bounds;
    config.motion_sigma = a.motion_sigma;
    config.likelihood_sigma = a.likelihood_sigma;
    config.ess_threshold = a.ess_threshold;
    config.seed = a.seed;

    LocalizationEngine engine(config, dep.positions(), KalmanParams{});
    const auto models = dep.models();
    const bool cascaded = (a.algo == "kfpf");

    with_output(a.output, [&](std::ostream& out) {
        out << "# format_version 1\n";
        out << (dep.bounds.dim == 3 ? "t_ms,x_m,y_m,z_m" : "t_ms,x_m,y_m") << '\n';
        for (const auto& [t, snap] : snapshots_by_tick(trace)) {
            const auto r = cascaded ? engine.kfpf_step(snap, models)
                                    : engine.pf_step(snap, models);
            out << t << ',' << format_number(r.position[0], 6) << ','
                << format_number(r.position[1], 6);
            if (dep.bounds.dim == 3) out << ',' << format_number(r.position[2], 6);
            out << '\n';
        }
    });
    return kExitOk;
}

struct SimulateArgs {
    std::string deployment;
    std::string output;
    std::string target;
    std::string trajectory;
    std::int64_t duration_ms = 10000;
    std::int64_t period_ms = 100;
    double sigma = 3.0;
    double dropout = 0.0;
    std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& a) {
    const Deployment dep = read_deployment_file(a.deployment);

    Trajectory traj;
    if (!a.trajectory.empty()) {
        traj = read_trajectory_file(a.trajectory, dep.bounds.dim);
    } else if (!a.target.empty()) {
        traj = Trajectory::stationary(parse_point(a.target, dep.bounds.dim), a.duration_ms);
    } else {
        throw ParseError("simulate: give either --target or --trajectory");
    }

    NoiseSpec noise;
    noise.sigma = a.sigma;
    noise.dropout_p = a.dropout;
    noise.seed = a.seed;

    const auto trace = generate_trace(dep, traj, noise, a.period_ms);
    with_output(a.output, [&](std::ostream& out) { write_trace(trace, out); });
    return kExitOk;
}

struct EvaluateArgs {
    std::string kind = "zones";
    std::string actual;
    std::string predicted;
    std::string output;
    std::string format = "markdown";
};

int cmd_evaluate(const EvaluateArgs& a) {
    const ReportFormat fmt =
        (a.format == "csv") ? ReportFormat::Csv : ReportFormat::Markdown;

    if (a.kind == "zones") {
        const auto actual = read_zone_file(a.actual);
        const auto predicted = read_zone_file(a.predicted);
        const auto cm = confusion_build(actual, predicted);
        with_output(a.output, [&](std::ostream& out) {
            write_zone_report({{"predicted", cm}}, out, fmt);
            out << "\naccuracy: " << format_number(accuracy(cm), 6) << '\n';
        });
        return kExitOk;
    }

    int dim_a = 0, dim_p = 0;
    const auto actual = read_position_file(a.actual, &dim_a);
    const auto predicted = read_position_file(a.predicted, &dim_p);
    const int want = (a.kind == "position3d") ? 3 : 2;
    if (dim_a != want || dim_p != want)
        throw ParseError("evaluate: --kind " + a.kind + " needs " + std::to_string(want) +
                         "D position files");
    with_output(a.output, [&](std::ostream& out) {
        const double err = (want == 3) ? error_3d(actual, predicted)
                                       : error_2d(actual, predicted);
        out << (want == 3 ? "e3d" : "e2d") << "=" << format_number(err, 6);
        if (actual.size() == predicted.size())
            out << ", pointwise_mean=" << format_number(error_2d_pointwise(actual, predicted), 6);
        out << ", n=" << actual.size() << '\n';
    });
    return kExitOk;
}

struct SweepArgs {
    std::string scenario;
    std::string output;
    std::string format = "csv";
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

int cmd_sweep(const SweepArgs& a) {
    const Scenario sc = read_scenario_file(a.scenario);
    if (sc.sweep.beacon_counts.empty() || sc.sweep.particle_counts.empty())
        throw ParseError(a.scenario + ": scenario has no sweep block");

    const std::uint64_t seed = a.seed.value_or(sc.noise.seed);
    const auto result = run_sweep(sc.deployment, sc.sweep, sc.noise, seed, a.jobs);
    const ReportFormat fmt =
        (a.format == "markdown") ? ReportFormat::Markdown : ReportFormat::Csv;
    with_output(a.output, [&](std::ostream& out) { write_sweep_report(result, out, fmt); });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RSSI proximity and indoor-localization toolkit"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* cfit = app.add_subcommand("fit", "Fit a log-distance path-loss model from a calibration CSV");
    cfit->add_option("--input", fit.input, "Calibration CSV (distance_m,rssi_dbm)")->required();
    cfit->add_option("--output", fit.output, "Model record output path");
    cfit->add_option("--d0", fit.d0, "Reference distance, meters")->default_val(1.0);

    SmoothArgs smooth;
    auto* csmooth = app.add_subcommand("smooth", "Kalman-smooth an RSSI trace per beacon");
    csmooth->add_option("--input", smooth.input, "Trace CSV")->required();
    csmooth->add_option("--output", smooth.output, "Output CSV (default stdout)");
    csmooth->add_option("--dt", smooth.params.dt, "Rate parameter")->default_val(0.2);
    double q = 0.001, r = 0.10, p0 = 100.0;
    csmooth->add_option("--q", q, "Process-noise diagonal")->default_val(0.001);
    csmooth->add_option("--r", r, "Measurement-noise variance")->default_val(0.10);
    csmooth->add_option("--p0", p0, "Initial covariance diagonal")->default_val(100.0);

    ClassifyArgs classify;
    auto* cclassify = app.add_subcommand("classify", "Stream proximity-zone classification");
    cclassify->add_option("--mode", classify.mode, "baseline|sra|skf")
        ->check(CLI::IsMember({"baseline", "sra", "skf"}))
        ->default_val("sra");
    cclassify->add_option("--model", classify.model_path, "Path-loss model record")->required();
    cclassify->add_option("--input", classify.input, "Trace CSV")->required();
    cclassify->add_option("--output", classify.output, "Output CSV (default stdout)");

    LocalizeArgs localize;
    auto* clocalize = app.add_subcommand("localize", "Particle-filter localization from a trace");
    clocalize->add_option("--deployment", localize.deployment, "Deployment JSON")->required();
    clocalize->add_option("--input", localize.input, "Trace CSV")->required();
    clocalize->add_option("--output", localize.output, "Estimate CSV (default stdout)");
    clocalize->add_option("--algo", localize.algo, "pf|kfpf")
        ->check(CLI::IsMember({"pf", "kfpf"}))
        ->default_val("kfpf");
    clocalize->add_option("--particles", localize.particles, "Particle count")->default_val(1000);
    clocalize->add_option("--seed", localize.seed, "RNG seed")->default_val(0);
    clocalize->add_option("--motion-sigma", localize.motion_sigma, "Random-walk sigma, m/step")
        ->default_val(0.25);
    clocalize->add_option("--likelihood-sigma", localize.likelihood_sigma,
                          "Ranging likelihood sigma, m")
        ->default_val(1.0);
    clocalize->add_option("--ess-threshold", localize.ess_threshold,
                          "Resampling trigger, fraction of N")
        ->default_val(0.5);

    SimulateArgs simulate;
    auto* csimulate = app.add_subcommand("simulate", "Generate a synthetic RSSI trace");
    csimulate->add_option("--deployment", simulate.deployment, "Deployment JSON")->required();
    csimulate->add_option("--output", simulate.output, "Trace CSV (default stdout)");
    csimulate->add_option("--target", simulate.target, "Stationary target 'x,y[,z]'");
    csimulate->add_option("--trajectory", simulate.trajectory, "Trajectory JSON");
    csimulate->add_option("--duration-ms", simulate.duration_ms, "Stationary duration")
        ->default_val(10000);
    csimulate->add_option("--period-ms", simulate.period_ms, "Sample period")->default_val(100);
    csimulate->add_option("--sigma", simulate.sigma, "RSSI noise sigma, dB")->default_val(3.0);
    csimulate->add_option("--dropout", simulate.dropout, "Sample dropout probability")
        ->default_val(0.0);
    csimulate->add_option("--seed", simulate.seed, "RNG seed")->default_val(0);

    EvaluateArgs evaluate;
    auto* cevaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
    cevaluate->add_option("--kind", evaluate.kind, "zones|position2d|position3d")
        ->check(CLI::IsMember({"zones", "position2d", "position3d"}))
        ->default_val("zones");
    cevaluate->add_option("--actual", evaluate.actual, "Ground-truth CSV")->required();
    cevaluate->add_option("--predicted", evaluate.predicted, "Prediction CSV")->required();
    cevaluate->add_option("--output", evaluate.output, "Report path (default stdout)");
    cevaluate->add_option("--format", evaluate.format, "csv|markdown")
        ->check(CLI::IsMember({"csv", "markdown"}))
        ->default_val("markdown");

    SweepArgs sweep;
    auto* csweep = app.add_subcommand("sweep", "Particles-by-beacons localization sweep");
    csweep->add_option("--scenario", sweep.scenario, "Scenario JSON")->required();
    csweep->add_option("--output", sweep.output, "Results table (default stdout)");
    csweep->add_option("--format", sweep.format, "csv|markdown")
        ->check(CLI::IsMember({"csv", "markdown"}))
        ->default_val("csv");
    csweep->add_option("--jobs", sweep.jobs, "Worker threads for sweep cells")->default_val(1);
    std::uint64_t seed_flag = 0;
    auto* seed_opt = csweep->add_option("--seed", seed_flag, "Master seed (overrides scenario)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*cfit) return cmd_fit(fit);
        if (*csmooth) {
            smooth.params.q = {{{q, 0.0}, {0.0, q}}};
            smooth.params.r = r;
            smooth.params.p0 = {{{p0, 0.0}, {0.0, p0}}};
            return cmd_smooth(smooth);
        }
        if (*cclassify) return cmd_classify(classify);
        if (*clocalize) return cmd_localize(localize);
        if (*csimulate) return cmd_simulate(simulate);
        if (*cevaluate) return cmd_evaluate(evaluate);
        if (*csweep) {
            if (seed_opt->count() > 0) sweep.seed = seed_flag;
            return cmd_sweep(sweep);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
