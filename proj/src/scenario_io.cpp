#include "proxloc/scenario_io.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "proxloc/errors.hpp"
#include "proxloc/trace_io.hpp"

namespace proxloc {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        throw ParseError(path + "." + key + ": missing");
    if (!j[key].is_number())
        throw ParseError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& path, const char* key,
                     double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ParseError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

std::array<double, 2> get_range(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ParseError(path + "." + key + ": missing");
    const auto& r = j[key];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw ParseError(path + "." + key + ": expected [lo, hi]");
    return {r[0].get<double>(), r[1].get<double>()};
}

std::vector<int> get_int_list(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) throw ParseError(path + "." + key + ": missing");
    const auto& a = j[key];
    if (!a.is_array() || a.empty()) throw ParseError(path + "." + key + ": expected a list");
    std::vector<int> out;
    for (const auto& v : a) {
        if (!v.is_number_integer()) throw ParseError(path + "." + key + ": expected integers");
        out.push_back(v.get<int>());
    }
    return out;
}

json parse_root(std::istream& in) {
    json root;
    try {
        root = json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("json: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("json: root must be an object");
    return root;
}

Deployment deployment_from_json(const json& root) {
    Deployment dep;

    if (!root.contains("bounds")) throw ParseError("bounds: missing");
    const auto& jb = root["bounds"];
    const auto x = get_range(jb, "bounds", "x");
    const auto y = get_range(jb, "bounds", "y");
    dep.bounds.lo = {x[0], y[0], 0.0};
    dep.bounds.hi = {x[1], y[1], 0.0};
    dep.bounds.dim = 2;
    if (jb.contains("z")) {
        const auto z = get_range(jb, "bounds", "z");
        dep.bounds.lo[2] = z[0];
        dep.bounds.hi[2] = z[1];
        dep.bounds.dim = 3;
    }

    if (!root.contains("beacons") || !root["beacons"].is_array())
        throw ParseError("beacons: missing or not an array");
    std::size_t i = 0;
    for (const auto& jbe : root["beacons"]) {
        const std::string path = "beacons[" + std::to_string(i) + "]";
        if (!jbe.is_object()) throw ParseError(path + ": expected an object");
        BeaconSpec b;
        if (!jbe.contains("id") || !jbe["id"].is_string())
            throw ParseError(path + ".id: missing or not a string");
        b.id = jbe["id"].get<std::string>();
        b.pos[0] = get_number(jbe, path, "x");
        b.pos[1] = get_number(jbe, path, "y");
        if (dep.bounds.dim == 3) {
            b.pos[2] = get_number(jbe, path, "z");
        } else if (jbe.contains("z")) {
            throw ParseError(path + ".z: present but bounds are 2D (add bounds.z)");
        }
        b.model.n = get_number(jbe, path, "n");
        b.model.c = get_number(jbe, path, "c");
        b.model.d0 = get_number_or(jbe, path, "d0", 1.0);
        dep.beacons.push_back(std::move(b));
        ++i;
    }

    try {
        dep.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return dep;
}

Scenario scenario_from_json(const json& root) {
    Scenario sc;
    sc.deployment = deployment_from_json(root);

    if (root.contains("noise")) {
        const auto& jn = root["noise"];
        sc.noise.sigma = get_number_or(jn, "noise", "sigma", sc.noise.sigma);
        sc.noise.dropout_p = get_number_or(jn, "noise", "dropout_p", sc.noise.dropout_p);
        sc.noise.seed = static_cast<std::uint64_t>(
            get_number_or(jn, "noise", "seed", 0.0));
        sc.noise.crowding_threshold = static_cast<int>(
            get_number_or(jn, "noise", "crowding_threshold", 0.0));
        sc.noise.crowding_factor =
            get_number_or(jn, "noise", "crowding_factor", 1.0);
    }

    if (root.contains("pf")) {
        const auto& jp = root["pf"];
        sc.sweep.pf.motion_sigma =
            get_number_or(jp, "pf", "motion_sigma", sc.sweep.pf.motion_sigma);
        sc.sweep.pf.likelihood_sigma =
            get_number_or(jp, "pf", "likelihood_sigma", sc.sweep.pf.likelihood_sigma);
        sc.sweep.pf.ess_threshold =
            get_number_or(jp, "pf", "ess_threshold", sc.sweep.pf.ess_threshold);
    }

    if (root.contains("sweep")) {
        const auto& js = root["sweep"];
        sc.sweep.beacon_counts = get_int_list(js, "sweep", "beacon_counts");
        sc.sweep.particle_counts = get_int_list(js, "sweep", "particle_counts");
        sc.sweep.repetitions =
            static_cast<int>(get_number_or(js, "sweep", "repetitions", 10.0));
        sc.sweep.steps_per_run =
            static_cast<int>(get_number_or(js, "sweep", "steps_per_run", 60.0));
        sc.sweep.eval_samples =
            static_cast<int>(get_number_or(js, "sweep", "eval_samples", 10.0));
        sc.sweep.period_ms =
            static_cast<std::int64_t>(get_number_or(js, "sweep", "period_ms", 100.0));
    }
    return sc;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "' for reading");
    return in;
}

std::string fmt_ratio(const std::optional<double>& v) {
    return v ? format_number(*v, 6) : std::string("undef");
}

double improvement_pct(const SweepCell& c) {
    if (c.pf_mean == 0.0) return 0.0;
    return 100.0 * (c.pf_mean - c.kfpf_mean) / c.pf_mean;
}

}  // namespace

Deployment read_deployment(std::istream& in) {
    return deployment_from_json(parse_root(in));
}

Deployment read_deployment_file(const std::string& path) {
    auto in = open_input(path);
    return read_deployment(in);
}

Scenario read_scenario(std::istream& in) {
    return scenario_from_json(parse_root(in));
}

Scenario read_scenario_file(const std::string& path) {
    auto in = open_input(path);
    return read_scenario(in);
}

Trajectory read_trajectory(std::istream& in, int dim) {
    const json root = parse_root(in);
    if (!root.contains("waypoints") || !root["waypoints"].is_array() ||
        root["waypoints"].empty())
        throw ParseError("waypoints: missing or empty");

    Trajectory traj;
    std::size_t i = 0;
    for (const auto& jw : root["waypoints"]) {
        const std::string path = "waypoints[" + std::to_string(i) + "]";
        if (!jw.is_object()) throw ParseError(path + ": expected an object");
        Waypoint w;
        w.t_ms = static_cast<std::int64_t>(get_number(jw, path, "t_ms"));
        if (!jw.contains("pos") || !jw["pos"].is_array())
            throw ParseError(path + ".pos: missing or not an array");
        const auto& jp = jw["pos"];
        if (static_cast<int>(jp.size()) != dim)
            throw ParseError(path + ".pos: expected " + std::to_string(dim) +
                             " components, got " + std::to_string(jp.size()));
        for (int a = 0; a < dim; ++a) {
            if (!jp[a].is_number()) throw ParseError(path + ".pos: expected numbers");
            w.pos[static_cast<std::size_t>(a)] = jp[a].get<double>();
        }
        traj.waypoints.push_back(w);
        ++i;
    }
    return traj;
}

Trajectory read_trajectory_file(const std::string& path, int dim) {
    auto in = open_input(path);
    return read_trajectory(in, dim);
}

void write_sweep_report(const ScenarioResult& result, std::ostream& out,
                        ReportFormat format) {
    const char* cols[] = {"particles", "beacons",   "pf_mean",        "pf_std",
                          "kfpf_mean", "kfpf_std", "improvement_pct"};
    if (format == ReportFormat::Csv) {
        out << "# format_version 1\n";
        for (std::size_t i = 0; i < std::size(cols); ++i)
            out << cols[i] << (i + 1 < std::size(cols) ? ',' : '\n');
        for (const auto& c : result.cells) {
            out << c.particles << ',' << c.beacons << ',' << format_number(c.pf_mean, 6)
                << ',' << format_number(c.pf_std, 6) << ',' << format_number(c.kfpf_mean, 6)
                << ',' << format_number(c.kfpf_std, 6) << ','
                << format_number(improvement_pct(c), 6) << '\n';
        }
        return;
    }

    out << '|';
    for (const auto* c : cols) out << ' ' << c << " |";
    out << "\n|";
    for (std::size_t i = 0; i < std::size(cols); ++i) out << "---:|";
    out << '\n';
    for (const auto& c : result.cells) {
        out << "| " << c.particles << " | " << c.beacons << " | "
            << format_number(c.pf_mean, 6) << " | " << format_number(c.pf_std, 6) << " | "
            << format_number(c.kfpf_mean, 6) << " | " << format_number(c.kfpf_std, 6)
            << " | " << format_number(improvement_pct(c), 6) << " |\n";
    }
}

void write_zone_report(const std::vector<std::pair<std::string, ConfusionMatrix3>>& methods,
                       std::ostream& out, ReportFormat format) {
    constexpr ProximityZone zones[] = {ProximityZone::Immediate, ProximityZone::Near,
                                       ProximityZone::Far};

    if (format == ReportFormat::Csv) {
        out << "# format_version 1\n";
        out << "method,zone,tp,tn,fp,fn,precision,sensitivity,specificity,fallout,fdr,fnr,"
               "accuracy\n";
        for (const auto& [name, cm] : methods) {
            const double acc = accuracy(cm);
            for (ProximityZone z : zones) {
                const ZoneMetrics m = zone_metrics(cm, z);
                out << name << ',' << zone_name(z) << ',' << m.tp << ',' << m.tn << ','
                    << m.fp << ',' << m.fn << ',' << fmt_ratio(m.precision) << ','
                    << fmt_ratio(m.sensitivity) << ',' << fmt_ratio(m.specificity) << ','
                    << fmt_ratio(m.fallout) << ',' << fmt_ratio(m.fdr) << ','
                    << fmt_ratio(m.fnr) << ',' << format_number(acc, 6) << '\n';
            }
        }
        return;
    }

    // Wide layout: metric rows, one column per zone x method.
    out << "| Metric |";
    for (ProximityZone z : zones)
        for (const auto& [name, cm] : methods) out << ' ' << zone_name(z) << '/' << name << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < 3 * methods.size(); ++i) out << "---:|";
    out << '\n';

    struct Row {
        const char* label;
        std::function<std::string(const ZoneMetrics&)> cell;
    };
    const Row rows[] = {
        {"True Positive", [](const ZoneMetrics& m) { return std::to_string(m.tp); }},
        {"True Negative", [](const ZoneMetrics& m) { return std::to_string(m.tn); }},
        {"False Positive", [](const ZoneMetrics& m) { return std::to_string(m.fp); }},
        {"False Negative", [](const ZoneMetrics& m) { return std::to_string(m.fn); }},
        {"Precision", [](const ZoneMetrics& m) { return fmt_ratio(m.precision); }},
        {"Sensitivity", [](const ZoneMetrics& m) { return fmt_ratio(m.sensitivity); }},
        {"Specificity", [](const ZoneMetrics& m) { return fmt_ratio(m.specificity); }},
        {"Fall out", [](const ZoneMetrics& m) { return fmt_ratio(m.fallout); }},
        {"FDR", [](const ZoneMetrics& m) { return fmt_ratio(m.fdr); }},
        {"False Negative Rate", [](const ZoneMetrics& m) { return fmt_ratio(m.fnr); }},
    };
    for (const auto& row : rows) {
        out << "| " << row.label << " |";
        for (ProximityZone z : zones)
            for (const auto& [name, cm] : methods) out << ' ' << row.cell(zone_metrics(cm, z)) << " |";
        out << '\n';
    }
    out << "| Accuracy |";
    for (std::size_t zi = 0; zi < 3; ++zi)
        for (const auto& [name, cm] : methods)
            out << ' ' << format_number(accuracy(cm), 6) << " |";
    out << '\n';
}

}  // namespace proxloc
