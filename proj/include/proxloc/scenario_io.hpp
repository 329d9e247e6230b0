#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "proxloc/metrics.hpp"
#include "proxloc/simulator.hpp"

namespace proxloc {

enum class ReportFormat { Csv, Markdown };

// Scenario = deployment plus the optional noise/pf/sweep blocks. A bare
// deployment file is a valid scenario with defaults for the rest.
struct Scenario {
    Deployment deployment;
    NoiseSpec noise;
    SweepSpec sweep;
};

// JSON schema (see README for the full description):
//   { "format_version": 1,
//     "bounds": {"x": [lo, hi], "y": [lo, hi], "z": [lo, hi]},   // z optional
//     "beacons": [{"id", "x", "y", "z", "n", "c", "d0"}, ...],
//     "noise": {...}, "pf": {...}, "sweep": {...} }
// Errors are reported with a path-qualified message (e.g. "beacons[2].n").
Deployment read_deployment(std::istream& in);
Deployment read_deployment_file(const std::string& path);
Scenario read_scenario(std::istream& in);
Scenario read_scenario_file(const std::string& path);

// Trajectory JSON: {"waypoints": [{"t_ms": 0, "pos": [x, y]} , ...]} with 2-
// or 3-component positions (all waypoints must agree with `dim`).
Trajectory read_trajectory(std::istream& in, int dim);
Trajectory read_trajectory_file(const std::string& path, int dim);

// Sweep results. Column order is fixed:
//   particles,beacons,pf_mean,pf_std,kfpf_mean,kfpf_std,improvement_pct
// where improvement_pct = 100 * (pf_mean - kfpf_mean) / pf_mean.
void write_sweep_report(const ScenarioResult& result, std::ostream& out,
                        ReportFormat format);

// Per-zone metric table for one or more named methods, mirroring the wide
// metrics-by-zone layout. CSV uses the long form, one row per (method, zone):
//   method,zone,tp,tn,fp,fn,precision,sensitivity,specificity,fallout,fdr,fnr,accuracy
// Undefined (0/0) ratios are written as "undef".
void write_zone_report(const std::vector<std::pair<std::string, ConfusionMatrix3>>& methods,
                       std::ostream& out, ReportFormat format);

}  // namespace proxloc
