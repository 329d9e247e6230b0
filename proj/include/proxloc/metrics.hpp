#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "proxloc/geometry.hpp"
#include "proxloc/pathloss.hpp"

namespace proxloc {

// Three-zone confusion matrix. Rows are the actual zone, columns the
// predicted zone, both indexed Immediate = 0, Near = 1, Far = 2. Unknown
// never appears here: evaluation covers ranged zones only.
struct ConfusionMatrix3 {
    std::array<std::array<std::int64_t, 3>, 3> counts{};

    std::int64_t total() const;
    std::int64_t diagonal() const;
};

ConfusionMatrix3 confusion_build(const std::vector<ProximityZone>& actual,
                                 const std::vector<ProximityZone>& predicted);

// One-vs-rest statistics for a single zone. Ratios with a 0/0 denominator are
// reported as nullopt, never silently as zero.
struct ZoneMetrics {
    std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::optional<double> precision;    // tp / (tp + fp)
    std::optional<double> sensitivity;  // tp / (tp + fn)
    std::optional<double> specificity;  // tn / (tn + fp)
    std::optional<double> fallout;      // fp / (fp + tn) = 1 - specificity
    std::optional<double> fdr;          // fp / (fp + tp) = 1 - precision
    std::optional<double> fnr;          // fn / (fn + tp) = 1 - sensitivity
};

ZoneMetrics zone_metrics(const ConfusionMatrix3& cm, ProximityZone zone);

// Fraction of samples on the diagonal. Throws on an empty matrix.
double accuracy(const ConfusionMatrix3& cm);

// 2D localization error: mean planar distance from each actual point to the
// single averaged estimate (component-wise mean over all estimates).
double error_2d(const std::vector<Vec3>& actual, const std::vector<Vec3>& estimates);

// 3D localization error: the 2D horizontal term plus the mean absolute
// vertical offset to the averaged estimate. Deliberately the sum of two
// means, not a 3D Euclidean distance; do not compare it against RMSE-style
// numbers.
double error_3d(const std::vector<Vec3>& actual, const std::vector<Vec3>& estimates);

// Companion diagnostic: mean of per-sample planar distances between paired
// actual/estimate points. Requires equal lengths. Reported alongside
// error_2d so the two conventions can be compared directly.
double error_2d_pointwise(const std::vector<Vec3>& actual,
                          const std::vector<Vec3>& estimates);

}  // namespace proxloc
