#include "proxloc/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace proxloc {

namespace {

int zone_index(ProximityZone z) {
    switch (z) {
        case ProximityZone::Immediate: return 0;
        case ProximityZone::Near: return 1;
        case ProximityZone::Far: return 2;
        case ProximityZone::Unknown: break;
    }
    throw std::invalid_argument("confusion matrix: Unknown labels are not accepted");
}

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

Vec3 mean_point(const std::vector<Vec3>& pts) {
    Vec3 m{0.0, 0.0, 0.0};
    for (const auto& p : pts) {
        m[0] += p[0];
        m[1] += p[1];
        m[2] += p[2];
    }
    const double n = static_cast<double>(pts.size());
    return {m[0] / n, m[1] / n, m[2] / n};
}

}  // namespace

std::int64_t ConfusionMatrix3::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (auto c : row) t += c;
    return t;
}

std::int64_t ConfusionMatrix3::diagonal() const {
    return counts[0][0] + counts[1][1] + counts[2][2];
}

ConfusionMatrix3 confusion_build(const std::vector<ProximityZone>& actual,
                                 const std::vector<ProximityZone>& predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("confusion_build: label lists differ in length (" +
                                    std::to_string(actual.size()) + " vs " +
                                    std::to_string(predicted.size()) + ")");
    ConfusionMatrix3 cm;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        cm.counts[zone_index(actual[i])][zone_index(predicted[i])] += 1;
    }
    return cm;
}

ZoneMetrics zone_metrics(const ConfusionMatrix3& cm, ProximityZone zone) {
    const int z = zone_index(zone);
    ZoneMetrics m;
    m.tp = cm.counts[z][z];
    for (int a = 0; a < 3; ++a) {
        for (int p = 0; p < 3; ++p) {
            if (a == z && p != z) m.fn += cm.counts[a][p];
            if (a != z && p == z) m.fp += cm.counts[a][p];
            if (a != z && p != z) m.tn += cm.counts[a][p];
        }
    }
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.sensitivity = ratio(m.tp, m.tp + m.fn);
    m.specificity = ratio(m.tn, m.tn + m.fp);
    m.fallout = ratio(m.fp, m.fp + m.tn);
    m.fdr = ratio(m.fp, m.fp + m.tp);
    m.fnr = ratio(m.fn, m.fn + m.tp);
    return m;
}

double accuracy(const ConfusionMatrix3& cm) {
    const std::int64_t t = cm.total();
    if (t == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
    return static_cast<double>(cm.diagonal()) / static_cast<double>(t);
}

double error_2d(const std::vector<Vec3>& actual, const std::vector<Vec3>& estimates) {
    if (actual.empty() || estimates.empty())
        throw std::invalid_argument("error_2d: empty input");
    const Vec3 est = mean_point(estimates);
    double sum = 0.0;
    for (const auto& a : actual) sum += planar_distance(a, est);
    return sum / static_cast<double>(actual.size());
}

double error_3d(const std::vector<Vec3>& actual, const std::vector<Vec3>& estimates) {
    if (actual.empty() || estimates.empty())
        throw std::invalid_argument("error_3d: empty input");
    const Vec3 est = mean_point(estimates);
    double horizontal = 0.0, vertical = 0.0;
    for (const auto& a : actual) {
        horizontal += planar_distance(a, est);
        vertical += std::abs(a[2] - est[2]);
    }
    const double n = static_cast<double>(actual.size());
    return horizontal / n + vertical / n;
}

double error_2d_pointwise(const std::vector<Vec3>& actual,
                          const std::vector<Vec3>& estimates) {
    if (actual.empty()) throw std::invalid_argument("error_2d_pointwise: empty input");
    if (actual.size() != estimates.size())
        throw std::invalid_argument("error_2d_pointwise: inputs must pair up");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        sum += planar_distance(actual[i], estimates[i]);
    return sum / static_cast<double>(actual.size());
}

}  // namespace proxloc
