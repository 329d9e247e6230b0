#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace proxloc {

// Positions are stored as 3 components everywhere; 2D data leaves z at 0 and
// carries dim = 2 alongside. Keeps the particle engine and the I/O layer free
// of templates.
using Vec3 = std::array<double, 3>;

inline double distance(const Vec3& a, const Vec3& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double planar_distance(const Vec3& a, const Vec3& b) {
    return distance(a, b, 2);
}

// Axis-aligned box, meters. dim is 2 or 3; z limits are ignored for dim == 2.
struct Box {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{0.0, 0.0, 0.0};
    int dim = 2;

    bool contains(const Vec3& p) const {
        for (int i = 0; i < dim; ++i) {
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        }
        return true;
    }

    Vec3 clamp(Vec3 p) const {
        for (int i = 0; i < dim; ++i) {
            if (p[i] < lo[i]) p[i] = lo[i];
            if (p[i] > hi[i]) p[i] = hi[i];
        }
        return p;
    }

    void validate() const {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("bounds: dim must be 2 or 3");
        for (int i = 0; i < dim; ++i) {
            if (!(lo[i] < hi[i]))
                throw std::invalid_argument("bounds: degenerate box (lo >= hi)");
        }
    }
};

}  // namespace proxloc
