#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ffac/ffac.hpp"

namespace ffac::testing {

inline BezierPatch random_patch(std::mt19937_64& rng, int d, double lo = -100.0, double hi = 100.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Point2> cp;
    for (int i = 0; i <= d; ++i) cp.push_back({u(rng), u(rng)});
    return BezierPatch(std::move(cp));
}

inline bool interval_overlap(double a0, double a1, double b0, double b1) {
    return std::max(a0, b0) <= std::min(a1, b1);
}

inline bool boxes_overlap_oracle(const BoundingBox& a, const BoundingBox& b) {
    return interval_overlap(a.x_min, a.x_max, b.x_min, b.x_max) &&
           interval_overlap(a.y_min, a.y_max, b.y_min, b.y_max);
}

/// Figure-eight: a closed polygon path that crosses itself once at the origin.
inline FreeFormContour figure_eight(int d = 3) {
    // Right lobe counter-clockwise, left lobe clockwise; the two diagonals cross at (0,0).
    const std::vector<Point2> v{{-40, -20}, {40, 20}, {60, 20}, {60, -20}, {40, -20},
                                {-40, 20},  {-60, 20}, {-60, -20}};
    return make_polygon_contour(v, d);
}

}  // namespace ffac::testing
