#pragma once

#include <gmpxx.h>

#include "ffac/ffac.hpp"

namespace ffac::testing {

/// Exact orientation sign with rational arithmetic.
inline int orient_exact(const Point2& a, const Point2& b, const Point2& c) {
    const mpq_class ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
    const mpq_class det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return sgn(det);
}

inline bool segments_cross_exact(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
    const int o1 = orient_exact(p1, p2, q1), o2 = orient_exact(p1, p2, q2);
    const int o3 = orient_exact(q1, q2, p1), o4 = orient_exact(q1, q2, p2);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

/// Every segment pair of the two control polygons, no box prefilter.
inline bool polygons_cross_brute(const BezierPatch& a, const BezierPatch& b) {
    for (std::size_t i = 0; i + 1 < a.control().size(); ++i)
        for (std::size_t j = 0; j + 1 < b.control().size(); ++j)
            if (segments_cross_exact(a[i], a[i + 1], b[j], b[j + 1])) return true;
    return false;
}

}  // namespace ffac::testing
