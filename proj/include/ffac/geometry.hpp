#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ffac {

/// A point (or displacement) in image pixel coordinates, x right and y down.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
    constexpr Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Point2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Point2 operator+(Point2 a, const Point2& b) { return a += b; }
    friend constexpr Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
    friend constexpr Point2 operator*(Point2 a, double s) { return a *= s; }
    friend constexpr Point2 operator*(double s, Point2 a) { return a *= s; }
    friend constexpr Point2 operator-(const Point2& a) { return {-a.x, -a.y}; }
    friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }
inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Axis-aligned box [x_min, y_min, x_max, y_max].
struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    friend constexpr bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline BoundingBox bounding_box(std::span<const Point2> pts) {
    if (pts.empty()) throw std::invalid_argument("bounding_box: empty point set");
    BoundingBox b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts.subspan(1)) {
        b.x_min = std::min(b.x_min, p.x);
        b.y_min = std::min(b.y_min, p.y);
        b.x_max = std::max(b.x_max, p.x);
        b.y_max = std::max(b.y_max, p.y);
    }
    return b;
}

/// Lexicographic order on (x_min, y_min, x_max, y_max).
inline bool box_less(const BoundingBox& a, const BoundingBox& b) {
    if (a.x_min != b.x_min) return a.x_min < b.x_min;
    if (a.y_min != b.y_min) return a.y_min < b.y_min;
    if (a.x_max != b.x_max) return a.x_max < b.x_max;
    return a.y_max < b.y_max;
}

namespace detail {

// Error-free transformations (Knuth two-sum, fma two-product).
inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double bv = s - a;
    const double av = s - bv;
    e = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& p, double& e) {
    p = a * b;
    e = std::fma(a, b, -p);
}

/// Sign of an exact sum of doubles, using a growing non-overlapping expansion.
template <std::size_t N>
int exact_sum_sign(const std::array<double, N>& terms) {
    std::array<double, N> expansion{};
    std::size_t len = 0;
    for (double q : terms) {
        std::size_t out = 0;
        for (std::size_t i = 0; i < len; ++i) {
            double s, e;
            two_sum(q, expansion[i], s, e);
            q = s;
            if (e != 0.0) expansion[out++] = e;
        }
        if (q != 0.0) expansion[out++] = q;
        len = out;
    }
    if (len == 0) return 0;
    return expansion[len - 1] > 0.0 ? 1 : -1;
}

}  // namespace detail

/// Exact sign of the orientation determinant of (a, b, c):
/// +1 if c lies left of a->b (counter-clockwise in x-right/y-up axes), -1 if right, 0 if collinear.
inline int orient2d(const Point2& a, const Point2& b, const Point2& c) {
    const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double mag = std::abs((b.x - a.x) * (c.y - a.y)) + std::abs((b.y - a.y) * (c.x - a.x));
    // Static filter; the bound is deliberately loose.
    constexpr double kErr = 8.0 * std::numeric_limits<double>::epsilon();
    if (std::abs(det) > kErr * mag) return det > 0.0 ? 1 : -1;

    // det = ax*by - ax*cy - ay*bx + ay*cx + bx*cy - by*cx, every product split exactly.
    std::array<double, 12> t{};
    detail::two_product(a.x, b.y, t[0], t[1]);
    detail::two_product(-a.x, c.y, t[2], t[3]);
    detail::two_product(-a.y, b.x, t[4], t[5]);
    detail::two_product(a.y, c.x, t[6], t[7]);
    detail::two_product(b.x, c.y, t[8], t[9]);
    detail::two_product(-b.y, c.x, t[10], t[11]);
    return detail::exact_sum_sign(t);
}

/// True iff the open segments [p1,p2] and [q1,q2] cross at a single interior point.
/// Touching endpoints and collinear overlaps are not proper intersections.
inline bool segments_cross_properly(const Point2& p1, const Point2& p2, const Point2& q1,
                                    const Point2& q2) {
    const int o1 = orient2d(p1, p2, q1);
    const int o2 = orient2d(p1, p2, q2);
    if (o1 == 0 || o2 == 0 || o1 == o2) return false;
    const int o3 = orient2d(q1, q2, p1);
    const int o4 = orient2d(q1, q2, p2);
    return o3 != 0 && o4 != 0 && o3 != o4;
}

}  // namespace ffac
