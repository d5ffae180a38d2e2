#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "freeform.hpp"
#include "image.hpp"

namespace ffac {

namespace detail {

inline std::vector<Point2> dense_polygon(const FreeFormContour& c) {
    if (!c.is_closed(1e-6)) throw StructuralError("rasterize_region: contour is not closed");
    return sample_contour(c, kDenseSamplesPerPatch + 1);
}

inline void mark_polyline_pixels(const std::vector<Point2>& poly, RegionMask& mask) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % poly.size()];
        const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * distance(a, b))));
        for (int s = 0; s <= steps; ++s) {
            const Point2 p = a + (static_cast<double>(s) / steps) * (b - a);
            const int x = static_cast<int>(std::lround(p.x));
            const int y = static_cast<int>(std::lround(p.y));
            if (mask.contains(x, y)) mask(x, y) = 1;
        }
    }
}

}  // namespace detail

/// Even-odd fill of the dense polygonisation (64 samples per patch) of one or more contours.
/// Pixel centres sit at integer coordinates; pixels the boundary passes through count as inside.
inline RegionMask rasterize_region(std::span<const FreeFormContour> contours, int width, int height) {
    RegionMask mask(width, height, 0);
    std::vector<std::vector<Point2>> polys;
    polys.reserve(contours.size());
    for (const auto& c : contours) polys.push_back(detail::dense_polygon(c));

    struct Edge {
        Point2 a, b;
    };
    std::vector<std::vector<Edge>> rows(static_cast<std::size_t>(height));
    for (const auto& poly : polys) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
            if (a.y == b.y) continue;
            if (a.y > b.y) std::swap(a, b);
            // Half-open rule: the edge covers scanlines a.y <= y < b.y.
            const int y0 = std::max(0, static_cast<int>(std::ceil(a.y)));
            const int y1 = std::min(height - 1, static_cast<int>(std::ceil(b.y)) - 1);
            for (int y = y0; y <= y1; ++y) rows[static_cast<std::size_t>(y)].push_back({a, b});
        }
    }

    std::vector<double> xs;
    for (int y = 0; y < height; ++y) {
        xs.clear();
        for (const auto& e : rows[static_cast<std::size_t>(y)])
            xs.push_back(e.a.x + (y - e.a.y) * (e.b.x - e.a.x) / (e.b.y - e.a.y));
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k])));
            const int x1 = std::min(width - 1, static_cast<int>(std::floor(xs[k + 1])));
            for (int x = x0; x <= x1; ++x) mask(x, y) ^= 1;
        }
    }
    for (const auto& poly : polys) detail::mark_polyline_pixels(poly, mask);
    return mask;
}

inline RegionMask rasterize_region(const FreeFormContour& c, int width, int height) {
    return rasterize_region(std::span<const FreeFormContour>(&c, 1), width, height);
}

}  // namespace ffac
