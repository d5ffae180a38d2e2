#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geometry.hpp"
#include "image.hpp"

namespace ffac {

/// A synthetic binary image and the region the contour should recover.
struct SyntheticScene {
    GrayImage image;
    RegionMask truth;
    Point2 seed;          // a point in the homogeneous foreground, far from edges
    double seed_radius;   // radius of a safe initial circle around seed
};

inline const std::array<std::string_view, 5>& synthetic_shape_names() {
    static const std::array<std::string_view, 5> names{"blob", "blob-with-holes", "dumbbell", "two-holes",
                                                       "disk"};
    return names;
}

namespace detail {

inline SyntheticScene render_indicator(int width, int height, const std::function<bool(double, double)>& inside,
                                       Point2 seed, double seed_radius) {
    SyntheticScene s{GrayImage(width, height, 0.0), RegionMask(width, height, 0), seed, seed_radius};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (inside(x, y)) {
                s.image(x, y) = 1.0;
                s.truth(x, y) = 1;
            }
    return s;
}

inline bool in_disk(double x, double y, double cx, double cy, double r) {
    return (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r;
}

}  // namespace detail

/// Renders one of the named toy shapes (white foreground on black) with its ground truth.
inline SyntheticScene make_synthetic(std::string_view shape, int width = 800, int height = 600) {
    if (width < 32 || height < 32) throw std::invalid_argument("make_synthetic: image too small");
    const double cx = 0.5 * width, cy = 0.5 * height;
    const double s = std::min(width, height);
    const Point2 centre{cx, cy};
    if (shape == "disk") {
        const double r = 0.4 * s;
        return detail::render_indicator(
            width, height, [=](double x, double y) { return detail::in_disk(x, y, cx, cy, r); }, centre,
            0.05 * s);
    }
    auto blob = [=](double scale) {
        return [=](double x, double y) {
            const double th = std::atan2(y - cy, x - cx);
            const double r = scale * s * (1.0 + 0.2 * std::cos(3.0 * th) + 0.1 * std::sin(5.0 * th + 0.7));
            return std::hypot(x - cx, y - cy) <= r;
        };
    };
    if (shape == "blob") return detail::render_indicator(width, height, blob(0.3), centre, 0.05 * s);
    if (shape == "blob-with-holes") {
        const auto outer = blob(0.32);
        const double hr = 0.05 * s, off = 0.13 * s;
        return detail::render_indicator(
            width, height,
            [=](double x, double y) {
                return outer(x, y) && !detail::in_disk(x, y, cx - off, cy, hr) &&
                       !detail::in_disk(x, y, cx + off, cy, hr);
            },
            centre, 0.05 * s);
    }
    if (shape == "dumbbell") {
        const double r = 0.22 * s, half_bar = 0.06 * s;
        const double lx = 0.28 * width, rx = 0.72 * width;
        return detail::render_indicator(
            width, height,
            [=](double x, double y) {
                return detail::in_disk(x, y, lx, cy, r) || detail::in_disk(x, y, rx, cy, r) ||
                       (x >= lx && x <= rx && std::abs(y - cy) <= half_bar);
            },
            centre, 0.035 * s);
    }
    if (shape == "two-holes") {
        const double ax = 0.425 * width, ay = 0.417 * height;
        const double hr = 0.092 * height;
        const double hx = 0.225 * width;
        return detail::render_indicator(
            width, height,
            [=](double x, double y) {
                const double u = (x - cx) / ax, v = (y - cy) / ay;
                return u * u + v * v <= 1.0 && !detail::in_disk(x, y, cx - hx, cy, hr) &&
                       !detail::in_disk(x, y, cx + hx, cy, hr);
            },
            centre, 0.067 * height);
    }
    throw std::invalid_argument("make_synthetic: unknown shape '" + std::string(shape) + "'");
}

/// Euler number (components minus holes) of a binary mask: 8-connected foreground,
/// 4-connected background, background touching the border is not a hole.
inline int euler_number(const RegionMask& mask) {
    const int w = mask.width(), h = mask.height();
    Raster<int> label(w, h, 0);
    auto flood = [&](int sx, int sy, std::uint8_t value, bool eight, bool& touches_border) {
        std::vector<std::pair<int, int>> stack{{sx, sy}};
        label(sx, sy) = 1;
        while (!stack.empty()) {
            const auto [x, y] = stack.back();
            stack.pop_back();
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) touches_border = true;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0)) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (!mask.contains(nx, ny) || label(nx, ny) || (mask(nx, ny) != 0) != (value != 0)) continue;
                    label(nx, ny) = 1;
                    stack.emplace_back(nx, ny);
                }
        }
    };
    int components = 0, holes = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (label(x, y)) continue;
            bool border = false;
            if (mask(x, y)) {
                flood(x, y, 1, true, border);
                ++components;
            } else {
                flood(x, y, 0, false, border);
                if (!border) ++holes;
            }
        }
    return components - holes;
}

/// Two successive frames of a ground scene seen from a moving robot, with ground truth.
struct RoadScene {
    GrayImage prev, curr;
    Raster<double> altitude;  // metres, current-image coordinates
    RegionMask free_space;    // ground minus elevated obstacles
    RegionMask ground;
    RegionMask line;          // painted line (flat)
    RegionMask box;           // elevated obstacle
    Point2 seed;
    double seed_radius;
};

/// Ground ellipse on a dark background with a painted line (altitude 0) and a textured box
/// (altitude `box_altitude`). The previous frame is the scene shifted by `motion` pixels.
inline RoadScene make_road_scene(int width = 800, int height = 600, double box_altitude = 0.3,
                                 Point2 motion = {-4.0, -3.0}) {
    const double sx = width / 800.0, sy = height / 600.0;
    const double gcx = 400 * sx, gcy = 320 * sy, gax = 360 * sx, gay = 260 * sy;
    const double lx0 = 250 * sx, lx1 = 262 * sx, ly0 = 200 * sy, ly1 = 380 * sy;
    const double bx0 = 480 * sx, bx1 = 580 * sx, by0 = 220 * sy, by1 = 320 * sy;
    const double cell = 10 * std::min(sx, sy);

    enum Part { background, ground, line, box };
    auto part = [=](double x, double y) {
        if (x >= bx0 && x <= bx1 && y >= by0 && y <= by1) return box;
        if (x >= lx0 && x <= lx1 && y >= ly0 && y <= ly1) return line;
        const double u = (x - gcx) / gax, v = (y - gcy) / gay;
        return u * u + v * v <= 1.0 ? ground : background;
    };
    auto shade = [=](double x, double y) {
        switch (part(x, y)) {
            case background: return 0.1;
            case ground: return 0.55;
            case line: return 0.95;
            case box: {
                const int i = static_cast<int>(std::floor((x - bx0) / cell));
                const int j = static_cast<int>(std::floor((y - by0) / cell));
                return ((i + j) % 2 == 0) ? 0.2 : 0.85;
            }
        }
        return 0.0;
    };

    RoadScene r{GrayImage(width, height), GrayImage(width, height), Raster<double>(width, height, 0.0),
                RegionMask(width, height, 0), RegionMask(width, height, 0), RegionMask(width, height, 0),
                RegionMask(width, height, 0), Point2{400 * sx, 470 * sy}, 30 * std::min(sx, sy)};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            r.curr(x, y) = shade(x, y);
            r.prev(x, y) = shade(x - motion.x, y - motion.y);
            const Part p = part(x, y);
            r.ground(x, y) = p != background;
            r.line(x, y) = p == line;
            r.box(x, y) = p == box;
            r.free_space(x, y) = p == ground || p == line;
            if (p == box) r.altitude(x, y) = box_altitude;
        }
    return r;
}

}  // namespace ffac
