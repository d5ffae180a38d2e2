#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace ffac {

/// Row-major single-channel raster.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(checked_area(width, height)), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }
    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    /// Clamped-border access.
    const T& at_clamped(int x, int y) const {
        return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static long checked_area(int w, int h) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("Raster: dimensions must be positive");
        return static_cast<long>(w) * h;
    }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Grayscale image with intensities in [0, 1].
using GrayImage = Raster<double>;

/// Per-pixel inside flags. Stored as bytes (0/1) to avoid vector<bool>.
using RegionMask = Raster<std::uint8_t>;

inline bool image_contains(const GrayImage& img, const Point2& p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= img.width() - 1 && p.y <= img.height() - 1;
}

/// Bilinear sample at a sub-pixel position (pixel centres at integer coordinates), clamped.
template <typename T>
double bilinear(const Raster<T>& r, const Point2& p) {
    const double x = std::clamp(p.x, 0.0, static_cast<double>(r.width() - 1));
    const double y = std::clamp(p.y, 0.0, static_cast<double>(r.height() - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, r.width() - 1);
    const int y1 = std::min(y0 + 1, r.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1.0 - fx) * r(x0, y0) + fx * r(x1, y0);
    const double bot = (1.0 - fx) * r(x0, y1) + fx * r(x1, y1);
    return (1.0 - fy) * top + fy * bot;
}

inline std::size_t mask_count(const RegionMask& m) {
    return static_cast<std::size_t>(std::count_if(m.data().begin(), m.data().end(),
                                                  [](std::uint8_t v) { return v != 0; }));
}

inline void require_same_shape(const RegionMask& a, const RegionMask& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("mask dimensions differ");
}

inline RegionMask mask_union(const RegionMask& a, const RegionMask& b) {
    require_same_shape(a, b);
    RegionMask out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = (a.data()[i] || b.data()[i]) ? 1 : 0;
    return out;
}

inline RegionMask mask_subtract(const RegionMask& a, const RegionMask& b) {
    require_same_shape(a, b);
    RegionMask out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = (a.data()[i] && !b.data()[i]) ? 1 : 0;
    return out;
}

inline RegionMask mask_intersect(const RegionMask& a, const RegionMask& b) {
    require_same_shape(a, b);
    RegionMask out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = (a.data()[i] && b.data()[i]) ? 1 : 0;
    return out;
}

/// Intersection over union; two empty masks count as a perfect match.
inline double mask_iou(const RegionMask& a, const RegionMask& b) {
    require_same_shape(a, b);
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a.data()[i] != 0, y = b.data()[i] != 0;
        inter += (x && y) ? 1 : 0;
        uni += (x || y) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace ffac
