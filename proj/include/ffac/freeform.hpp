#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "bezier.hpp"
#include "counters.hpp"
#include "geometry.hpp"

namespace ffac {

/// Raised when a contour invariant (closure, index order, iteration caps) is violated.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed curve made of N degree-d Bezier patches joined end to start, with the last patch
/// joined back to the first.
///
/// Shared endpoints are stored in both adjacent patches. Alongside the patches the contour keeps
/// each patch's control-point bounding box and a permutation of patch indices sorted by
/// (x_min, y_min, x_max, y_max, index).
class FreeFormContour {
public:
    FreeFormContour() = default;

    /// Checked construction: every patch must have degree d and the chain must close within
    /// `closure_tol`. Gaps under the tolerance are snapped so joins are bit-identical.
    FreeFormContour(int degree, std::vector<BezierPatch> patches, double closure_tol = 1e-9)
        : degree_(degree), patches_(std::move(patches)) {
        if (degree_ < 1) throw std::invalid_argument("FreeFormContour: degree must be >= 1");
        if (patches_.empty()) throw std::invalid_argument("FreeFormContour: no patches");
        for (const auto& p : patches_)
            if (p.degree() != degree_)
                throw std::invalid_argument("FreeFormContour: mixed patch degrees");
        if (max_closure_gap() > closure_tol)
            throw StructuralError("FreeFormContour: patch chain is not closed");
        snap_joins();
        rebuild_index();
    }

    /// Builds a contour without the closure check, for testing error paths.
    static FreeFormContour unchecked(int degree, std::vector<BezierPatch> patches) {
        FreeFormContour c;
        c.degree_ = degree;
        c.patches_ = std::move(patches);
        c.rebuild_index();
        return c;
    }

    int degree() const { return degree_; }
    std::size_t size() const { return patches_.size(); }
    bool empty() const { return patches_.empty(); }
    const std::vector<BezierPatch>& patches() const { return patches_; }
    const BezierPatch& patch(std::size_t i) const { return patches_[i]; }
    const std::vector<BoundingBox>& boxes() const { return boxes_; }
    const std::vector<std::size_t>& sorted_index() const { return sorted_; }

    std::size_t next(std::size_t i) const { return (i + 1) % patches_.size(); }
    std::size_t prev(std::size_t i) const { return (i + patches_.size() - 1) % patches_.size(); }
    bool adjacent(std::size_t i, std::size_t j) const {
        return i == j || next(i) == j || next(j) == i;
    }

    /// Largest distance between a patch end and the next patch start.
    double max_closure_gap() const {
        double gap = 0.0;
        for (std::size_t i = 0; i < patches_.size(); ++i)
            gap = std::max(gap, distance(patches_[i].back(), patches_[next(i)].front()));
        return gap;
    }
    bool is_closed(double tol = 1e-9) const { return !patches_.empty() && max_closure_gap() <= tol; }

    /// Number of distinct control points (shared joins counted once).
    std::size_t point_count() const { return patches_.size() * static_cast<std::size_t>(degree_); }

    /// Replaces the patch list wholesale and rebuilds boxes and the sorted index.
    void assign(std::vector<BezierPatch> patches) {
        patches_ = std::move(patches);
        rebuild_index();
    }

    /// Replaces one patch and refreshes its box; call repair_index() after a batch of edits.
    void set_patch(std::size_t i, BezierPatch p) {
        patches_[i] = std::move(p);
        boxes_[i] = patches_[i].box();
    }

    /// Replaces patches, keeping the current sorted order as a starting point for repair.
    void assign_with_order(std::vector<BezierPatch> patches, std::vector<std::size_t> order) {
        patches_ = std::move(patches);
        refresh_boxes();
        sorted_ = std::move(order);
        repair_index();
    }

    void refresh_boxes() {
        boxes_.resize(patches_.size());
        for (std::size_t i = 0; i < patches_.size(); ++i) boxes_[i] = patches_[i].box();
    }

    bool index_less(std::size_t a, std::size_t b) const {
        ++counters().sort_comparisons;
        if (box_less(boxes_[a], boxes_[b])) return true;
        if (box_less(boxes_[b], boxes_[a])) return false;
        return a < b;
    }

    /// Full O(N log N) sort of the patch index by bounding box.
    void rebuild_index() {
        refresh_boxes();
        sorted_.resize(patches_.size());
        std::iota(sorted_.begin(), sorted_.end(), std::size_t{0});
        std::sort(sorted_.begin(), sorted_.end(),
                  [this](std::size_t a, std::size_t b) { return index_less(a, b); });
    }

    /// Insertion-sort repair of a nearly sorted index; linear when only neighbours moved.
    void repair_index() {
        if (sorted_.size() != patches_.size())
            throw StructuralError("repair_index: index size does not match patch count");
        for (std::size_t k = 1; k < sorted_.size(); ++k) {
            const std::size_t v = sorted_[k];
            std::size_t j = k;
            while (j > 0 && index_less(v, sorted_[j - 1])) {
                sorted_[j] = sorted_[j - 1];
                --j;
            }
            sorted_[j] = v;
        }
    }

    /// True iff sorted_index is a permutation in lexicographic box order.
    bool index_is_sorted() const {
        if (sorted_.size() != patches_.size() || boxes_.size() != patches_.size()) return false;
        std::vector<char> seen(sorted_.size(), 0);
        for (std::size_t v : sorted_) {
            if (v >= sorted_.size() || seen[v]) return false;
            seen[v] = 1;
        }
        for (std::size_t k = 0; k < patches_.size(); ++k)
            if (!(boxes_[k] == patches_[k].box())) return false;
        for (std::size_t k = 1; k < sorted_.size(); ++k) {
            const auto a = sorted_[k - 1], b = sorted_[k];
            if (box_less(boxes_[b], boxes_[a])) return false;
            if (!box_less(boxes_[a], boxes_[b]) && b < a) return false;
        }
        return true;
    }

    /// Copies each patch end onto the next patch start so joins are exact.
    void snap_joins() {
        for (std::size_t i = 0; i < patches_.size(); ++i) {
            auto& nxt = patches_[next(i)].mutable_control();
            nxt.front() = patches_[i].back();
        }
    }

    /// Reverses the direction of travel along the contour.
    void reverse() {
        std::vector<BezierPatch> r;
        r.reserve(patches_.size());
        for (auto it = patches_.rbegin(); it != patches_.rend(); ++it) r.push_back(it->reversed());
        assign(std::move(r));
    }

    friend bool operator==(const FreeFormContour& a, const FreeFormContour& b) {
        return a.degree_ == b.degree_ && a.patches_ == b.patches_;
    }

private:
    int degree_ = 0;
    std::vector<BezierPatch> patches_;
    std::vector<BoundingBox> boxes_;
    std::vector<std::size_t> sorted_;
};

/// Circle of `n_patches` degree-d patches, each interpolating d+1 equally spaced circle points.
/// Angles increase along the contour, giving positive signed area.
inline FreeFormContour make_circle_contour(Point2 center, double radius, int n_patches, int d = 3) {
    if (n_patches < 3) throw std::invalid_argument("make_circle_contour: need at least 3 patches");
    if (!(radius > 0.0)) throw std::invalid_argument("make_circle_contour: radius must be positive");
    const auto& map = uniform_interpolation_map(d);
    const double two_pi = 2.0 * std::numbers::pi;
    auto on_circle = [&](int patch, int node) {
        const double a = two_pi * (patch + static_cast<double>(node) / d) / n_patches;
        return Point2{center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
    };
    std::vector<BezierPatch> patches;
    patches.reserve(static_cast<std::size_t>(n_patches));
    for (int j = 0; j < n_patches; ++j) {
        std::vector<Point2> samples;
        for (int i = 0; i <= d; ++i) samples.push_back(on_circle(j, i));
        // Joins use the exact same sample as the neighbouring patch.
        samples.back() = on_circle((j + 1) % n_patches, 0);
        patches.push_back(interpolate(map, samples));
    }
    return FreeFormContour(d, std::move(patches), 1e-9);
}

/// Straight-segment patch with control points evenly spaced from a to b (linear speed).
inline BezierPatch straight_patch(Point2 a, Point2 b, int d) {
    std::vector<Point2> cp;
    for (int i = 0; i <= d; ++i) cp.push_back(a + (static_cast<double>(i) / d) * (b - a));
    cp.back() = b;
    return BezierPatch(std::move(cp));
}

/// Closed polygon with one straight patch per edge.
inline FreeFormContour make_polygon_contour(const std::vector<Point2>& vertices, int d = 3) {
    if (vertices.size() < 3) throw std::invalid_argument("make_polygon_contour: need 3 vertices");
    std::vector<BezierPatch> patches;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        patches.push_back(straight_patch(vertices[i], vertices[(i + 1) % vertices.size()], d));
    return FreeFormContour(d, std::move(patches));
}

/// Global parametrisation: t in [(i-1)/N, i/N] maps to patch i at local parameter N t - i + 1.
inline Point2 global_parameter_eval(const FreeFormContour& c, double t) {
    if (c.empty()) throw std::invalid_argument("global_parameter_eval: empty contour");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("global_parameter_eval: t outside [0,1]");
    const auto n = static_cast<double>(c.size());
    auto i = static_cast<std::size_t>(std::floor(n * t));
    if (i >= c.size()) i = c.size() - 1;
    const double local = std::clamp(n * t - static_cast<double>(i), 0.0, 1.0);
    return eval_de_casteljau(c.patch(i), local);
}

/// Samples each patch at s equally spaced parameters, emitting shared joins once:
/// N * (s - 1) points in contour order.
inline std::vector<Point2> sample_contour(const FreeFormContour& c, int samples_per_patch) {
    if (samples_per_patch < 2) throw std::invalid_argument("sample_contour: need >= 2 samples per patch");
    std::vector<Point2> out;
    out.reserve(c.size() * static_cast<std::size_t>(samples_per_patch - 1));
    for (const auto& p : c.patches())
        for (int k = 0; k + 1 < samples_per_patch; ++k)
            out.push_back(eval_de_casteljau(p, static_cast<double>(k) / (samples_per_patch - 1)));
    return out;
}

inline constexpr int kDenseSamplesPerPatch = 64;

/// Shoelace area of a closed polyline.
inline double polygon_signed_area(const std::vector<Point2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

/// Signed area from a dense polygonisation; positive when the contour winds with increasing
/// angle in (x, y).
inline double signed_area(const FreeFormContour& c) {
    if (!c.is_closed(1e-6)) throw StructuralError("signed_area: contour is not closed");
    return polygon_signed_area(sample_contour(c, kDenseSamplesPerPatch + 1));
}

/// Reverses the contour if needed so that its signed area is positive.
inline void normalize_orientation(FreeFormContour& c) {
    if (signed_area(c) < 0.0) c.reverse();
}

}  // namespace ffac
