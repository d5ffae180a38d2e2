#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bezier.hpp"
#include "counters.hpp"
#include "freeform.hpp"
#include "geometry.hpp"

namespace ffac {

/// Closed-interval overlap test for two boxes b1 = [x1,y1,x2,y2] and b2 = [x3,y3,x4,y4].
///
/// Rejects when the boxes are separated along x (x2 < x3 or x4 < x1) or along y
/// (y2 < y3 or y4 < y1). Touching edges and corners count as intersecting.
inline bool box_inter(const BoundingBox& b1, const BoundingBox& b2) {
    ++counters().box_tests;
    if (b1.x_max < b2.x_min || b2.x_max < b1.x_min) return false;
    if (b1.y_max < b2.y_min || b2.y_max < b1.y_min) return false;
    return true;
}

/// A pair of distinct, non-successive patches whose boxes overlap (patch_i < patch_j).
struct IntersectionCandidate {
    std::size_t patch_i = 0;
    std::size_t patch_j = 0;

    friend bool operator==(const IntersectionCandidate&, const IntersectionCandidate&) = default;
};

/// Sweep over the lexicographically sorted boxes, keeping an active set of boxes whose x-range
/// still reaches the sweep position. Emits every non-adjacent pair passing box_inter.
inline std::vector<IntersectionCandidate> find_candidates(const FreeFormContour& c) {
    if (!c.index_is_sorted())
        throw StructuralError("find_candidates: sorted index is stale");
    std::vector<IntersectionCandidate> out;
    std::vector<std::size_t> active;
    const auto& boxes = c.boxes();
    for (std::size_t idx : c.sorted_index()) {
        const BoundingBox& b = boxes[idx];
        std::erase_if(active, [&](std::size_t a) { return boxes[a].x_max < b.x_min; });
        for (std::size_t a : active) {
            if (c.adjacent(a, idx)) continue;
            if (box_inter(boxes[a], b)) out.push_back({std::min(a, idx), std::max(a, idx)});
        }
        active.push_back(idx);
    }
    return out;
}

/// True iff some segment of a's control polygon properly crosses some segment of b's.
inline bool polygons_intersect(const BezierPatch& a, const BezierPatch& b) {
    const auto pa = a.control();
    const auto pb = b.control();
    for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
        const BoundingBox sa = bounding_box(pa.subspan(i, 2));
        for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
            ++counters().segment_tests;
            const BoundingBox sb = bounding_box(pb.subspan(j, 2));
            if (sa.x_max < sb.x_min || sb.x_max < sa.x_min || sa.y_max < sb.y_min ||
                sb.y_max < sa.y_min)
                continue;
            if (segments_cross_properly(pa[i], pa[i + 1], pb[j], pb[j + 1])) return true;
        }
    }
    return false;
}

/// Outer component (largest enclosed area) plus the components split off from it.
struct ComponentSet {
    FreeFormContour outer;
    std::vector<FreeFormContour> inner;
    std::size_t flips = 0;
    std::size_t skipped = 0;

    std::size_t size() const { return 1 + inner.size(); }
    std::size_t patch_count() const {
        std::size_t n = outer.size();
        for (const auto& c : inner) n += c.size();
        return n;
    }
    std::vector<FreeFormContour> all() const {
        std::vector<FreeFormContour> v{outer};
        v.insert(v.end(), inner.begin(), inner.end());
        return v;
    }
};

/// The two closed chains produced by flipping one intersecting pair.
struct FlipResult {
    FreeFormContour through_i;  // patches outside (i, j) plus the patch starting at patch i's start
    FreeFormContour through_j;  // patches strictly between i and j plus the patch starting at j's start
};

/// Reconnects two intersecting patches i < j and splits the contour in two closed chains.
///
/// With k = floor(d/2), the first chain keeps patches j+1..i-1 and gains
/// [P_{0,i}..P_{k,i}, P_{k+1,j}..P_{d,j}]; the second keeps patches i+1..j-1 and gains
/// [P_{0,j}..P_{k,j}, P_{k+1,i}..P_{d,i}]. Control points are only reordered. When the two new
/// patches still cross, the other split indices k = 0..d-1 are tried, nearest to d/2 first;
/// when all of them cross, nothing is returned and `diagnostic` is filled.
inline std::optional<FlipResult> flip(const FreeFormContour& c, IntersectionCandidate cand,
                                      std::string* diagnostic = nullptr) {
    auto [i, j] = cand;
    if (i > j) std::swap(i, j);
    if (j >= c.size() || c.adjacent(i, j))
        throw std::invalid_argument("flip: candidate patches must be distinct and non-adjacent");
    const int d = c.degree();
    const auto pi = c.patch(i).control();
    const auto pj = c.patch(j).control();
    std::vector<int> ks{d / 2};
    for (int off = 1; off < d; ++off) {
        if (d / 2 - off >= 0) ks.push_back(d / 2 - off);
        if (d / 2 + off <= d - 1) ks.push_back(d / 2 + off);
    }
    for (int kk : ks) {
        const auto k = static_cast<std::size_t>(kk);
        std::vector<Point2> new_i, new_j;
        for (std::size_t m = 0; m <= k; ++m) new_i.push_back(pi[m]);
        for (std::size_t m = k + 1; m <= static_cast<std::size_t>(d); ++m) new_i.push_back(pj[m]);
        for (std::size_t m = 0; m <= k; ++m) new_j.push_back(pj[m]);
        for (std::size_t m = k + 1; m <= static_cast<std::size_t>(d); ++m) new_j.push_back(pi[m]);
        BezierPatch gi(std::move(new_i)), gj(std::move(new_j));
        if (polygons_intersect(gi, gj)) continue;
        std::vector<BezierPatch> first, second;
        for (std::size_t m = 0; m < i; ++m) first.push_back(c.patch(m));
        first.push_back(std::move(gi));
        for (std::size_t m = j + 1; m < c.size(); ++m) first.push_back(c.patch(m));
        for (std::size_t m = i + 1; m < j; ++m) second.push_back(c.patch(m));
        second.push_back(std::move(gj));
        ++counters().flips;
        return FlipResult{FreeFormContour(d, std::move(first)), FreeFormContour(d, std::move(second))};
    }
    if (diagnostic)
        *diagnostic = "flip: patches " + std::to_string(i) + " and " + std::to_string(j) +
                      " still cross after every reconnection; skipped";
    return std::nullopt;
}

/// Splits a list of contours into outer (largest |signed area|) and the rest, keeping order.
inline ComponentSet make_component_set(std::vector<FreeFormContour> parts) {
    if (parts.empty()) throw std::invalid_argument("make_component_set: no components");
    std::size_t best = 0;
    double best_area = -1.0;
    for (std::size_t m = 0; m < parts.size(); ++m) {
        const double a = std::abs(signed_area(parts[m]));
        if (a > best_area) {
            best_area = a;
            best = m;
        }
    }
    ComponentSet set;
    set.outer = std::move(parts[best]);
    for (std::size_t m = 0; m < parts.size(); ++m)
        if (m != best) set.inner.push_back(std::move(parts[m]));
    return set;
}

/// Splits one contour into self-intersection-free pieces by repeated flips. Candidates are
/// scanned in sweep order; the first pair whose control polygons cross is flipped and both
/// pieces are scanned again. More than `max_flips` flips (default: the patch count) is a
/// structural error.
inline std::vector<FreeFormContour> resolve_self_intersections(
    const FreeFormContour& contour, std::size_t* flips_out = nullptr,
    std::size_t* skipped_out = nullptr, std::optional<std::size_t> max_flips = std::nullopt,
    std::vector<std::string>* diagnostics = nullptr) {
    const std::size_t cap = max_flips.value_or(contour.size());
    std::vector<FreeFormContour> work{contour}, done;
    std::size_t flips = 0, skipped = 0;
    while (!work.empty()) {
        FreeFormContour c = std::move(work.back());
        work.pop_back();
        bool split = false;
        for (const auto& cand : find_candidates(c)) {
            if (!polygons_intersect(c.patch(cand.patch_i), c.patch(cand.patch_j))) continue;
            std::string diag;
            auto result = flip(c, cand, &diag);
            if (!result) {
                ++skipped;
                if (diagnostics) diagnostics->push_back(diag);
                continue;
            }
            if (++flips > cap)
                throw StructuralError("resolve_topology: more than " + std::to_string(cap) +
                                      " flips in one call");
            work.push_back(std::move(result->through_j));
            work.push_back(std::move(result->through_i));
            split = true;
            break;
        }
        if (!split) done.push_back(std::move(c));
    }
    if (flips_out) *flips_out = flips;
    if (skipped_out) *skipped_out = skipped;
    return done;
}

inline ComponentSet resolve_topology(const FreeFormContour& contour) {
    std::size_t flips = 0, skipped = 0;
    auto parts = resolve_self_intersections(contour, &flips, &skipped);
    ComponentSet set = make_component_set(std::move(parts));
    set.flips = flips;
    set.skipped = skipped;
    return set;
}

}  // namespace ffac
