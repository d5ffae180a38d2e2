#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "bezier.hpp"
#include "counters.hpp"
#include "freeform.hpp"

namespace ffac {

/// Splits a patch at its parameter midpoint by resampling and re-interpolating.
///
/// The curve is evaluated at 2d+1 parameters (t_i / 2 and 1/2 + t_i / 2), then each half is
/// interpolated through its d+1 samples. A degree-d polynomial restricted to half its domain is
/// still degree d, so the two halves reproduce the original curve exactly.
inline std::pair<BezierPatch, BezierPatch> split_patch(const BezierPatch& patch,
                                                       const InterpolationMap& map) {
    if (patch.degree() != map.degree)
        throw std::invalid_argument("split_patch: patch degree does not match the map");
    const std::size_t n = map.nodes.size();
    std::vector<Point2> left(n), right(n);
    for (std::size_t i = 0; i < n; ++i) left[i] = eval_de_casteljau(patch, 0.5 * map.nodes[i]);
    right[0] = left[n - 1];
    for (std::size_t i = 1; i < n; ++i) right[i] = eval_de_casteljau(patch, 0.5 + 0.5 * map.nodes[i]);
    BezierPatch a = interpolate(map, left);
    BezierPatch b = interpolate(map, right);
    // Joins must be bit-identical with the untouched neighbours and with each other.
    a.mutable_control().front() = patch.front();
    b.mutable_control().back() = patch.back();
    b.mutable_control().front() = a.back();
    ++counters().splits;
    return {std::move(a), std::move(b)};
}

/// Maps each patch of a rewritten contour to the patch it came from.
struct RefineReport {
    std::size_t changed = 0;
    std::vector<std::size_t> origin;
};

/// Replaces every patch whose control-point diameter exceeds `epsilon` by its two halves.
/// At most one split per patch per pass. The sorted index is carried over and repaired by
/// insertion, so a pass costs O(N) comparisons when few boxes move.
inline RefineReport split_pass(FreeFormContour& contour, const InterpolationMap& map, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("split_pass: epsilon must be positive");
    RefineReport report;
    const std::size_t n = contour.size();
    std::vector<std::size_t> first_new(n);
    std::vector<char> was_split(n, 0);
    std::vector<BezierPatch> out;
    out.reserve(n + n / 4);
    for (std::size_t j = 0; j < n; ++j) {
        first_new[j] = out.size();
        const auto& p = contour.patch(j);
        if (p.control_diameter() > epsilon) {
            auto [a, b] = split_patch(p, map);
            out.push_back(std::move(a));
            out.push_back(std::move(b));
            report.origin.push_back(j);
            report.origin.push_back(j);
            was_split[j] = 1;
            ++report.changed;
        } else {
            out.push_back(p);
            report.origin.push_back(j);
        }
    }
    if (report.changed == 0) return report;
    std::vector<std::size_t> order;
    order.reserve(out.size());
    for (std::size_t old : contour.sorted_index()) {
        order.push_back(first_new[old]);
        if (was_split[old]) order.push_back(first_new[old] + 1);
    }
    contour.assign_with_order(std::move(out), std::move(order));
    return report;
}

/// Merges adjacent pairs of patches that are both smaller than `epsilon_min` into one patch
/// interpolating d+1 samples of their union. Never reduces the contour below 4 patches.
/// Lossy unless the pair is a single polynomial piece.
inline RefineReport merge_pass(FreeFormContour& contour, const InterpolationMap& map,
                               double epsilon_min) {
    RefineReport report;
    const std::size_t n = contour.size();
    if (n <= 4 || !(epsilon_min > 0.0)) {
        for (std::size_t j = 0; j < n; ++j) report.origin.push_back(j);
        return report;
    }
    std::vector<BezierPatch> out;
    std::size_t remaining = n;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& a = contour.patch(j);
        if (j + 1 < n && remaining > 4 && a.control_diameter() < epsilon_min &&
            contour.patch(j + 1).control_diameter() < epsilon_min) {
            const auto& b = contour.patch(j + 1);
            std::vector<Point2> samples;
            for (double t : map.nodes.nodes()) {
                const double u = 2.0 * t;
                samples.push_back(u <= 1.0 ? eval_de_casteljau(a, u) : eval_de_casteljau(b, u - 1.0));
            }
            samples.front() = a.front();
            samples.back() = b.back();
            out.push_back(interpolate(map, samples));
            report.origin.push_back(j);
            ++report.changed;
            --remaining;
            ++j;
        } else {
            out.push_back(a);
            report.origin.push_back(j);
        }
    }
    if (report.changed > 0) contour.assign(std::move(out));
    return report;
}

}  // namespace ffac
