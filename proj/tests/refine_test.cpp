#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ffac/refine.hpp"
#include "support.hpp"

using namespace ffac;
using ffac::testing::random_patch;

namespace {

/// Classic corner-cutting subdivision at t = 1/2.
std::pair<std::vector<Point2>, std::vector<Point2>> corner_cut(std::span<const Point2> cp) {
    std::vector<Point2> work(cp.begin(), cp.end()), left, right;
    const std::size_t n = work.size();
    left.push_back(work.front());
    right.push_back(work.back());
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) work[i] = 0.5 * (work[i] + work[i + 1]);
        left.push_back(work.front());
        right.push_back(work[n - 1 - level]);
    }
    std::reverse(right.begin(), right.end());
    return {left, right};
}

double max_split_deviation(const BezierPatch& p, const BezierPatch& a, const BezierPatch& b, int samples) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        const Point2 orig = eval_de_casteljau(p, t);
        const Point2 half = t <= 0.5 ? eval_de_casteljau(a, 2.0 * t) : eval_de_casteljau(b, 2.0 * t - 1.0);
        worst = std::max(worst, distance(orig, half));
    }
    return worst;
}

}  // namespace

TEST(SplitPatch, StraightSegmentGivesCollinearHalves) {
    const auto& map = uniform_interpolation_map(3);
    const BezierPatch p = straight_patch({0, 0}, {6, 3}, 3);
    const auto [a, b] = split_patch(p, map);
    for (const auto& q : a.control()) EXPECT_NEAR(cross(q, Point2{6, 3}), 0.0, 1e-12);
    for (const auto& q : b.control()) EXPECT_NEAR(cross(q, Point2{6, 3}), 0.0, 1e-12);
    EXPECT_LE(distance(a.back(), Point2{3, 1.5}), 1e-12);
    EXPECT_EQ(a.back(), b.front());
}

TEST(SplitPatch, ReproducesOriginalCurve) {
    std::mt19937_64 rng(41);
    for (int d = 1; d <= 6; ++d) {
        const auto& map = uniform_interpolation_map(d);
        for (int k = 0; k < 50; ++k) {
            const BezierPatch p = random_patch(rng, d);
            const auto [a, b] = split_patch(p, map);
            EXPECT_LT(max_split_deviation(p, a, b, 100), 1e-9);
            EXPECT_EQ(a.front(), p.front());
            EXPECT_EQ(b.back(), p.back());
            EXPECT_EQ(a.back(), b.front());
        }
    }
}

TEST(SplitPatch, EqualsCornerCutting) {
    std::mt19937_64 rng(42);
    const auto& map = uniform_interpolation_map(3);
    for (int k = 0; k < 200; ++k) {
        const BezierPatch p = random_patch(rng, 3);
        const auto [a, b] = split_patch(p, map);
        const auto [l, r] = corner_cut(p.control());
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_LE(distance(a[i], l[i]), 1e-9);
            EXPECT_LE(distance(b[i], r[i]), 1e-9);
        }
    }
}

TEST(SplitPatch, OperationCount) {
    std::mt19937_64 rng(43);
    for (int d = 1; d <= 6; ++d) {
        const BezierPatch p = random_patch(rng, d);
        const auto& map = uniform_interpolation_map(d);
        reset_counters();
        (void)split_patch(p, map);
        EXPECT_EQ(counters().evaluations, static_cast<std::uint64_t>(2 * d + 1));
        EXPECT_EQ(counters().interpolations, 2u);
    }
}

TEST(SplitPatch, DegreeMismatchThrows) {
    EXPECT_THROW(split_patch(straight_patch({0, 0}, {1, 1}, 2), uniform_interpolation_map(3)), std::invalid_argument);
}

TEST(SplitPass, SmallPatchesUnchanged) {
    const auto& map = uniform_interpolation_map(3);
    FreeFormContour c = make_circle_contour({0, 0}, 20.0, 8);
    const FreeFormContour before = c;
    const auto rep = split_pass(c, map, 40.0);
    EXPECT_EQ(rep.changed, 0u);
    EXPECT_EQ(c, before);
}

TEST(SplitPass, OneOversizedPatchAddsOne) {
    const auto& map = uniform_interpolation_map(3);
    FreeFormContour c = make_polygon_contour({{0, 0}, {100, 0}, {100, 10}, {90, 10}, {80, 10}, {0, 10}});
    // Edges: 100, 10, 10, 10, 80, 10; threshold 90 splits only the first.
    const auto rep = split_pass(c, map, 90.0);
    EXPECT_EQ(rep.changed, 1u);
    EXPECT_EQ(c.size(), 7u);
    EXPECT_TRUE(c.is_closed(0.0));
    EXPECT_TRUE(c.index_is_sorted());
    ASSERT_EQ(rep.origin.size(), 7u);
    EXPECT_EQ(rep.origin[0], 0u);
    EXPECT_EQ(rep.origin[1], 0u);
    EXPECT_EQ(rep.origin[2], 1u);
}

TEST(SplitPass, RepeatedPassesTerminateGeometrically) {
    const auto& map = uniform_interpolation_map(3);
    FreeFormContour c = make_circle_contour({0, 0}, 500.0, 4);
    double prev_max = 1e300;
    int passes = 0;
    while (true) {
        double dmax = 0.0;
        for (const auto& p : c.patches()) dmax = std::max(dmax, p.control_diameter());
        EXPECT_LE(dmax, 0.75 * prev_max);
        prev_max = dmax;
        if (split_pass(c, map, 10.0).changed == 0) break;
        ASSERT_LT(++passes, 20);
    }
    for (const auto& p : c.patches()) EXPECT_LE(p.control_diameter(), 10.0);
}

TEST(SplitPass, PreservesClosureOrientationAndArea) {
    const auto& map = uniform_interpolation_map(3);
    FreeFormContour c = make_circle_contour({50, 50}, 200.0, 6);
    // Sampling each original patch at 1025 points and each half at 513 visits the same curve parameters.
    const double a0 = polygon_signed_area(sample_contour(c, 1025));
    split_pass(c, map, 150.0);
    ASSERT_EQ(c.size(), 12u);
    EXPECT_TRUE(c.is_closed(0.0));
    EXPECT_NEAR(polygon_signed_area(sample_contour(c, 513)), a0, 1e-9 * std::abs(a0));
    EXPECT_GT(signed_area(c), 0.0);
}

TEST(SplitPass, RejectsNonPositiveEpsilon) {
    FreeFormContour c = make_circle_contour({0, 0}, 10.0, 8);
    EXPECT_THROW(split_pass(c, uniform_interpolation_map(3), 0.0), std::invalid_argument);
}

TEST(MergePass, NothingUndersizedIsUnchanged) {
    FreeFormContour c = make_circle_contour({0, 0}, 100.0, 8);
    const FreeFormContour before = c;
    EXPECT_EQ(merge_pass(c, uniform_interpolation_map(3), 5.0).changed, 0u);
    EXPECT_EQ(c, before);
}

TEST(MergePass, CollinearPairBecomesOneSegment) {
    const auto& map = uniform_interpolation_map(3);
    FreeFormContour c = make_polygon_contour({{0, 0}, {1, 0}, {2, 0}, {40, 0}, {40, 40}, {0, 40}});
    const BezierPatch a = c.patch(0), b = c.patch(1);
    const auto rep = merge_pass(c, map, 2.0);
    EXPECT_EQ(rep.changed, 1u);
    EXPECT_EQ(c.size(), 5u);
    for (int k = 0; k <= 20; ++k) {
        const double t = k / 20.0;
        const Point2 orig = t <= 0.5 ? eval_de_casteljau(a, 2 * t) : eval_de_casteljau(b, 2 * t - 1);
        EXPECT_LE(distance(eval_de_casteljau(c.patch(0), t), orig), 1e-9);
    }
    EXPECT_TRUE(c.is_closed(0.0));
}

TEST(MergePass, CurvedPairDeviationIsBounded) {
    const auto& map = uniform_interpolation_map(3);
    FreeFormContour c = make_circle_contour({0, 0}, 10.0, 16);
    const FreeFormContour before = c;
    merge_pass(c, map, 10.0);
    EXPECT_LT(c.size(), 16u);
    EXPECT_GE(c.size(), 4u);
    // Every merged curve still lies close to the original circle.
    for (const auto& p : c.patches())
        for (int k = 0; k <= 10; ++k) EXPECT_NEAR(norm(eval_de_casteljau(p, k / 10.0)), 10.0, 0.1);
}

TEST(MergePass, NeverBelowFourPatches) {
    FreeFormContour c = make_circle_contour({0, 0}, 1.0, 5);
    merge_pass(c, uniform_interpolation_map(3), 100.0);
    EXPECT_GE(c.size(), 4u);
}
