#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ffac/freeform.hpp"
#include "ffac/raster.hpp"
#include "support.hpp"

using namespace ffac;

TEST(CircleContour, EndpointsOnCircle) {
    const FreeFormContour c = make_circle_contour({0, 0}, 100.0, 8, 3);
    ASSERT_EQ(c.size(), 8u);
    for (const auto& p : c.patches()) {
        EXPECT_NEAR(norm(p.front()), 100.0, 1e-9);
        EXPECT_NEAR(norm(p.back()), 100.0, 1e-9);
    }
}

TEST(CircleContour, MidPatchWithinHalfPercent) {
    const FreeFormContour c = make_circle_contour({0, 0}, 100.0, 8, 3);
    for (const auto& p : c.patches())
        for (double t : {0.1, 0.25, 0.5, 0.75, 0.9}) EXPECT_NEAR(norm(eval_de_casteljau(p, t)), 100.0, 0.5);
}

TEST(CircleContour, ClosedAndIndexed) {
    const FreeFormContour c = make_circle_contour({10, 20}, 50.0, 12, 4);
    EXPECT_TRUE(c.is_closed(1e-12));
    EXPECT_EQ(c.max_closure_gap(), 0.0);
    EXPECT_TRUE(c.index_is_sorted());
    EXPECT_EQ(c.point_count(), 48u);
}

TEST(CircleContour, RejectsTooFewPatches) {
    EXPECT_THROW(make_circle_contour({0, 0}, 10.0, 2), std::invalid_argument);
    EXPECT_THROW(make_circle_contour({0, 0}, 0.0, 8), std::invalid_argument);
}

TEST(FreeFormContour, RejectsOpenChain) {
    std::vector<BezierPatch> patches{straight_patch({0, 0}, {10, 0}, 3), straight_patch({10, 0}, {10, 10}, 3),
                                     straight_patch({10, 10}, {0, 1}, 3)};
    EXPECT_THROW(FreeFormContour(3, patches), StructuralError);
}

TEST(FreeFormContour, RejectsMixedDegrees) {
    std::vector<BezierPatch> patches{straight_patch({0, 0}, {10, 0}, 3), straight_patch({10, 0}, {10, 10}, 2),
                                     straight_patch({10, 10}, {0, 0}, 3)};
    EXPECT_THROW(FreeFormContour(3, patches), std::invalid_argument);
}

TEST(FreeFormContour, SnapsSmallGaps) {
    std::vector<BezierPatch> patches{straight_patch({0, 0}, {10, 0}, 3), straight_patch({10, 1e-12}, {10, 10}, 3),
                                     straight_patch({10, 10}, {0, 0}, 3)};
    const FreeFormContour c(3, patches);
    EXPECT_EQ(c.max_closure_gap(), 0.0);
}

TEST(FreeFormContour, NeighboursAreCyclic) {
    const FreeFormContour c = make_circle_contour({0, 0}, 10.0, 5);
    EXPECT_EQ(c.next(4), 0u);
    EXPECT_EQ(c.prev(0), 4u);
    EXPECT_TRUE(c.adjacent(0, 4));
    EXPECT_TRUE(c.adjacent(2, 3));
    EXPECT_FALSE(c.adjacent(0, 2));
}

TEST(FreeFormContour, BoxesBoundControlPoints) {
    const FreeFormContour c = make_circle_contour({3, 4}, 30.0, 7);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const BoundingBox& b = c.boxes()[i];
        for (const auto& q : c.patch(i).control()) {
            EXPECT_GE(q.x, b.x_min);
            EXPECT_LE(q.x, b.x_max);
            EXPECT_GE(q.y, b.y_min);
            EXPECT_LE(q.y, b.y_max);
        }
        EXPECT_EQ(b, c.patch(i).box());
    }
}

TEST(FreeFormContour, RepairIndexAfterEdits) {
    std::mt19937_64 rng(21);
    FreeFormContour c = make_circle_contour({0, 0}, 100.0, 32);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int round = 0; round < 20; ++round) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto cp = std::vector<Point2>(c.patch(i).control().begin(), c.patch(i).control().end());
            for (std::size_t k = 1; k + 1 < cp.size(); ++k) cp[k] += Point2{u(rng), u(rng)};
            c.set_patch(i, BezierPatch(cp));
        }
        c.repair_index();
        EXPECT_TRUE(c.index_is_sorted());
    }
}

TEST(FreeFormContour, ReverseKeepsClosureAndFlipsArea) {
    FreeFormContour c = make_circle_contour({0, 0}, 40.0, 8);
    const double a = signed_area(c);
    c.reverse();
    EXPECT_TRUE(c.is_closed());
    EXPECT_NEAR(signed_area(c), -a, 1e-9 * std::abs(a));
    normalize_orientation(c);
    EXPECT_GT(signed_area(c), 0.0);
}

TEST(GlobalParameter, BoundariesAndClosure) {
    const FreeFormContour c = make_circle_contour({0, 0}, 100.0, 8);
    EXPECT_EQ(global_parameter_eval(c, 0.0), c.patch(0).front());
    EXPECT_LE(distance(global_parameter_eval(c, 1.0), c.patch(0).front()), 1e-12);
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_LE(distance(global_parameter_eval(c, static_cast<double>(i) / 8.0), c.patch(i).front()), 1e-12);
    EXPECT_THROW(global_parameter_eval(c, 1.1), std::invalid_argument);
}

TEST(GlobalParameter, ContinuousAcrossJoins) {
    const FreeFormContour c = make_circle_contour({0, 0}, 100.0, 8);
    const double eps = 1e-6;
    const double patch_len = 2.0 * std::numbers::pi * 100.0 / 8.0;
    for (int i = 1; i < 8; ++i) {
        const double t = i / 8.0;
        EXPECT_LE(distance(global_parameter_eval(c, t - eps), global_parameter_eval(c, t + eps)), 1e-3 * patch_len);
    }
}

TEST(SampleContour, CountAndSharedEndpoints) {
    const FreeFormContour c = make_circle_contour({0, 0}, 100.0, 8);
    const auto s = sample_contour(c, 4);
    ASSERT_EQ(s.size(), 8u * 3u);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(s[3 * i], c.patch(i).front());
    for (const auto& q : s) EXPECT_NEAR(norm(q), 100.0, 0.5);
    EXPECT_THROW(sample_contour(c, 1), std::invalid_argument);
}

TEST(SignedArea, CircleOrientationAndMagnitude) {
    const double r = 80.0;
    FreeFormContour c = make_circle_contour({200, 200}, r, 8);
    const double a = signed_area(c);
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(a, std::numbers::pi * r * r, 0.01 * std::numbers::pi * r * r);
    c.reverse();
    EXPECT_LT(signed_area(c), 0.0);
}

TEST(SignedArea, OpenContourIsStructuralError) {
    const auto c = FreeFormContour::unchecked(
        3, {straight_patch({0, 0}, {10, 0}, 3), straight_patch({10, 0}, {10, 10}, 3), straight_patch({10, 10}, {0, 2}, 3)});
    EXPECT_THROW(signed_area(c), StructuralError);
    EXPECT_THROW(rasterize_region(c, 20, 20), StructuralError);
}

TEST(Rasterize, SquareAreaWithinPerimeterBound) {
    const double a = 10.0;
    const FreeFormContour sq = make_polygon_contour({{5.3, 5.3}, {5.3 + a, 5.3}, {5.3 + a, 5.3 + a}, {5.3, 5.3 + a}});
    const RegionMask m = rasterize_region(sq, 32, 32);
    EXPECT_LE(std::abs(static_cast<double>(mask_count(m)) - a * a), 2.0 * 4.0 * a);
}

TEST(Rasterize, OutsideImageIsEmpty) {
    const FreeFormContour c = make_circle_contour({-100, -100}, 20.0, 8);
    EXPECT_EQ(mask_count(rasterize_region(c, 64, 64)), 0u);
}

TEST(Rasterize, NestedContoursGiveAnnulus) {
    const FreeFormContour outer = make_circle_contour({100, 100}, 60.0, 8);
    const FreeFormContour inner = make_circle_contour({100, 100}, 30.0, 8);
    const std::vector<FreeFormContour> both{outer, inner};
    const double ring = static_cast<double>(mask_count(rasterize_region(both, 200, 200)));
    const double expected = std::numbers::pi * (60.0 * 60.0 - 30.0 * 30.0);
    // The inner boundary pixels count as inside the annulus.
    EXPECT_NEAR(ring, expected, 2.0 * std::numbers::pi * (60.0 + 30.0));
    const RegionMask hole = rasterize_region(inner, 200, 200);
    const RegionMask annulus = rasterize_region(both, 200, 200);
    EXPECT_EQ(annulus(100, 100), 0);
    EXPECT_EQ(hole(100, 100), 1);
}

TEST(Rasterize, CircleAreaWithinOnePixelBand) {
    // Boundary pixels are included, so the count lies between the disks of radius r - 1 and r + 1.
    for (double r : {20.0, 45.0, 120.0}) {
        const FreeFormContour c = make_circle_contour({150, 150}, r, 8);
        const double area = static_cast<double>(mask_count(rasterize_region(c, 300, 300)));
        EXPECT_GE(area, std::numbers::pi * (r - 1) * (r - 1)) << "r=" << r;
        EXPECT_LE(area, std::numbers::pi * (r + 1) * (r + 1)) << "r=" << r;
        EXPECT_NEAR(area, std::numbers::pi * r * r, 0.02 * std::numbers::pi * r * r + std::numbers::pi * r) << "r=" << r;
    }
}

TEST(Rasterize, BoundaryPixelsAreInside) {
    const FreeFormContour sq = make_polygon_contour({{2, 2}, {8, 2}, {8, 8}, {2, 8}});
    const RegionMask m = rasterize_region(sq, 12, 12);
    for (int k = 2; k <= 8; ++k) {
        EXPECT_EQ(m(k, 2), 1);
        EXPECT_EQ(m(2, k), 1);
        EXPECT_EQ(m(k, 8), 1);
        EXPECT_EQ(m(8, k), 1);
    }
    EXPECT_EQ(mask_count(m), 49u);
}

TEST(Masks, SetOperations) {
    RegionMask a(4, 1, 0), b(4, 1, 0);
    a(0, 0) = a(1, 0) = 1;
    b(1, 0) = b(2, 0) = 1;
    EXPECT_EQ(mask_count(mask_union(a, b)), 3u);
    EXPECT_EQ(mask_count(mask_intersect(a, b)), 1u);
    EXPECT_EQ(mask_count(mask_subtract(a, b)), 1u);
    EXPECT_DOUBLE_EQ(mask_iou(a, b), 1.0 / 3.0);
    EXPECT_THROW(mask_union(a, RegionMask(3, 1, 0)), std::invalid_argument);
}
