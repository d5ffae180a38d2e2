#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "evolve.hpp"
#include "forces.hpp"
#include "freeform.hpp"
#include "image.hpp"
#include "raster.hpp"

namespace ffac {

/// Two successive frames; prev is I_{k-1}, curr is I_k.
struct ImagePair {
    GrayImage prev;
    GrayImage curr;

    void validate() const {
        if (prev.empty() || curr.empty()) throw std::invalid_argument("ImagePair: empty image");
        if (prev.width() != curr.width() || prev.height() != curr.height())
            throw std::invalid_argument("ImagePair: frames differ in size");
    }
};

struct InterestPoint {
    Point2 position;
    double response = 0.0;
};

struct HarrisParams {
    double sigma_d = 1.0;   // derivative smoothing
    double sigma_i = 1.5;   // integration scale of the structure tensor
    double k = 0.06;
    double threshold = 0.01;  // relative to the strongest response in the region
};

/// Harris corners: response det(M) - k trace(M)^2 of the smoothed structure tensor, 3x3
/// non-maximum suppression, relative threshold, restricted to `region`. Positions are refined
/// to sub-pixel accuracy by a separable parabola fit.
inline std::vector<InterestPoint> harris_points(const GrayImage& img, const RegionMask& region,
                                                const HarrisParams& hp = {}) {
    if (region.width() != img.width() || region.height() != img.height())
        throw std::invalid_argument("harris_points: region size differs from image");
    if (mask_count(region) == 0) throw std::invalid_argument("harris_points: empty region");
    const int w = img.width(), h = img.height();
    const auto grad = central_gradient(gaussian_blur(img, hp.sigma_d));
    GrayImage xx(w, h), xy(w, h), yy(w, h);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const Point2 g = grad.data()[i];
        xx.data()[i] = g.x * g.x;
        xy.data()[i] = g.x * g.y;
        yy.data()[i] = g.y * g.y;
    }
    xx = gaussian_blur(xx, hp.sigma_i);
    xy = gaussian_blur(xy, hp.sigma_i);
    yy = gaussian_blur(yy, hp.sigma_i);
    GrayImage resp(w, h);
    for (std::size_t i = 0; i < resp.size(); ++i) {
        const double a = xx.data()[i], b = xy.data()[i], c = yy.data()[i];
        resp.data()[i] = a * c - b * b - hp.k * (a + c) * (a + c);
    }

    double peak = 0.0;
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x)
            if (region(x, y)) peak = std::max(peak, resp(x, y));
    std::vector<InterestPoint> out;
    if (!(peak > 0.0)) return out;
    const double cut = hp.threshold * peak;
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
            if (!region(x, y)) continue;
            const double r = resp(x, y);
            if (!(r > cut)) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const double q = resp(x + dx, y + dy);
                    // Ties go to the first pixel in raster order.
                    const bool earlier = dy < 0 || (dy == 0 && dx < 0);
                    if (q > r || (earlier && q == r)) {
                        is_max = false;
                        break;
                    }
                }
            if (!is_max) continue;
            auto offset = [](double m, double c0, double p) {
                const double den = m - 2.0 * c0 + p;
                return den < 0.0 ? std::clamp(0.5 * (m - p) / den, -0.5, 0.5) : 0.0;
            };
            const Point2 pos{x + offset(resp(x - 1, y), r, resp(x + 1, y)),
                             y + offset(resp(x, y - 1), r, resp(x, y + 1))};
            out.push_back({pos, r});
        }
    return out;
}

struct MatchParams {
    int half_window = 3;   // 7x7 windows
    double max_disp = 30.0;
    double min_ncc = 0.8;
};

struct PointMatch {
    InterestPoint prev;
    InterestPoint curr;
    double ncc = 0.0;
};

/// Normalised cross-correlation of the (2w+1)^2 windows centred at the rounded positions.
/// NaN when a window leaves the image or has no contrast.
inline double window_ncc(const GrayImage& a, Point2 pa, const GrayImage& b, Point2 pb, int w) {
    const int ax = static_cast<int>(std::lround(pa.x)), ay = static_cast<int>(std::lround(pa.y));
    const int bx = static_cast<int>(std::lround(pb.x)), by = static_cast<int>(std::lround(pb.y));
    if (!a.contains(ax - w, ay - w) || !a.contains(ax + w, ay + w) || !b.contains(bx - w, by - w) ||
        !b.contains(bx + w, by + w))
        return std::numeric_limits<double>::quiet_NaN();
    const double n = (2.0 * w + 1) * (2.0 * w + 1);
    double sa = 0, sb = 0;
    for (int dy = -w; dy <= w; ++dy)
        for (int dx = -w; dx <= w; ++dx) {
            sa += a(ax + dx, ay + dy);
            sb += b(bx + dx, by + dy);
        }
    const double ma = sa / n, mb = sb / n;
    double saa = 0, sbb = 0, sab = 0;
    for (int dy = -w; dy <= w; ++dy)
        for (int dx = -w; dx <= w; ++dx) {
            const double u = a(ax + dx, ay + dy) - ma, v = b(bx + dx, by + dy) - mb;
            saa += u * u;
            sbb += v * v;
            sab += u * v;
        }
    if (!(saa > 1e-12 && sbb > 1e-12)) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

/// Mutual-best NCC matches between the two point sets within max_disp and above min_ncc.
inline std::vector<PointMatch> match_points(const ImagePair& pair, const std::vector<InterestPoint>& pts_prev,
                                            const std::vector<InterestPoint>& pts_curr,
                                            const MatchParams& mp = {}) {
    pair.validate();
    const std::size_t np = pts_prev.size(), nc = pts_curr.size();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best_for_curr(nc, none), best_for_prev(np, none);
    std::vector<double> score_curr(nc, -2.0), score_prev(np, -2.0);
    std::vector<std::vector<std::pair<std::size_t, double>>> scores(nc);
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t p = 0; p < np; ++p) {
            if (distance(pts_prev[p].position, pts_curr[c].position) > mp.max_disp) continue;
            const double s = window_ncc(pair.curr, pts_curr[c].position, pair.prev, pts_prev[p].position,
                                        mp.half_window);
            if (std::isnan(s)) continue;
            if (s > score_curr[c]) {
                score_curr[c] = s;
                best_for_curr[c] = p;
            }
            if (s > score_prev[p]) {
                score_prev[p] = s;
                best_for_prev[p] = c;
            }
        }
    std::vector<PointMatch> out;
    for (std::size_t c = 0; c < nc; ++c) {
        const std::size_t p = best_for_curr[c];
        if (p == none || best_for_prev[p] != c || score_curr[c] < mp.min_ncc) continue;
        out.push_back({pts_prev[p], pts_curr[c], score_curr[c]});
    }
    return out;
}

/// Altitude in metres of the scene point seen at `prev` in I_{k-1} and `curr` in I_k.
using AltitudeOracle = std::function<double(const Point2& prev, const Point2& curr)>;

/// Oracle reading a per-pixel altitude map at the current-image position (nearest pixel).
inline AltitudeOracle raster_altitude_oracle(Raster<double> altitude) {
    return [alt = std::move(altitude)](const Point2&, const Point2& curr) {
        const int x = std::clamp(static_cast<int>(std::lround(curr.x)), 0, alt.width() - 1);
        const int y = std::clamp(static_cast<int>(std::lround(curr.y)), 0, alt.height() - 1);
        return alt(x, y);
    };
}

struct AltitudeSample {
    Point2 position;  // current-image coordinates
    double altitude = 0.0;
};

/// Oracle backed by a table of measured points: the altitude of the nearest entry within
/// `radius` px of the current-image position, `fallback` when none is that close.
inline AltitudeOracle table_altitude_oracle(std::vector<AltitudeSample> table, double radius = 2.0,
                                            double fallback = 0.0) {
    return [table = std::move(table), radius, fallback](const Point2&, const Point2& curr) {
        double best = radius;
        double value = fallback;
        bool found = false;
        for (const auto& s : table) {
            const double dd = distance(s.position, curr);
            if (dd < best || (!found && dd <= radius)) {
                best = dd;
                value = s.altitude;
                found = true;
            }
        }
        return value;
    };
}

enum class Classification { keep, merge };

inline const char* to_string(Classification c) { return c == Classification::keep ? "keep" : "merge"; }

struct ComponentReport {
    Classification decision = Classification::keep;
    std::size_t matched_points = 0;
    double max_altitude = 0.0;  // over matched points; 0 when there are none
};

struct ClassifyParams {
    HarrisParams harris;
    MatchParams match;
};

namespace detail {

inline RegionMask box_region(const BoundingBox& b, double margin, int w, int h) {
    RegionMask m(w, h, 0);
    const int x0 = std::max(0, static_cast<int>(std::floor(b.x_min - margin)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.y_min - margin)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(b.x_max + margin)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(b.y_max + margin)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) m(x, y) = 1;
    return m;
}

inline BoundingBox contour_box(const FreeFormContour& c) {
    BoundingBox b = c.boxes().front();
    for (const auto& q : c.boxes()) {
        b.x_min = std::min(b.x_min, q.x_min);
        b.y_min = std::min(b.y_min, q.y_min);
        b.x_max = std::max(b.x_max, q.x_max);
        b.y_max = std::max(b.y_max, q.y_max);
    }
    return b;
}

}  // namespace detail

/// Altitude test on one inner component: keep when some matched point inside it is at or above
/// eps_alt, merge when every matched point is below, keep when nothing matched.
inline ComponentReport classify_component(const FreeFormContour& comp, const ImagePair& pair,
                                          const AltitudeOracle& oracle, double eps_alt,
                                          const ClassifyParams& cp = {}) {
    pair.validate();
    const int w = pair.curr.width(), h = pair.curr.height();
    const RegionMask inside = rasterize_region(comp, w, h);
    ComponentReport report;
    if (mask_count(inside) == 0) return report;
    const RegionMask search = detail::box_region(detail::contour_box(comp), cp.match.max_disp, w, h);
    const auto pts_curr = harris_points(pair.curr, inside, cp.harris);
    const auto pts_prev = harris_points(pair.prev, search, cp.harris);
    const auto matches = match_points(pair, pts_prev, pts_curr, cp.match);
    bool any_high = false;
    for (const auto& m : matches) {
        const double alt = oracle(m.prev.position, m.curr.position);
        report.max_altitude = report.matched_points == 0 ? alt : std::max(report.max_altitude, alt);
        ++report.matched_points;
        any_high = any_high || alt >= eps_alt;
    }
    report.decision = (report.matched_points == 0 || any_high) ? Classification::keep : Classification::merge;
    return report;
}

struct FreeSpaceParams {
    Point2 init_center{400.0, 470.0};
    double init_radius = 30.0;
    int init_patches = 8;
    int degree = 3;
    ForceParams force;
    EvolutionParams evolution;
    ClassifyParams classify;
    double eps_alt = 0.05;  // metres
};

struct FreeSpaceResult {
    FreeFormContour outer;
    std::vector<FreeFormContour> retained_obstacles;
    std::vector<FreeFormContour> merged_components;
    RegionMask free_space_mask;
    std::vector<ComponentReport> reports;  // one per inner component, in evolution order
    std::vector<char> retained_flags;      // parallel to reports
    bool converged = false;
    int iterations = 0;
};

/// Free space = outer region minus the union of the retained obstacle regions.
inline RegionMask free_space_mask(const FreeFormContour& outer, const std::vector<FreeFormContour>& retained,
                                  int width, int height) {
    RegionMask m = rasterize_region(outer, width, height);
    if (!retained.empty()) m = mask_subtract(m, rasterize_region(retained, width, height));
    return m;
}

/// Edge map of I_k, circle initialisation, evolution, then the altitude test on every inner
/// component. False obstacles are merged back into the free space.
inline FreeSpaceResult segment_free_space(const ImagePair& pair, const FreeSpaceParams& fp,
                                          const AltitudeOracle& oracle,
                                          const EvolutionObserver& observer = {}) {
    pair.validate();
    const int w = pair.curr.width(), h = pair.curr.height();
    if (!image_contains(pair.curr, fp.init_center))
        throw std::invalid_argument("segment_free_space: initial centre outside the image");
    const ForceField field = build_force_field(pair.curr, fp.force);
    const auto run_result =
        run(make_circle_contour(fp.init_center, fp.init_radius, fp.init_patches, fp.degree), field,
            fp.evolution, observer);
    FreeSpaceResult res;
    res.converged = run_result.converged;
    res.iterations = run_result.iterations;
    res.outer = run_result.components.outer;
    for (const auto& comp : run_result.components.inner) {
        const ComponentReport rep = classify_component(comp, pair, oracle, fp.eps_alt, fp.classify);
        res.reports.push_back(rep);
        const bool keep = rep.decision == Classification::keep;
        res.retained_flags.push_back(keep ? 1 : 0);
        (keep ? res.retained_obstacles : res.merged_components).push_back(comp);
    }
    res.free_space_mask = free_space_mask(res.outer, res.retained_obstacles, w, h);
    return res;
}

}  // namespace ffac
