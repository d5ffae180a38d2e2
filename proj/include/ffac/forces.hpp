#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bezier.hpp"
#include "counters.hpp"
#include "geometry.hpp"
#include "image.hpp"

namespace ffac {

enum class EdgeMapKind { gradient, canny };

/// Parameters of the image force field.
struct ForceParams {
    double sigma = 1.0;   // Gaussian smoothing, px
    int p = 2;            // exponent on the gradient magnitude
    EdgeMapKind kind = EdgeMapKind::gradient;
    double canny_low = 4.0;    // hysteresis thresholds on |grad| in gray levels per pixel
    double canny_high = 12.0;
    /// Intensities are stored in [0,1]; gradients are measured in 8-bit gray levels.
    double intensity_scale = 255.0;
};

/// Parameters of the contour evolution loop.
struct EvolutionParams {
    double step = 1.0;            // balloon displacement per iteration at f_diff = 1, px
    double edge_stop = 0.15;      // nodes with f_diff <= edge_stop are frozen
    int samples_per_patch = 4;    // must equal degree + 1
    double move_eps = 0.1;        // steady-state displacement, px
    double steady_fraction = 0.98;
    int max_iters = 2000;
    double split_epsilon = 40.0;  // control-polygon diameter that triggers a split, px
    double merge_epsilon = 0.0;   // 0 disables the merge pass
    bool refine = true;
    bool topology = true;
    /// Inner components whose enclosed area falls to this many px^2 (or whose orientation
    /// inverts) are dropped.
    double min_component_area = 4.0;

    void validate(int degree) const {
        if (!(step > 0.0)) throw std::invalid_argument("EvolutionParams: step must be positive");
        if (!(edge_stop > 0.0 && edge_stop < 1.0))
            throw std::invalid_argument("EvolutionParams: edge_stop must be in (0,1)");
        if (samples_per_patch != degree + 1)
            throw std::invalid_argument("EvolutionParams: samples_per_patch must equal degree+1");
        if (!(steady_fraction > 0.0 && steady_fraction <= 1.0))
            throw std::invalid_argument("EvolutionParams: steady_fraction must be in (0,1]");
        if (max_iters < 1) throw std::invalid_argument("EvolutionParams: max_iters must be >= 1");
        if (refine && !(split_epsilon > 0.0))
            throw std::invalid_argument("EvolutionParams: split_epsilon must be positive");
    }
};

/// Edge map F_edge = |grad(G_sigma * I)|^p, diffusion map F_diff = 1 / (1 + F_edge), and the
/// gradient of F_edge, which points toward edges.
struct ForceField {
    Raster<double> f_edge;
    Raster<double> f_diff;
    Raster<Point2> grad_edge;
    double sigma = 0.0;
    int p = 1;

    int width() const { return f_diff.width(); }
    int height() const { return f_diff.height(); }
};

inline std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double v = std::exp(-0.5 * i * i / (sigma * sigma));
        k[static_cast<std::size_t>(i + r)] = v;
        sum += v;
    }
    for (auto& v : k) v /= sum;
    return k;
}

namespace detail {

/// Half-sample symmetric reflection (-1 -> 0, n -> n-1); keeps the image mean under blurring.
inline int reflect(int i, int n) {
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

}  // namespace detail

/// Separable Gaussian blur with symmetric borders.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    if (img.width() <= r || img.height() <= r)
        throw std::invalid_argument("gaussian_blur: image smaller than kernel support");
    GrayImage tmp(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += k[static_cast<std::size_t>(i + r)] * img(detail::reflect(x + i, img.width()), y);
            tmp(x, y) = acc;
        }
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i)
                acc += k[static_cast<std::size_t>(i + r)] * tmp(x, detail::reflect(y + i, img.height()));
            out(x, y) = acc;
        }
    return out;
}

/// Central-difference gradient (one-sided halves at the border).
template <typename T>
Raster<Point2> central_gradient(const Raster<T>& r) {
    Raster<Point2> g(r.width(), r.height());
    for (int y = 0; y < r.height(); ++y)
        for (int x = 0; x < r.width(); ++x)
            g(x, y) = {0.5 * (r.at_clamped(x + 1, y) - r.at_clamped(x - 1, y)),
                       0.5 * (r.at_clamped(x, y + 1) - r.at_clamped(x, y - 1))};
    return g;
}

/// Canny edge pixels: non-maximum suppression of |grad| plus hysteresis.
inline RegionMask canny_edges(const Raster<Point2>& grad, double low, double high) {
    const int w = grad.width(), h = grad.height();
    Raster<double> mag(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) mag(x, y) = norm(grad(x, y));
    RegionMask strong(w, h, 0), weak(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double m = mag(x, y);
            if (m < low || m == 0.0) continue;
            // Quantise the gradient direction to one of four neighbour pairs.
            const Point2 g = grad(x, y);
            const double ang = std::atan2(g.y, g.x);
            const double a = std::fmod(ang + 2.0 * std::numbers::pi, std::numbers::pi);
            int dx = 1, dy = 0;
            if (a >= std::numbers::pi / 8 && a < 3 * std::numbers::pi / 8) { dx = 1; dy = 1; }
            else if (a >= 3 * std::numbers::pi / 8 && a < 5 * std::numbers::pi / 8) { dx = 0; dy = 1; }
            else if (a >= 5 * std::numbers::pi / 8 && a < 7 * std::numbers::pi / 8) { dx = -1; dy = 1; }
            const double m1 = mag.at_clamped(x + dx, y + dy);
            const double m2 = mag.at_clamped(x - dx, y - dy);
            if (m < m1 || m < m2) continue;
            (m >= high ? strong : weak)(x, y) = 1;
        }
    RegionMask out = strong;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (strong(x, y)) stack.emplace_back(x, y);
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy;
                if (!out.contains(nx, ny) || out(nx, ny) || !weak(nx, ny)) continue;
                out(nx, ny) = 1;
                stack.emplace_back(nx, ny);
            }
    }
    return out;
}

inline ForceField build_force_field(const GrayImage& img, const ForceParams& fp = {}) {
    if (!(fp.sigma > 0.0)) throw std::invalid_argument("build_force_field: sigma must be positive");
    if (fp.p < 1) throw std::invalid_argument("build_force_field: p must be >= 1");
    const GrayImage smooth = gaussian_blur(img, fp.sigma);
    Raster<Point2> grad = central_gradient(smooth);
    for (auto& g : grad.data()) g *= fp.intensity_scale;

    ForceField f;
    f.sigma = fp.sigma;
    f.p = fp.p;
    f.f_edge = Raster<double>(img.width(), img.height(), 0.0);
    std::optional<RegionMask> edges;
    if (fp.kind == EdgeMapKind::canny) {
        // One-pixel dilation so that a node moving by up to one pixel cannot step over the edge.
        const RegionMask thin = canny_edges(grad, fp.canny_low, fp.canny_high);
        edges = thin;
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) {
                if (!thin(x, y)) continue;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        if (edges->contains(x + dx, y + dy)) (*edges)(x + dx, y + dy) = 1;
            }
    }
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            if (edges && !(*edges)(x, y)) continue;
            f.f_edge(x, y) = std::pow(norm(grad(x, y)), fp.p);
        }
    f.f_diff = Raster<double>(img.width(), img.height());
    for (std::size_t i = 0; i < f.f_diff.size(); ++i)
        f.f_diff.data()[i] = 1.0 / (1.0 + f.f_edge.data()[i]);
    f.grad_edge = central_gradient(f.f_edge);
    return f;
}

/// Travel direction convention of a contour: `ccw` for positive signed area.
enum class Orientation { ccw, cw };

/// Unit normal pointing away from the region the contour encloses (the tangent rotated by -90
/// degrees for ccw contours). Empty when the tangent vanishes.
inline std::optional<Point2> outward_normal(const BezierPatch& patch, double t,
                                            Orientation orientation = Orientation::ccw) {
    const Point2 tan = eval_derivative(patch, t);
    const double len = norm(tan);
    if (!(len > 1e-12)) return std::nullopt;
    const Point2 n{tan.y / len, -tan.x / len};
    return orientation == Orientation::ccw ? n : -n;
}

/// Result of one balloon-force query.
struct ForceSample {
    Point2 delta;
    bool frozen = false;   // point sits on an edge (f_diff <= edge_stop)
    bool outside = false;  // point lies outside the image
};

/// Balloon displacement at `pt`: step * f_diff * normal in homogeneous regions, zero on edges.
inline ForceSample displacement_at(const ForceField& field, const Point2& pt, const Point2& normal,
                                   const EvolutionParams& params) {
    ++counters().force_samples;
    if (!(pt.x >= 0.0 && pt.y >= 0.0 && pt.x <= field.width() - 1 && pt.y <= field.height() - 1))
        return {{}, true, true};
    const double fd = bilinear(field.f_diff, pt);
    if (fd <= params.edge_stop) return {{}, true, false};
    return {params.step * fd * normal, false, false};
}

}  // namespace ffac
