#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "counters.hpp"
#include "geometry.hpp"

namespace ffac {

/// Binomial coefficient C(n, k) as a double; exact for the small degrees used here.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

/// Bernstein basis polynomial b_{d,i}(t) = C(d,i) t^i (1-t)^(d-i).
inline double bernstein(int d, int i, double t) {
    if (d < 0) throw std::invalid_argument("bernstein: negative degree");
    if (i < 0 || i > d) throw std::invalid_argument("bernstein: index out of range");
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("bernstein: t outside [0,1]");
    return binomial(d, i) * std::pow(t, i) * std::pow(1.0 - t, d - i);
}

/// A single degree-d Bezier patch, stored as its d+1 control points.
class BezierPatch {
public:
    BezierPatch() = default;
    explicit BezierPatch(std::vector<Point2> control) : control_(std::move(control)) {
        if (control_.empty()) throw std::invalid_argument("BezierPatch: no control points");
        for (const auto& p : control_)
            if (!is_finite(p)) throw std::invalid_argument("BezierPatch: non-finite control point");
    }
    BezierPatch(std::initializer_list<Point2> control)
        : BezierPatch(std::vector<Point2>(control)) {}

    int degree() const { return static_cast<int>(control_.size()) - 1; }
    std::span<const Point2> control() const { return control_; }
    std::vector<Point2>& mutable_control() { return control_; }
    const Point2& operator[](std::size_t i) const { return control_[i]; }
    Point2& operator[](std::size_t i) { return control_[i]; }
    const Point2& front() const { return control_.front(); }
    const Point2& back() const { return control_.back(); }

    BoundingBox box() const { return bounding_box(control_); }

    /// Largest distance between any two control points.
    double control_diameter() const {
        double best = 0.0;
        for (std::size_t a = 0; a < control_.size(); ++a)
            for (std::size_t b = a + 1; b < control_.size(); ++b)
                best = std::max(best, distance(control_[a], control_[b]));
        return best;
    }

    BezierPatch reversed() const {
        return BezierPatch(std::vector<Point2>(control_.rbegin(), control_.rend()));
    }

    friend bool operator==(const BezierPatch&, const BezierPatch&) = default;

private:
    std::vector<Point2> control_;
};

/// De Casteljau evaluation of an arbitrary control polygon; works in place on a scratch copy.
inline Point2 de_casteljau(std::span<const Point2> control, double t) {
    ++counters().evaluations;
    constexpr std::size_t kStack = 16;
    if (control.size() <= kStack) {
        Point2 tmp[kStack];
        std::copy(control.begin(), control.end(), tmp);
        for (std::size_t n = control.size(); n > 1; --n)
            for (std::size_t i = 0; i + 1 < n; ++i) tmp[i] = (1.0 - t) * tmp[i] + t * tmp[i + 1];
        return tmp[0];
    }
    std::vector<Point2> tmp(control.begin(), control.end());
    for (std::size_t n = tmp.size(); n > 1; --n)
        for (std::size_t i = 0; i + 1 < n; ++i) tmp[i] = (1.0 - t) * tmp[i] + t * tmp[i + 1];
    return tmp[0];
}

inline Point2 eval_de_casteljau(const BezierPatch& patch, double t) {
    return de_casteljau(patch.control(), t);
}

/// Direct Bernstein-sum evaluation. Slower and less stable than De Casteljau; kept as a
/// second evaluation route.
inline Point2 eval_bernstein(const BezierPatch& patch, double t) {
    Point2 acc{};
    const int d = patch.degree();
    for (int i = 0; i <= d; ++i) acc += bernstein(d, i, t) * patch[static_cast<std::size_t>(i)];
    return acc;
}

/// Control polygon of the derivative curve: d * (P_{i+1} - P_i).
inline std::vector<Point2> hodograph(const BezierPatch& patch) {
    const int d = patch.degree();
    std::vector<Point2> h;
    h.reserve(static_cast<std::size_t>(std::max(d, 0)));
    for (int i = 0; i < d; ++i)
        h.push_back(static_cast<double>(d) *
                    (patch[static_cast<std::size_t>(i + 1)] - patch[static_cast<std::size_t>(i)]));
    return h;
}

/// Tangent vector B'(t). A degree-0 patch has a zero derivative.
inline Point2 eval_derivative(const BezierPatch& patch, double t) {
    if (patch.degree() < 1) return {};
    const auto h = hodograph(patch);
    return de_casteljau(h, t);
}

/// Ordered parameter nodes 0 = t_0 < t_1 < ... < t_d = 1.
class Subdivision {
public:
    explicit Subdivision(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 2) throw std::invalid_argument("Subdivision: need at least two nodes");
        if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
            throw std::invalid_argument("Subdivision: nodes must start at 0 and end at 1");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i] > nodes_[i - 1]))
                throw std::invalid_argument("Subdivision: nodes must be strictly increasing");
    }

    static Subdivision uniform(int d) {
        if (d < 1) throw std::invalid_argument("Subdivision::uniform: degree must be >= 1");
        std::vector<double> t(static_cast<std::size_t>(d) + 1);
        for (int i = 0; i <= d; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / d;
        t.back() = 1.0;
        return Subdivision(std::move(t));
    }

    std::span<const double> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }

    friend bool operator==(const Subdivision&, const Subdivision&) = default;

private:
    std::vector<double> nodes_;
};

/// Dense row-major square matrix; only what the interpolation map needs.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    static SquareMatrix identity(std::size_t n) {
        SquareMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

    friend SquareMatrix operator*(const SquareMatrix& l, const SquareMatrix& r) {
        SquareMatrix out(l.n_);
        for (std::size_t i = 0; i < l.n_; ++i)
            for (std::size_t k = 0; k < l.n_; ++k)
                for (std::size_t j = 0; j < l.n_; ++j) out(i, j) += l(i, k) * r(k, j);
        return out;
    }

    /// Gauss-Jordan inverse with partial pivoting.
    SquareMatrix inverse() const {
        SquareMatrix a = *this;
        SquareMatrix inv = identity(n_);
        for (std::size_t col = 0; col < n_; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < n_; ++r)
                if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
            if (std::abs(a(piv, col)) < 1e-14)
                throw std::domain_error("SquareMatrix::inverse: matrix is singular");
            if (piv != col) {
                for (std::size_t c = 0; c < n_; ++c) {
                    std::swap(a(col, c), a(piv, c));
                    std::swap(inv(col, c), inv(piv, c));
                }
            }
            const double p = a(col, col);
            for (std::size_t c = 0; c < n_; ++c) {
                a(col, c) /= p;
                inv(col, c) /= p;
            }
            for (std::size_t r = 0; r < n_; ++r) {
                if (r == col) continue;
                const double f = a(r, col);
                if (f == 0.0) continue;
                for (std::size_t c = 0; c < n_; ++c) {
                    a(r, c) -= f * a(col, c);
                    inv(r, c) -= f * inv(col, c);
                }
            }
        }
        return inv;
    }

    /// out_i = sum_j m(i,j) * in_j, applied to a vector of points.
    std::vector<Point2> apply(std::span<const Point2> in) const {
        ++counters().interpolations;
        std::vector<Point2> out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            Point2 acc{};
            for (std::size_t j = 0; j < n_; ++j) acc += (*this)(i, j) * in[j];
            out[i] = acc;
        }
        return out;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// V (Bernstein basis sampled at the nodes) and its inverse for one degree and subdivision.
///
/// Row k of V is (b_{d,0}(t_k), ..., b_{d,d}(t_k)), so V maps control points to curve samples
/// and V^-1 maps d+1 samples to the control polygon that passes through them. The
/// Bernstein-Vandermonde system becomes ill-conditioned as d grows; degrees up to 8 stay
/// comfortably inside the 1e-9 interpolation tolerance.
struct InterpolationMap {
    int degree = 0;
    Subdivision nodes = Subdivision::uniform(1);
    SquareMatrix v;
    SquareMatrix v_inv;
};

inline InterpolationMap build_interpolation_map(int d, const Subdivision& nodes) {
    if (d < 1) throw std::invalid_argument("build_interpolation_map: degree must be >= 1");
    if (nodes.size() != static_cast<std::size_t>(d) + 1)
        throw std::invalid_argument("build_interpolation_map: need d+1 nodes");
    const auto n = static_cast<std::size_t>(d) + 1;
    SquareMatrix v(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) v(k, i) = bernstein(d, static_cast<int>(i), nodes[k]);
    SquareMatrix v_inv = v.inverse();
    // t_0 = 0 and t_d = 1 pin the endpoints, so the first and last rows of V^-1 are unit
    // vectors. Make them exact so shared patch endpoints move identically.
    for (std::size_t c = 0; c < n; ++c) {
        v_inv(0, c) = c == 0 ? 1.0 : 0.0;
        v_inv(n - 1, c) = c == n - 1 ? 1.0 : 0.0;
    }
    return InterpolationMap{d, nodes, std::move(v), std::move(v_inv)};
}

/// Cached map for the uniform subdivision of degree d; built once per degree.
inline const InterpolationMap& uniform_interpolation_map(int d) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<InterpolationMap>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[d];
    if (!slot)
        slot = std::make_unique<InterpolationMap>(build_interpolation_map(d, Subdivision::uniform(d)));
    return *slot;
}

/// Control polygon of the degree-d curve passing through samples[i] at t_i.
inline BezierPatch interpolate(const InterpolationMap& map, std::span<const Point2> samples) {
    if (samples.size() != map.nodes.size())
        throw std::invalid_argument("interpolate: sample count must be degree+1");
    return BezierPatch(map.v_inv.apply(samples));
}

/// Curve samples at the map's nodes.
inline std::vector<Point2> node_points(const InterpolationMap& map, const BezierPatch& patch) {
    std::vector<Point2> out;
    out.reserve(map.nodes.size());
    for (double t : map.nodes.nodes()) out.push_back(eval_de_casteljau(patch, t));
    return out;
}

/// Moves the curve samples at the nodes by `deltas`: new control = old + V^-1 * deltas.
inline BezierPatch deform(const InterpolationMap& map, const BezierPatch& patch,
                          std::span<const Point2> deltas) {
    if (deltas.size() != map.nodes.size() || patch.control().size() != map.nodes.size())
        throw std::invalid_argument("deform: deltas and patch must have degree+1 entries");
    const auto dp = map.v_inv.apply(deltas);
    std::vector<Point2> out(patch.control().begin(), patch.control().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += dp[i];
    return BezierPatch(std::move(out));
}

}  // namespace ffac
