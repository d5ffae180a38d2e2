#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bezier.hpp"
#include "forces.hpp"
#include "freeform.hpp"
#include "refine.hpp"
#include "topology.hpp"

namespace ffac {

/// Loop state of the free-form evolution.
struct EvolutionState {
    ComponentSet components;
    int iteration = 0;
    double frozen_fraction = 0.0;
    /// frozen[c][p]: patch p of component c (0 = outer, then inner in order) had every node
    /// frozen in the last iteration. Frozen patches are skipped by the deformation step.
    std::vector<std::vector<char>> frozen;
    double max_displacement = 0.0;
    int quiet_iterations = 0;
    std::size_t total_flips = 0;
    std::size_t total_splits = 0;
    std::size_t dropped_components = 0;
    std::vector<std::string> diagnostics;

    static EvolutionState from_contour(FreeFormContour c) {
        EvolutionState s;
        s.components.outer = std::move(c);
        s.frozen.assign(1, std::vector<char>(s.components.outer.size(), 0));
        return s;
    }

    std::size_t node_count() const {
        std::size_t n = 0;
        for (const auto& c : components.all()) n += c.point_count();
        return n;
    }
};

namespace detail {

inline bool on_image_border(const ForceField& f, const Point2& p) {
    return p.x <= 0.0 || p.y <= 0.0 || p.x >= f.width() - 1 || p.y >= f.height() - 1;
}

inline Point2 clamp_to_image(const ForceField& f, Point2 p) {
    p.x = std::clamp(p.x, 0.0, static_cast<double>(f.width() - 1));
    p.y = std::clamp(p.y, 0.0, static_cast<double>(f.height() - 1));
    return p;
}

struct DeformStats {
    std::size_t nodes = 0;
    std::size_t frozen_nodes = 0;
    double max_move = 0.0;
};

/// Unit normal at node k of a closed node polygon, from the chord between its two neighbours,
/// pointing away from the region of a positively oriented contour. Empty for a degenerate chord.
inline std::optional<Point2> node_normal(const std::vector<Point2>& ring, std::size_t k) {
    const std::size_t n = ring.size();
    const Point2 chord = ring[(k + 1) % n] - ring[(k + n - 1) % n];
    const double len = norm(chord);
    if (!(len > 1e-12)) return std::nullopt;
    return Point2{chord.y / len, -chord.x / len};
}

/// Moves the node points of every non-frozen patch along the outward normal and re-fits the
/// control polygons. A join shared by two patches is a single node, so both patches receive the
/// same displacement there and closure is preserved bit-exactly.
inline DeformStats deform_component(FreeFormContour& c, std::vector<char>& frozen,
                                    const ForceField& field, const InterpolationMap& map,
                                    const EvolutionParams& params) {
    const std::size_t n = c.size();
    const auto d = static_cast<std::size_t>(c.degree());
    frozen.resize(n, 0);

    // ring[p*d + m] is node m of patch p; node d of patch p is node 0 of patch p+1.
    std::vector<Point2> ring(n * d);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& patch = c.patch(p);
        ring[p * d] = patch.front();
        for (std::size_t m = 1; m < d; ++m) ring[p * d + m] = eval_de_casteljau(patch, map.nodes[m]);
    }

    const std::size_t total = ring.size();
    std::vector<Point2> delta(total);
    std::vector<char> node_frozen(total, 1);
    for (std::size_t k = 0; k < total; ++k) {
        const std::size_t p = k / d, m = k % d;
        const bool skip = m == 0 ? frozen[p] && frozen[c.prev(p)] : frozen[p];
        if (skip || on_image_border(field, ring[k])) continue;
        const auto normal = node_normal(ring, k);
        if (!normal) {
            node_frozen[k] = 0;
            continue;
        }
        const ForceSample s = displacement_at(field, ring[k], *normal, params);
        if (s.frozen) continue;
        node_frozen[k] = 0;
        delta[k] = clamp_to_image(field, ring[k] + s.delta) - ring[k];
    }

    DeformStats stats;
    stats.nodes = total;
    for (std::size_t k = 0; k < total; ++k) {
        if (node_frozen[k]) ++stats.frozen_nodes;
        stats.max_move = std::max(stats.max_move, norm(delta[k]));
    }

    std::vector<Point2> local(d + 1);
    for (std::size_t p = 0; p < n; ++p) {
        bool all_frozen = true;
        bool any_move = false;
        for (std::size_t m = 0; m <= d; ++m) {
            const std::size_t k = (p * d + m) % total;
            local[m] = delta[k];
            all_frozen = all_frozen && node_frozen[k];
            any_move = any_move || delta[k].x != 0.0 || delta[k].y != 0.0;
        }
        if (any_move) c.set_patch(p, deform(map, c.patch(p), local));
        frozen[p] = all_frozen ? 1 : 0;
    }
    c.repair_index();
    return stats;
}

}  // namespace detail

/// One outer iteration: split pass, topology pass, then node sampling, balloon displacement
/// and deformation of every non-frozen patch.
inline EvolutionState evolve_step(EvolutionState state, const ForceField& field,
                                  const InterpolationMap& map, const EvolutionParams& params) {
    params.validate(map.degree);
    std::vector<FreeFormContour> comps = state.components.all();
    std::vector<std::vector<char>> frozen = state.frozen;
    frozen.resize(comps.size());

    // Split and insert.
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        auto& f = frozen[ci];
        f.resize(comps[ci].size(), 0);
        if (params.refine) {
            const auto rep = split_pass(comps[ci], map, params.split_epsilon);
            if (rep.changed > 0) {
                std::vector<char> nf(rep.origin.size(), 0);
                for (std::size_t k = 0; k < rep.origin.size(); ++k) {
                    const bool split = (k > 0 && rep.origin[k - 1] == rep.origin[k]) ||
                                       (k + 1 < rep.origin.size() && rep.origin[k + 1] == rep.origin[k]);
                    nf[k] = split ? 0 : f[rep.origin[k]];
                }
                f = std::move(nf);
                state.total_splits += rep.changed;
            }
        }
        if (params.merge_epsilon > 0.0) {
            const auto rep = merge_pass(comps[ci], map, params.merge_epsilon);
            if (rep.changed > 0) f.assign(comps[ci].size(), 0);
        }
    }

    // Flip.
    if (params.topology) {
        std::vector<FreeFormContour> next;
        std::vector<std::vector<char>> next_frozen;
        for (std::size_t ci = 0; ci < comps.size(); ++ci) {
            std::size_t flips = 0, skipped = 0;
            std::vector<std::string> diag;
            auto parts = resolve_self_intersections(comps[ci], &flips, &skipped, std::nullopt, &diag);
            for (auto& msg : diag)
                if (std::find(state.diagnostics.begin(), state.diagnostics.end(), msg) == state.diagnostics.end())
                    state.diagnostics.push_back(std::move(msg));
            state.total_flips += flips;
            if (flips == 0) {
                next.push_back(std::move(comps[ci]));
                next_frozen.push_back(std::move(frozen[ci]));
                continue;
            }
            for (auto& part : parts) {
                next_frozen.emplace_back(part.size(), 0);
                next.push_back(std::move(part));
            }
        }
        comps = std::move(next);
        frozen = std::move(next_frozen);
    }

    // Sample, compute the deformation, deform.
    detail::DeformStats total;
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const auto s = detail::deform_component(comps[ci], frozen[ci], field, map, params);
        total.nodes += s.nodes;
        total.frozen_nodes += s.frozen_nodes;
        total.max_move = std::max(total.max_move, s.max_move);
    }

    // Outer is the largest component; split-off pieces whose enclosed area vanished or
    // inverted no longer bound anything and are dropped.
    std::size_t outer = 0;
    std::vector<double> areas(comps.size());
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        areas[ci] = signed_area(comps[ci]);
        if (std::abs(areas[ci]) > std::abs(areas[outer])) outer = ci;
    }
    ComponentSet set;
    std::vector<std::vector<char>> set_frozen;
    set.outer = std::move(comps[outer]);
    set_frozen.push_back(std::move(frozen[outer]));
    const double outer_sign = areas[outer] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        if (ci == outer) continue;
        if (outer_sign * areas[ci] > -params.min_component_area) {
            ++state.dropped_components;
            continue;
        }
        set.inner.push_back(std::move(comps[ci]));
        set_frozen.push_back(std::move(frozen[ci]));
    }
    set.flips = state.total_flips;
    state.components = std::move(set);
    state.frozen = std::move(set_frozen);
    state.iteration += 1;
    state.max_displacement = total.max_move;
    state.frozen_fraction =
        total.nodes == 0 ? 1.0 : static_cast<double>(total.frozen_nodes) / static_cast<double>(total.nodes);
    state.quiet_iterations = total.max_move < params.move_eps ? state.quiet_iterations + 1 : 0;
    return state;
}

struct RunResult {
    ComponentSet components;
    int iterations = 0;
    bool converged = false;
    double frozen_fraction = 0.0;
    std::size_t initial_points = 0;
    std::size_t final_points = 0;
    std::size_t flips = 0;
    std::size_t splits = 0;
    std::vector<std::string> diagnostics;
};

using EvolutionObserver = std::function<void(const EvolutionState&)>;

/// Iterates evolve_step until the steady fraction of nodes is frozen, every node moved less than
/// move_eps for 3 consecutive iterations, or max_iters is reached (non-converged).
inline RunResult run(FreeFormContour contour, const ForceField& field, const EvolutionParams& params,
                     const EvolutionObserver& observer = {}) {
    const auto& map = uniform_interpolation_map(contour.degree());
    params.validate(contour.degree());
    RunResult result;
    result.initial_points = contour.point_count();
    EvolutionState state = EvolutionState::from_contour(std::move(contour));
    while (state.iteration < params.max_iters) {
        state = evolve_step(std::move(state), field, map, params);
        if (observer) observer(state);
        if (state.frozen_fraction >= params.steady_fraction || state.quiet_iterations >= 3) {
            result.converged = true;
            break;
        }
    }
    result.iterations = state.iteration;
    result.frozen_fraction = state.frozen_fraction;
    result.flips = state.total_flips;
    result.splits = state.total_splits;
    result.final_points = 0;
    for (const auto& c : state.components.all()) result.final_points += c.point_count();
    result.diagnostics = std::move(state.diagnostics);
    result.components = std::move(state.components);
    return result;
}

}  // namespace ffac
