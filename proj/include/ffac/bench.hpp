#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "counters.hpp"
#include "evolve.hpp"
#include "forces.hpp"
#include "freeform.hpp"
#include "synth.hpp"

namespace ffac {

/// Contour points as counted by the benchmark: the d+1 samples taken on every patch.
inline std::size_t sampled_points(std::size_t patches, int degree) {
    return patches * static_cast<std::size_t>(degree + 1);
}

struct BenchRow {
    std::string method = "FF";
    std::string scene;
    std::size_t initial_points = 0;
    std::size_t final_points = 0;
    int iterations = 0;
    double time_ms = 0.0;  // median over the repetitions
    std::size_t components = 0;
    bool converged = false;
};

inline constexpr const char* kBenchHeader = "method,initial_points,final_points,iterations,time_ms,scene,components";

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << kBenchHeader << '\n';
    for (const auto& r : rows) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.time_ms);
        out << r.method << ',' << r.initial_points << ',' << r.final_points << ',' << r.iterations << ',' << ms
            << ',' << r.scene << ',' << r.components << '\n';
    }
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct BenchSetup {
    int patches = 10;  // 10 cubic patches = 40 sampled points
    int degree = 3;
    ForceParams force;
    EvolutionParams evolution;
    int repetitions = 10;
};

/// Runs the evolution from the scene's seed circle `repetitions` times. Counted results come
/// from the first run (all runs are identical); time is the median wall time.
inline BenchRow bench_scene(const std::string& name, const SyntheticScene& scene, const BenchSetup& setup) {
    const ForceField field = build_force_field(scene.image, setup.force);
    const FreeFormContour init = make_circle_contour(scene.seed, scene.seed_radius, setup.patches, setup.degree);
    EvolutionParams ep = setup.evolution;
    ep.samples_per_patch = setup.degree + 1;
    BenchRow row;
    row.scene = name;
    std::vector<double> times;
    for (int r = 0; r < std::max(1, setup.repetitions); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const RunResult res = run(init, field, ep);
        times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        if (r == 0) {
            row.initial_points = sampled_points(init.size(), setup.degree);
            row.final_points = sampled_points(res.components.patch_count(), setup.degree);
            row.iterations = res.iterations;
            row.components = res.components.size();
            row.converged = res.converged;
        }
    }
    row.time_ms = median(times);
    return row;
}

/// Cost of flip-free evolution iterations for N and 2N initial patches on the same scene.
struct ScalingProbe {
    std::size_t n = 0;
    std::size_t ops_n = 0;
    std::size_t ops_2n = 0;
    double time_n_ms = 0.0;
    double time_2n_ms = 0.0;

    double ops_ratio() const { return static_cast<double>(ops_2n) / static_cast<double>(ops_n); }
    double time_ratio() const { return time_2n_ms / time_n_ms; }
};

/// Times `iterations` evolve steps from a circle of n and of 2n patches inside a large disk,
/// far from any edge. Refinement stays enabled; the patches are too small to split.
inline ScalingProbe scaling_probe(std::size_t n = 256, int iterations = 20, int repetitions = 9) {
    const SyntheticScene disk = make_synthetic("disk", 800, 600);
    const ForceField field = build_force_field(disk.image);
    const auto& map = uniform_interpolation_map(3);
    EvolutionParams ep;
    ScalingProbe probe;
    probe.n = n;
    auto measure = [&](std::size_t patches, std::size_t& ops, double& ms) {
        const FreeFormContour init = make_circle_contour(disk.seed, 100.0, static_cast<int>(patches), 3);
        std::vector<double> times;
        for (int r = 0; r < repetitions; ++r) {
            EvolutionState state = EvolutionState::from_contour(init);
            reset_counters();
            const auto t0 = std::chrono::steady_clock::now();
            for (int i = 0; i < iterations; ++i) state = evolve_step(std::move(state), field, map, ep);
            times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
            ops = counters().total();
        }
        ms = median(times);
    };
    measure(n, probe.ops_n, probe.time_n_ms);
    measure(2 * n, probe.ops_2n, probe.time_2n_ms);
    return probe;
}

/// Comparisons spent by a full sort of the box index of an n-patch contour whose patches are
/// visited in random order around a circle.
inline std::size_t sort_comparisons(std::size_t n, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    FreeFormContour c = make_circle_contour({0.0, 0.0}, 100.0, static_cast<int>(n), 3);
    std::vector<BezierPatch> patches(c.patches().begin(), c.patches().end());
    // Random radial jitter keeps the contour closed while scrambling the box order.
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    for (auto& p : patches)
        for (std::size_t k = 1; k + 1 < p.control().size(); ++k) p.mutable_control()[k] *= jitter(rng);
    c.assign(std::move(patches));
    reset_counters();
    c.rebuild_index();
    return counters().sort_comparisons;
}

}  // namespace ffac
