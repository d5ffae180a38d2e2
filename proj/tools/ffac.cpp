#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ffac/ffac.hpp"

namespace fs = std::filesystem;
using namespace ffac;

namespace {

constexpr int kOk = 0;
constexpr int kNotConverged = 1;
constexpr int kInputError = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Config read_config(const std::string& path) { return path.empty() ? parse_config("") : load_config(path); }

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
}

FreeFormContour initial_contour(const Config& cfg, int width, int height) {
    const Point2 centre{cfg.init_x < 0.0 ? 0.5 * width : cfg.init_x, cfg.init_y < 0.0 ? 0.5 * height : cfg.init_y};
    const double radius = cfg.init_radius > 0.0 ? cfg.init_radius : 0.05 * std::min(width, height);
    if (centre.x - radius < 0.0 || centre.y - radius < 0.0 || centre.x + radius > width - 1 ||
        centre.y + radius > height - 1)
        throw InputError("initial circle does not fit inside the image");
    return make_circle_contour(centre, radius, cfg.init_patches, cfg.degree);
}

EvolutionObserver snapshot_observer(const Config& cfg, const GrayImage& img, const fs::path& out) {
    if (cfg.snapshot_every <= 0) return {};
    return [&cfg, &img, out](const EvolutionState& s) {
        if (s.iteration % cfg.snapshot_every != 0) return;
        char name[32];
        std::snprintf(name, sizeof name, "snap_%05d", s.iteration);
        save_json(components_to_json(s.components), out / (std::string(name) + ".json"));
        render_overlay(img, s.components.all(), out / name);
    };
}

int cmd_synth(const std::string& shape, int width, int height, const fs::path& out) {
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    fs::path stem = out;
    stem.replace_extension();
    if (shape == "road") {
        const RoadScene r = make_road_scene(width, height);
        save_gray(r.prev, stem.string() + "_prev.png");
        save_gray(r.curr, stem.string() + "_curr.png");
        save_mask(r.free_space, stem.string() + "_truth.png");
        std::vector<AltitudeSample> rows;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                if (r.altitude(x, y) != 0.0) rows.push_back({{double(x), double(y)}, r.altitude(x, y)});
        save_altitude_csv(rows, stem.string() + "_altitude.csv");
        std::cout << "wrote " << stem.string() << "_{prev,curr,truth}.png and " << stem.string()
                  << "_altitude.csv\n";
        return kOk;
    }
    SyntheticScene s;
    try {
        s = make_synthetic(shape, width, height);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    save_gray(s.image, out);
    save_mask(s.truth, stem.string() + "_truth.png");
    std::cout << "wrote " << out.string() << " and " << stem.string() << "_truth.png\n";
    return kOk;
}

int cmd_segment(const fs::path& image, const std::string& config, const fs::path& out, const std::string& truth) {
    const Config cfg = read_config(config);
    const GrayImage img = load_gray(image);
    ensure_dir(out);
    const ForceField field = build_force_field(img, cfg.force);
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult res = run(initial_contour(cfg, img.width(), img.height()), field, cfg.evolution,
                              snapshot_observer(cfg, img, out));
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    save_json(components_to_json(res.components), out / "contour.json");
    const RegionMask mask = free_space_mask(res.components.outer, res.components.inner, img.width(), img.height());
    save_mask(mask, out / "mask.png");
    render_overlay(img, res.components.all(), out / "overlay");
    json report = {{"converged", res.converged},     {"iterations", res.iterations},
                   {"components", res.components.size()}, {"flips", res.flips},
                   {"splits", res.splits},           {"initial_points", res.initial_points},
                   {"final_points", res.final_points}, {"frozen_fraction", res.frozen_fraction},
                   {"time_ms", ms},                  {"diagnostics", res.diagnostics}};
    if (!truth.empty()) report["iou"] = mask_iou(mask, load_mask(truth));
    save_json(report, out / "report.json");
    std::cout << "components " << res.components.size() << ", iterations " << res.iterations
              << (res.converged ? "" : " (not converged)") << '\n';
    return res.converged ? kOk : kNotConverged;
}

int cmd_freespace(const fs::path& prev, const fs::path& curr, const std::string& altitudes,
                  const std::string& config, const fs::path& out) {
    const Config cfg = read_config(config);
    const ImagePair pair{load_gray(prev), load_gray(curr)};
    try {
        pair.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    ensure_dir(out);
    AltitudeOracle oracle = [&cfg](const Point2&, const Point2&) { return cfg.altitude_default; };
    if (!altitudes.empty())
        oracle = table_altitude_oracle(load_altitude_csv(altitudes), cfg.altitude_radius, cfg.altitude_default);
    // Unset initial-circle keys fall back to the robot position of an 800x600 frame, scaled.
    FreeSpaceParams fp;
    const int w = pair.curr.width(), h = pair.curr.height();
    const double sx = w / 800.0, sy = h / 600.0;
    Config start = cfg;
    if (start.init_radius <= 0.0) start.init_radius = fp.init_radius * std::min(sx, sy);
    if (start.init_x < 0.0) start.init_x = fp.init_center.x * sx;
    if (start.init_y < 0.0) start.init_y = fp.init_center.y * sy;
    (void)initial_contour(start, w, h);  // rejects a circle outside the frame
    fp.init_radius = start.init_radius;
    fp.init_center = {start.init_x, start.init_y};
    fp.init_patches = cfg.init_patches;
    fp.degree = cfg.degree;
    fp.force = cfg.force;
    fp.evolution = cfg.evolution;
    fp.classify = cfg.classify;
    fp.eps_alt = cfg.eps_alt;
    const FreeSpaceResult res = segment_free_space(pair, fp, oracle, snapshot_observer(cfg, pair.curr, out));

    save_mask(res.free_space_mask, out / "free_space.png");
    std::vector<FreeFormContour> shown{res.outer};
    shown.insert(shown.end(), res.retained_obstacles.begin(), res.retained_obstacles.end());
    render_overlay(pair.curr, shown, out / "overlay");
    ComponentSet set;
    set.outer = res.outer;
    set.inner = res.retained_obstacles;
    save_json(components_to_json(set), out / "contour.json");
    save_json(freespace_report(res), out / "report.json");
    std::cout << "retained " << res.retained_obstacles.size() << ", merged " << res.merged_components.size()
              << (res.converged ? "" : " (not converged)") << '\n';
    return res.converged ? kOk : kNotConverged;
}

int cmd_bench(const std::string& suite, int reps, const std::string& config, const std::string& out) {
    const Config cfg = read_config(config);
    BenchSetup setup;
    setup.degree = cfg.degree;
    setup.force = cfg.force;
    setup.evolution = cfg.evolution;
    setup.repetitions = reps;
    if (suite != "toy" && suite != "reference" && suite != "scaling" && suite != "all")
        throw InputError("unknown suite '" + suite + "' (toy, reference, scaling, all)");

    std::vector<BenchRow> rows;
    if (suite == "reference" || suite == "all") {
        rows.push_back(bench_scene("simple", make_synthetic("disk"), setup));
        rows.push_back(bench_scene("complex", make_synthetic("two-holes"), setup));
        BenchSetup dense = setup;
        dense.patches = 80;
        dense.evolution.refine = false;
        BenchRow r = bench_scene("complex-n80-norefine", make_synthetic("two-holes"), dense);
        rows.push_back(r);
    }
    if (suite == "toy" || suite == "all") {
        BenchSetup toy = setup;
        toy.patches = 8;
        for (auto name : synthetic_shape_names())
            rows.push_back(bench_scene(std::string(name), make_synthetic(name), toy));
    }
    if (!rows.empty()) {
        if (out.empty()) {
            write_bench_csv(std::cout, rows);
        } else {
            std::ofstream f(out);
            if (!f) throw InputError("cannot write " + out);
            write_bench_csv(f, rows);
        }
    }
    if (suite == "scaling" || suite == "all") {
        const ScalingProbe p = scaling_probe();
        std::cerr << "scaling N=" << p.n << " vs 2N: ops ratio " << p.ops_ratio() << ", time ratio "
                  << p.time_ratio() << '\n';
        for (std::size_t n : {64, 256, 1024}) {
            const std::size_t cmp = sort_comparisons(n);
            std::cerr << "sort N=" << n << ": " << cmp << " comparisons, bound 3 N log2 N = "
                      << 3.0 * n * std::log2(static_cast<double>(n)) << '\n';
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-form active contours: segmentation, free-space extraction and benchmarks"};
    app.require_subcommand(1);

    std::string shape = "two-holes", synth_out = "synth.png";
    int width = 800, height = 600;
    auto* synth = app.add_subcommand("synth", "Render a synthetic test image and its ground-truth mask");
    synth->add_option("--shape", shape, "blob, blob-with-holes, dumbbell, two-holes, disk, or road")
        ->capture_default_str();
    synth->add_option("--width", width, "Image width")->capture_default_str()->check(CLI::Range(32, 20000));
    synth->add_option("--height", height, "Image height")->capture_default_str()->check(CLI::Range(32, 20000));
    synth->add_option("-o,--output", synth_out, "Output PNG (ground truth goes to <stem>_truth.png)")
        ->capture_default_str();

    std::string image, config, out_dir = "out", truth;
    auto* segment = app.add_subcommand("segment", "Evolve a contour on an image");
    segment->add_option("image", image, "Input PGM or PNG")->required();
    segment->add_option("-c,--config", config, "key = value configuration file");
    segment->add_option("-o,--output", out_dir, "Output directory")->capture_default_str();
    segment->add_option("--truth", truth, "Ground-truth mask; adds IoU to the report");

    std::string prev, curr, altitudes;
    auto* freespace = app.add_subcommand("freespace", "Free-space extraction from two successive frames");
    freespace->add_option("prev", prev, "Previous frame")->required();
    freespace->add_option("curr", curr, "Current frame")->required();
    freespace->add_option("--altitudes", altitudes, "CSV x,y,altitude_m in current-image coordinates");
    freespace->add_option("-c,--config", config, "key = value configuration file");
    freespace->add_option("-o,--output", out_dir, "Output directory")->capture_default_str();

    std::string suite = "all", bench_out;
    int reps = 10;
    auto* bench = app.add_subcommand("bench", "Point counts, iterations and timings (CSV)");
    bench->add_option("--suite", suite, "toy, reference, scaling or all")->capture_default_str();
    bench->add_option("--reps", reps, "Repetitions per scene (median time)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench->add_option("-c,--config", config, "key = value configuration file");
    bench->add_option("-o,--output", bench_out, "CSV output file (default: stdout)");

    auto* defaults = app.add_subcommand("config", "Print every configuration key with its default value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*synth) return cmd_synth(shape, width, height, synth_out);
        if (*segment) return cmd_segment(image, config, out_dir, truth);
        if (*freespace) return cmd_freespace(prev, curr, altitudes, config, out_dir);
        if (*bench) return cmd_bench(suite, reps, config, bench_out);
        if (*defaults) {
            std::cout << format_config(Config{});
            return kOk;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const DecodeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}
