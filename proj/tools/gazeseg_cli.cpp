// gazeseg: command-line front end for gaze-transition task segmentation.
//
//   gazeseg synth   --out DIR [--n 100] [--attenuated 10] [--features gzft|frames|none]
//   gazeseg extract --manifest M --out DIR [-w 20] [-b 256]
//   gazeseg segment --manifest M [--mode both|pos-only|feat-only] [--no-refine] [--out FILE]
//   gazeseg eval    --segmentation S (--manifest M | --truth T...) [--tolerance 10]
//   gazeseg sweep   --manifest M [--windows 5,10,...] [--thetas 25,50,...]

#include "gazeseg/detect.hpp"
#include "gazeseg/features.hpp"
#include "gazeseg/io.hpp"
#include "gazeseg/pipeline.hpp"
#include "gazeseg/signal.hpp"
#include "gazeseg/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace gazeseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitExcluded = 2;

void add_config_flags(CLI::App& cmd, DetectionConfig& cfg, std::string& mode) {
    cmd.add_option("-w,--window", cfg.window_w, "Median filter window w")->capture_default_str();
    cmd.add_option("-b,--patch-size", cfg.patch_b, "Patch side b in pixels")->capture_default_str();
    cmd.add_option("--theta-pos", cfg.theta_pos, "Position score threshold")->capture_default_str();
    cmd.add_option("--theta-feat", cfg.theta_feat, "Feature score threshold")->capture_default_str();
    cmd.add_option("--mode", mode, "Detection mode: both, pos-only, feat-only")->capture_default_str();
    cmd.add_flag("--refine,!--no-refine", cfg.refine, "Per-demo threshold refinement (default on)");
    cmd.add_option("--max-iters", cfg.max_iters, "Iteration budget per adjustment loop")->capture_default_str();
    cmd.add_option("--scale-down", cfg.scale_down, "Threshold factor when too few points")->capture_default_str();
    cmd.add_option("--scale-up", cfg.scale_up, "Threshold factor when too many points")->capture_default_str();
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw IoError("cannot write " + out_path);
    f << text;
    if (!f) throw IoError("write failed: " + out_path);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& tok : CLI::detail::split(text, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& tok : CLI::detail::split(text, ',')) out.push_back(std::stod(tok));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaze-transition task segmentation for teleoperated demonstrations"};
    app.require_subcommand(1);

    DetectionConfig cfg;
    std::string mode = "both";
    std::string out_path;
    int jobs = 1;

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
    std::string synth_out;
    int synth_n = 100;
    int synth_weak = 0;
    double weak_fraction = 0.7;
    std::uint64_t seed = 0;
    std::string synth_features = "gzft";
    std::string task = "synthetic";
    synth::TaskShape shape;
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--n", synth_n, "Number of demonstrations")->capture_default_str();
    synth_cmd->add_option("--attenuated", synth_weak, "Demos whose filtered position spikes are "
                                                      "--attenuation * --theta-pos")
        ->capture_default_str();
    synth_cmd->add_option("--attenuation", weak_fraction, "Spike fraction for attenuated demos")
        ->capture_default_str();
    synth_cmd->add_option("--theta-pos", cfg.theta_pos, "Reference position threshold")->capture_default_str();
    synth_cmd->add_option("-w,--window", cfg.window_w, "Reference median window for spike calibration")
        ->capture_default_str();
    synth_cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
    synth_cmd->add_option("--features", synth_features, "gzft, frames or none")->capture_default_str();
    synth_cmd->add_option("--task", task, "Task name")->capture_default_str();
    synth_cmd->add_option("--landmarks", shape.landmarks, "Landmarks per demo")->capture_default_str();
    synth_cmd->add_option("--noise", shape.noise_sigma, "Gaze noise sigma (px)")->capture_default_str();
    synth_cmd->add_option("--dwell-min", shape.dwell_min, "Shortest dwell in steps")->capture_default_str();
    synth_cmd->add_option("--dwell-max", shape.dwell_max, "Longest dwell in steps")->capture_default_str();
    synth_cmd->add_option("--glance-rate", shape.glance_rate, "Per-step glance probability")->capture_default_str();

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "Extract GZFT features from frames at the filtered gaze");
    std::string manifest_path;
    std::string extract_out;
    extract_cmd->add_option("--manifest", manifest_path, "Input manifest")->required();
    extract_cmd->add_option("--out", extract_out, "Output directory for features and manifest")->required();
    extract_cmd->add_option("-w,--window", cfg.window_w, "Median filter window w")->capture_default_str();
    extract_cmd->add_option("-b,--patch-size", cfg.patch_b, "Patch side b in pixels")->capture_default_str();

    // segment
    auto* segment_cmd = app.add_subcommand("segment", "Detect (and refine) change points for a dataset");
    segment_cmd->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    add_config_flags(*segment_cmd, cfg, mode);
    segment_cmd->add_option("--out", out_path, "Segmentation JSON (default stdout)");
    segment_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score a segmentation against ground truth");
    std::string seg_path;
    std::vector<std::string> truth_paths;
    Index tolerance = 10;
    eval_cmd->add_option("--segmentation", seg_path, "Segmentation JSON")->required();
    auto* eval_manifest = eval_cmd->add_option("--manifest", manifest_path, "Manifest whose ground truth to use");
    auto* eval_truth = eval_cmd->add_option("--truth", truth_paths, "Ground truth JSON file(s)");
    eval_manifest->excludes(eval_truth);
    eval_cmd->add_option("--tolerance", tolerance, "Boundary tolerance in steps")->capture_default_str();
    eval_cmd->add_option("--out", out_path, "Metrics JSON (default stdout)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep over w x theta_pos with and without refinement");
    std::string windows = "5,10,15,20,25,30";
    std::string thetas = "25,50,75,100,125,150";
    std::string refine_grid = "both";
    sweep_cmd->add_option("--manifest", manifest_path, "Dataset manifest")->required();
    add_config_flags(*sweep_cmd, cfg, mode);
    sweep_cmd->add_option("--windows", windows, "Comma-separated w values")->capture_default_str();
    sweep_cmd->add_option("--thetas", thetas, "Comma-separated theta_pos values")->capture_default_str();
    sweep_cmd->add_option("--refine-grid", refine_grid, "both, on or off")->capture_default_str();
    sweep_cmd->add_option("--tolerance", tolerance, "Boundary tolerance in steps")->capture_default_str();
    sweep_cmd->add_option("--out", out_path, "CSV output (default stdout)");
    sweep_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.mode = parse_mode(mode);

        if (*synth_cmd) {
            synth::DatasetOptions opts;
            opts.task = task;
            if (synth_features == "gzft") opts.features = synth::FeatureOutput::gzft;
            else if (synth_features == "frames") {
                // Rendered frames use a smaller view so the images stay manageable.
                opts.features = synth::FeatureOutput::frames;
                shape.view = {opts.render.image_w, opts.render.image_h};
                shape.origin = shape.view / 2.0;
            }
            else if (synth_features == "none") opts.features = synth::FeatureOutput::none;
            else throw ConfigError("--features must be gzft, frames or none");
            const auto specs = synth::benchmark_specs(shape, synth_n, synth_weak, weak_fraction, cfg.theta_pos,
                                                      cfg.window_w, seed);
            const auto manifest = synth::generate_dataset(specs, 1, synth_out, opts);
            std::cerr << "wrote " << synth_n << " demos, manifest " << manifest.string() << "\n";
            return kExitOk;
        }

        if (*extract_cmd) {
            const auto manifest = io::read_manifest(manifest_path);
            const auto dataset = pipeline::load_dataset(manifest);
            fs::create_directories(extract_out);
            io::Manifest out_manifest = manifest;
            out_manifest.base_dir = extract_out;
            const features::HistogramExtractor extractor;
            for (std::size_t i = 0; i < dataset.demos.size(); ++i) {
                const auto& d = dataset.demos[i];
                auto& e = out_manifest.demos[i];
                e.gaze = fs::absolute(manifest.resolve(e.gaze));
                if (e.ground_truth) e.ground_truth = fs::absolute(manifest.resolve(*e.ground_truth));
                e.frames_left.reset();
                e.frames_right.reset();
                if (!d.has_frames()) throw ValidationError("demo '" + d.id + "' has no frames to extract from");
                const auto filtered = median_filter(d.gaze, cfg.window_w);
                const auto& first = d.frames_left.front();
                const features::PatchSpec spec{cfg.patch_b, static_cast<int>(first.cols()),
                                               static_cast<int>(first.rows())};
                const auto f = features::extract_series(d.frames_left, d.frames_right, filtered, spec, extractor);
                e.features = fs::path(d.id + ".gzft");
                features::write_gzft(fs::path(extract_out) / *e.features, f);
            }
            io::write_manifest(fs::path(extract_out) / "manifest.json", out_manifest);
            return kExitOk;
        }

        if (*segment_cmd) {
            cfg.validate();
            const auto dataset = pipeline::load_dataset(fs::path(manifest_path));
            const auto report = pipeline::segment_dataset(dataset, cfg, jobs);
            emit(out_path, io::format_segmentation_json(dataset.task, report));
            const auto excluded = report.excluded_count();
            std::cerr << "s=" << report.s << ", " << report.per_demo.size() << " demos, " << excluded
                      << " excluded\n";
            return excluded > 0 ? kExitExcluded : kExitOk;
        }

        if (*eval_cmd) {
            const auto seg = io::read_segmentation_json(seg_path);
            std::vector<io::GroundTruth> truths;
            if (!manifest_path.empty()) {
                truths = pipeline::dataset_truths(pipeline::load_dataset(fs::path(manifest_path)));
            } else if (!truth_paths.empty()) {
                for (const auto& p : truth_paths) {
                    auto t = io::read_ground_truth_json(p);
                    truths.insert(truths.end(), t.begin(), t.end());
                }
            } else {
                throw ConfigError("eval needs --manifest or --truth");
            }
            const auto metrics = pipeline::evaluate(seg.report, truths, tolerance);
            emit(out_path, pipeline::format_metrics_json(metrics));
            std::cerr << "majority " << metrics.majority << " / " << metrics.n_demos << ", minority "
                      << metrics.minority << "\n";
            return kExitOk;
        }

        if (*sweep_cmd) {
            pipeline::SweepGrid grid;
            grid.windows = parse_int_list(windows);
            grid.theta_pos = parse_double_list(thetas);
            if (refine_grid == "both") grid.refine = {true, false};
            else if (refine_grid == "on") grid.refine = {true};
            else if (refine_grid == "off") grid.refine = {false};
            else throw ConfigError("--refine-grid must be both, on or off");
            const auto dataset = pipeline::load_dataset(fs::path(manifest_path));
            emit(out_path, pipeline::format_sweep_csv(pipeline::sweep(dataset, grid, cfg, tolerance, jobs)));
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
