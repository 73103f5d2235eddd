#include "gazeseg/pipeline.hpp"
#include "gazeseg/detect.hpp"
#include "gazeseg/signal.hpp"

#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>

namespace gazeseg::pipeline {

namespace fs = std::filesystem;

namespace {

// Re-throws the active gazeseg error with demo and stage context.
[[noreturn]] void rethrow_with_context(const std::string& id, std::string_view stage) {
    const std::string prefix = "demo '" + id + "' [" + std::string(stage) + "]: ";
    try {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const IoError& e) {
        throw IoError(prefix + e.what());
    } catch (const Error& e) {
        throw ValidationError(prefix + e.what());
    }
}

} // namespace

Dataset load_dataset(const io::Manifest& manifest) {
    Dataset ds;
    ds.task = manifest.task;
    ds.demos.reserve(manifest.demos.size());
    for (const auto& e : manifest.demos) {
        std::string_view stage = "gaze";
        try {
            Demo d{e.id, io::read_gaze_csv(manifest.resolve(e.gaze)), std::nullopt, {}, {}, std::nullopt};
            if (e.features) {
                stage = "features";
                d.features = features::ingest_embeddings(manifest.resolve(*e.features));
                require_aligned(d.gaze, *d.features);
            }
            if (e.frames_left && e.frames_right) {
                stage = "frames";
                d.frames_left = features::read_frames(manifest.resolve(*e.frames_left), "left", d.gaze.size());
                d.frames_right = features::read_frames(manifest.resolve(*e.frames_right), "right", d.gaze.size());
            }
            if (e.ground_truth) {
                stage = "ground truth";
                auto truths = io::read_ground_truth_json(manifest.resolve(*e.ground_truth));
                if (truths.size() != 1) throw ValidationError("expected exactly one ground truth object");
                d.truth = std::move(truths.front());
            }
            ds.demos.push_back(std::move(d));
        } catch (const Error&) {
            rethrow_with_context(e.id, stage);
        }
    }
    return ds;
}

Dataset load_dataset(const fs::path& manifest_path) {
    return load_dataset(io::read_manifest(manifest_path));
}

ChangeScores demo_scores(const Demo& demo, const DetectionConfig& config) {
    std::string_view stage = "filter";
    try {
        const GazeSeries filtered = median_filter(demo.gaze, config.window_w);
        if (config.mode == DetectionMode::pos_only) return compute_scores(filtered, nullptr);

        stage = "features";
        if (demo.features) return compute_scores(filtered, &*demo.features);
        if (demo.has_frames()) {
            const auto& first = demo.frames_left.front();
            const features::PatchSpec spec{config.patch_b, static_cast<int>(first.cols()),
                                           static_cast<int>(first.rows())};
            const features::HistogramExtractor extractor;
            const FeatureSeries f =
                features::extract_series(demo.frames_left, demo.frames_right, filtered, spec, extractor);
            return compute_scores(filtered, &f);
        }
        throw ConfigError("mode '" + std::string(to_string(config.mode)) +
                          "' needs features or frames in the manifest; use --mode pos-only for gaze-only data");
    } catch (const Error&) {
        rethrow_with_context(demo.id, stage);
    }
}

std::vector<ChangeScores> dataset_scores(const Dataset& dataset, const DetectionConfig& config, int jobs) {
    config.validate();
    std::vector<std::optional<ChangeScores>> slots(dataset.demos.size());
    detail::parallel_for(dataset.demos.size(), jobs,
                         [&](std::size_t i) { slots[i] = demo_scores(dataset.demos[i], config); });
    std::vector<ChangeScores> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

namespace {

RefinementReport segment_from_scores(const Dataset& dataset, const std::vector<ChangeScores>& scores,
                                     const DetectionConfig& config, int jobs) {
    RefinementReport report = segment_scores(scores, config, jobs);
    for (std::size_t i = 0; i < dataset.demos.size(); ++i) report.per_demo[i].id = dataset.demos[i].id;
    return report;
}

} // namespace

RefinementReport segment_dataset(const Dataset& dataset, const DetectionConfig& config, int jobs) {
    if (dataset.demos.empty()) throw ValidationError("dataset has no demonstrations");
    return segment_from_scores(dataset, dataset_scores(dataset, config, jobs), config, jobs);
}

// ---------------------------------------------------------------------------

EvalMetrics evaluate(const RefinementReport& report, const std::vector<io::GroundTruth>& truths,
                     Index tolerance_steps) {
    if (tolerance_steps < 0) throw ConfigError("tolerance must be >= 0");
    std::map<std::string, const io::GroundTruth*> by_id;
    for (const auto& t : truths) by_id[t.demo_id] = &t;

    EvalMetrics m;
    double error_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& d : report.per_demo) {
        const auto it = by_id.find(d.id);
        if (it == by_id.end()) throw ValidationError("no ground truth for demo '" + d.id + "'");
        const auto& truth = it->second->boundaries;
        const auto& pts = d.points.points();

        DemoEval e{d.id, false, d.status, pts.size(), truth.size(), -1};
        if (pts.size() == truth.size()) {
            e.max_error = 0;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const Index err = std::abs(pts[k] - truth[k]);
                e.max_error = std::max(e.max_error, err);
                error_sum += static_cast<double>(err);
                ++pairs;
            }
            m.boundary_error_max = std::max(m.boundary_error_max, e.max_error);
        }
        e.correct = d.status == Status::ok && e.max_error >= 0 && e.max_error <= tolerance_steps;
        ++m.n_demos;
        ++(e.correct ? m.majority : m.minority);
        if (d.status == Status::excluded) ++m.excluded;
        m.demos.push_back(std::move(e));
    }
    m.boundary_error_mean = pairs > 0 ? error_sum / static_cast<double>(pairs) : 0.0;
    return m;
}

std::string format_metrics_json(const EvalMetrics& metrics) {
    nlohmann::ordered_json demos = nlohmann::ordered_json::array();
    for (const auto& d : metrics.demos) {
        nlohmann::ordered_json j;
        j["id"] = d.id;
        j["correct"] = d.correct;
        j["status"] = std::string(to_string(d.status));
        j["count_detected"] = d.detected;
        j["count_truth"] = d.truth;
        j["max_error"] = d.max_error;
        demos.push_back(std::move(j));
    }
    nlohmann::ordered_json j;
    j["n_demos"] = metrics.n_demos;
    j["majority"] = metrics.majority;
    j["minority"] = metrics.minority;
    j["excluded"] = metrics.excluded;
    j["boundary_error_mean"] = metrics.boundary_error_mean;
    j["boundary_error_max"] = metrics.boundary_error_max;
    j["demos"] = std::move(demos);
    return j.dump(2) + "\n";
}

std::vector<io::GroundTruth> dataset_truths(const Dataset& dataset) {
    std::vector<io::GroundTruth> out;
    for (const auto& d : dataset.demos) {
        if (!d.truth) throw ValidationError("demo '" + d.id + "' has no ground truth");
        out.push_back(*d.truth);
    }
    return out;
}

// ---------------------------------------------------------------------------

SweepGrid default_sweep_grid() {
    return {{5, 10, 15, 20, 25, 30}, {25, 50, 75, 100, 125, 150}, {true, false}};
}

std::vector<SweepRow> sweep(const Dataset& dataset, const SweepGrid& grid, const DetectionConfig& base,
                            Index tolerance_steps, int jobs) {
    if (grid.windows.empty() || grid.theta_pos.empty() || grid.refine.empty()) {
        throw ConfigError("sweep grid must be non-empty on every axis");
    }
    const auto truths = dataset_truths(dataset);

    // Scores depend only on w, so compute them once per window.
    std::vector<std::optional<std::vector<ChangeScores>>> scores_by_w(grid.windows.size());
    for (std::size_t i = 0; i < grid.windows.size(); ++i) {
        DetectionConfig cfg = base;
        cfg.window_w = grid.windows[i];
        try {
            scores_by_w[i] = dataset_scores(dataset, cfg, jobs);
        } catch (const Error& e) {
            std::fprintf(stderr, "sweep: w=%d failed: %s\n", cfg.window_w, e.what());
        }
    }

    std::vector<SweepRow> rows;
    for (bool refine : grid.refine) {
        for (std::size_t i = 0; i < grid.windows.size(); ++i) {
            for (double theta : grid.theta_pos) {
                SweepRow row{grid.windows[i], theta, refine, -1, -1};
                DetectionConfig cfg = base;
                cfg.window_w = grid.windows[i];
                cfg.theta_pos = theta;
                cfg.refine = refine;
                if (scores_by_w[i]) {
                    try {
                        const auto report = segment_from_scores(dataset, *scores_by_w[i], cfg, jobs);
                        const auto metrics = evaluate(report, truths, tolerance_steps);
                        row.n_correct = static_cast<long>(metrics.majority);
                        row.n_excluded = static_cast<long>(metrics.excluded);
                    } catch (const Error& e) {
                        std::fprintf(stderr, "sweep: w=%d theta_pos=%g failed: %s\n", cfg.window_w, theta, e.what());
                    }
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "w,theta_pos,refine,n_correct,n_excluded\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%ld,%ld\n", r.window_w, r.theta_pos, r.refine ? 1 : 0,
                      r.n_correct, r.n_excluded);
        out += buf;
    }
    return out;
}

} // namespace gazeseg::pipeline
