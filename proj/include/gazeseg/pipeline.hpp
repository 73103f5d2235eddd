#pragma once

#include "gazeseg/core.hpp"
#include "gazeseg/features.hpp"
#include "gazeseg/io.hpp"
#include "gazeseg/refine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gazeseg::pipeline {

struct Demo {
    std::string id;
    GazeSeries gaze;
    /// Precomputed, normalised embeddings.
    std::optional<FeatureSeries> features;
    std::vector<features::Image> frames_left;
    std::vector<features::Image> frames_right;
    std::optional<io::GroundTruth> truth;

    bool has_frames() const { return !frames_left.empty(); }
    bool has_feature_source() const { return features.has_value() || has_frames(); }
};

struct Dataset {
    std::string task;
    std::vector<Demo> demos;
};

/// Loads every demo listed in the manifest. Errors name the demo id.
Dataset load_dataset(const io::Manifest& manifest);
Dataset load_dataset(const std::filesystem::path& manifest_path);

/// Filter, optional feature extraction and scoring for one demo. Feature
/// modes require embeddings or frames; pos-only skips features entirely.
ChangeScores demo_scores(const Demo& demo, const DetectionConfig& config);

std::vector<ChangeScores> dataset_scores(const Dataset& dataset, const DetectionConfig& config, int jobs = 1);

/// Scores, detects and (if enabled) refines; demo ids come from the dataset.
RefinementReport segment_dataset(const Dataset& dataset, const DetectionConfig& config, int jobs = 1);

// ---------------------------------------------------------------------------
// Evaluation against ground truth

struct DemoEval {
    std::string id;
    bool correct = false;
    Status status = Status::ok;
    std::size_t detected = 0;
    std::size_t truth = 0;
    /// Largest |detected - truth| over matched boundaries; -1 when the counts differ.
    Index max_error = -1;
};

struct EvalMetrics {
    std::size_t n_demos = 0;
    std::size_t majority = 0;
    std::size_t minority = 0;
    std::size_t excluded = 0;
    /// Over all in-order matched boundary pairs of count-matching demos.
    double boundary_error_mean = 0.0;
    Index boundary_error_max = 0;
    std::vector<DemoEval> demos;
};

/// A demo is correct when it is not excluded, has as many change points as
/// boundaries in its ground truth, and the i-th point lies within
/// `tolerance_steps` of the i-th boundary. Every report id must have a
/// ground truth entry.
EvalMetrics evaluate(const RefinementReport& report, const std::vector<io::GroundTruth>& truths,
                     Index tolerance_steps);

std::string format_metrics_json(const EvalMetrics& metrics);

/// Ground truths attached to the dataset's demos.
std::vector<io::GroundTruth> dataset_truths(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Hyperparameter sweep

struct SweepRow {
    int window_w = 0;
    double theta_pos = 0.0;
    bool refine = false;
    /// -1 when the cell failed.
    long n_correct = 0;
    long n_excluded = 0;
};

struct SweepGrid {
    std::vector<int> windows;
    std::vector<double> theta_pos;
    std::vector<bool> refine;
};

/// Default grid: w in {5, ..., 30}, theta_pos in {25, ..., 150}, refine on and off.
SweepGrid default_sweep_grid();

/// One row per (refine, w, theta_pos) cell in that nesting order. Every
/// other setting comes from `base`. A cell that throws records -1.
std::vector<SweepRow> sweep(const Dataset& dataset, const SweepGrid& grid, const DetectionConfig& base,
                            Index tolerance_steps, int jobs = 1);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

} // namespace gazeseg::pipeline
