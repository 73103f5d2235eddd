#pragma once

#include "gazeseg/core.hpp"
#include "gazeseg/refine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gazeseg::io {

// Gaze CSV: header `t,left_x,left_y,right_x,right_y`, t = 0, 1, 2, ... with
// no gaps, values written with 17 significant digits.
GazeSeries read_gaze_csv(const std::filesystem::path& path, double rate_hz = 10.0);
GazeSeries parse_gaze_csv(std::string_view text, double rate_hz = 10.0);
std::string format_gaze_csv(const GazeSeries& gaze);
void write_gaze_csv(const std::filesystem::path& path, const GazeSeries& gaze);

struct GroundTruth {
    std::string demo_id;
    std::vector<Index> boundaries;
};

void write_ground_truth_json(const std::filesystem::path& path, const GroundTruth& truth);
/// Accepts a single `{"demo_id", "boundaries"}` object or an array of them.
std::vector<GroundTruth> read_ground_truth_json(const std::filesystem::path& path);

struct ManifestEntry {
    std::string id;
    std::filesystem::path gaze;
    std::optional<std::filesystem::path> features;
    std::optional<std::filesystem::path> frames_left;
    std::optional<std::filesystem::path> frames_right;
    std::optional<std::filesystem::path> ground_truth;

    bool has_features() const { return features.has_value() || (frames_left && frames_right); }
};

struct Manifest {
    std::string task;
    /// Directory relative entry paths are resolved against.
    std::filesystem::path base_dir;
    std::vector<ManifestEntry> demos;

    std::filesystem::path resolve(const std::filesystem::path& p) const {
        return p.is_absolute() ? p : base_dir / p;
    }
};

/// Strict schema: unknown keys, duplicate ids and missing required fields
/// are rejected. Paths are stored as written; use Manifest::resolve.
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// `{"task", "s", "demos": [{"id", "status", "change_points",
/// "theta_pos_final", "theta_feat_final", "iterations"}]}`, keys in that
/// order, newline-terminated.
std::string format_segmentation_json(const std::string& task, const RefinementReport& report);
void write_segmentation_json(const std::filesystem::path& path, const std::string& task,
                             const RefinementReport& report);

struct SegmentationFile {
    std::string task;
    RefinementReport report;
};

/// Change-point horizons are not stored, so reloaded sets carry the largest
/// point as their last step. The pre-refinement histogram is not stored
/// either and comes back empty.
SegmentationFile read_segmentation_json(const std::filesystem::path& path);

} // namespace gazeseg::io
