#pragma once

#include "gazeseg/core.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gazeseg {

struct DemoRefinement {
    std::string id;
    ChangePointSet points;
    double theta_pos = 0.0;
    double theta_feat = 0.0;
    int iterations = 0;
    Status status = Status::ok;
};

struct RefinementReport {
    /// Modal change-point count under the default thresholds.
    std::size_t s = 0;
    std::vector<DemoRefinement> per_demo;
    /// Change-point count -> number of demos, before refinement.
    std::map<std::size_t, std::size_t> counts_histogram;

    std::size_t excluded_count() const;
};

/// Most frequent count; ties go to the smaller count.
std::size_t modal_count(std::span<const std::size_t> counts);
std::size_t modal_count(std::span<const ChangePointSet> raw);

/// Per-demo threshold scaling toward exactly `s` change points: first lower
/// both thresholds while the count is below `s`, then raise them while it is
/// above. Each loop runs at most `config.max_iters` times. A demo that does
/// not land on `s` is reported as excluded with its last detection.
DemoRefinement refine_demo(const ChangeScores& scores, std::size_t s, const DetectionConfig& config);

/// Detects every demo at the configured thresholds, fixes `s` as the modal
/// count, then refines each demo independently from the defaults.
/// `jobs` > 1 refines demos concurrently; report order follows input order.
RefinementReport refine_dataset(std::span<const ChangeScores> demos, const DetectionConfig& config,
                                int jobs = 1);

/// Same report shape without threshold adjustment: every demo is `ok` with
/// its raw detection.
RefinementReport detect_dataset(std::span<const ChangeScores> demos, const DetectionConfig& config);

/// Dispatches on `config.refine`.
RefinementReport segment_scores(std::span<const ChangeScores> demos, const DetectionConfig& config,
                                int jobs = 1);

} // namespace gazeseg
