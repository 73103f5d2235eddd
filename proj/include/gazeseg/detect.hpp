#pragma once

#include "gazeseg/core.hpp"

#include <vector>

namespace gazeseg {

/// Steps t >= 1 whose scores strictly exceed the thresholds active in `mode`.
std::vector<Index> strict_exceedance_set(const ChangeScores& scores, double theta_pos, double theta_feat,
                                         DetectionMode mode);

/// Exceedance set with each maximal run of consecutive steps collapsed to
/// its first step.
ChangePointSet detect(const ChangeScores& scores, double theta_pos, double theta_feat, DetectionMode mode);

inline ChangePointSet detect(const ChangeScores& scores, const DetectionConfig& config) {
    return detect(scores, config.theta_pos, config.theta_feat, config.mode);
}

} // namespace gazeseg
