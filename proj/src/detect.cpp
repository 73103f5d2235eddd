#include "gazeseg/detect.hpp"

namespace gazeseg {

std::vector<Index> strict_exceedance_set(const ChangeScores& scores, double theta_pos, double theta_feat,
                                         DetectionMode mode) {
    const bool use_pos = mode != DetectionMode::feat_only;
    const bool use_feat = mode != DetectionMode::pos_only;
    const auto& pos = scores.pos();
    const auto& feat = scores.feat();
    std::vector<Index> out;
    for (Index t = 1; t < scores.size(); ++t) {
        if (use_pos && !(pos[t] > theta_pos)) continue;
        if (use_feat && !(feat[t] > theta_feat)) continue;
        out.push_back(t);
    }
    return out;
}

ChangePointSet detect(const ChangeScores& scores, double theta_pos, double theta_feat, DetectionMode mode) {
    const auto candidates = strict_exceedance_set(scores, theta_pos, theta_feat, mode);
    std::vector<Index> points;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i == 0 || candidates[i] != candidates[i - 1] + 1) points.push_back(candidates[i]);
    }
    return ChangePointSet(std::move(points), scores.last_step());
}

} // namespace gazeseg
