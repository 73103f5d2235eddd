#include "gazeseg/signal.hpp"

namespace gazeseg {

GazeSeries median_filter(const GazeSeries& gaze, int window_w) {
    return GazeSeries(median_filter(gaze.matrix(), window_w), gaze.rate_hz());
}

Eigen::VectorXd score_pos(const GazeSeries& filtered) {
    return position_scores(filtered.matrix());
}

FeatureSeries normalize_features(const FeatureSeries& features, std::string_view demo_id) {
    Eigen::MatrixXd left = features.left();
    Eigen::MatrixXd right = features.right();
    const auto normalize_rows = [&](Eigen::MatrixXd& m, const char* eye) {
        for (Index t = 0; t < m.rows(); ++t) {
            const double n = m.row(t).norm();
            if (!(n > 0.0)) {
                std::string where = demo_id.empty() ? std::string() : "demo " + std::string(demo_id) + ", ";
                throw ValidationError("zero-norm " + std::string(eye) + " feature vector (" + where +
                                      "step " + std::to_string(t) + ")");
            }
            m.row(t) /= n;
        }
    };
    normalize_rows(left, "left");
    normalize_rows(right, "right");
    return FeatureSeries(std::move(left), std::move(right));
}

Eigen::VectorXd score_feat(const FeatureSeries& features) {
    return feature_scores(features.left(), features.right());
}

ChangeScores compute_scores(const GazeSeries& filtered, const FeatureSeries* features) {
    Eigen::VectorXd pos = score_pos(filtered);
    if (features == nullptr) {
        return ChangeScores(std::move(pos), Eigen::VectorXd::Zero(filtered.size()));
    }
    require_aligned(filtered, *features);
    return ChangeScores(std::move(pos), score_feat(normalize_features(*features)));
}

} // namespace gazeseg
