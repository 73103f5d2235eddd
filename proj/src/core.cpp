#include "gazeseg/core.hpp"

#include <algorithm>
#include <cmath>

namespace gazeseg {

GazeSeries::GazeSeries(GazeMatrix<double> samples, double rate_hz)
    : samples_(std::move(samples)), rate_hz_(rate_hz) {
    if (samples_.rows() < 2) {
        throw ValidationError("gaze series needs at least 2 samples, got " +
                              std::to_string(samples_.rows()));
    }
    if (!samples_.allFinite()) {
        for (Index t = 0; t < samples_.rows(); ++t) {
            if (!samples_.row(t).allFinite()) {
                throw ValidationError("non-finite gaze sample at step " + std::to_string(t));
            }
        }
    }
    if (!(rate_hz_ > 0.0) || !std::isfinite(rate_hz_)) {
        throw ValidationError("gaze sampling rate must be positive");
    }
}

FeatureSeries::FeatureSeries(Eigen::MatrixXd left, Eigen::MatrixXd right)
    : left_(std::move(left)), right_(std::move(right)) {
    if (left_.cols() < 1) throw ValidationError("feature dimension must be >= 1");
    if (left_.rows() != right_.rows() || left_.cols() != right_.cols()) {
        throw ValidationError("left/right feature shapes differ: " +
                              std::to_string(left_.rows()) + "x" + std::to_string(left_.cols()) +
                              " vs " + std::to_string(right_.rows()) + "x" +
                              std::to_string(right_.cols()));
    }
    if (!left_.allFinite() || !right_.allFinite()) {
        throw ValidationError("non-finite feature value");
    }
}

namespace {

Eigen::MatrixXd stack(const std::vector<FeatureFrame>& frames, bool left) {
    if (frames.empty()) return {};
    const Index dim = frames.front().left.size();
    Eigen::MatrixXd out(static_cast<Index>(frames.size()), dim);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const auto& v = left ? frames[t].left : frames[t].right;
        if (frames[t].left.size() != dim || frames[t].right.size() != dim) {
            throw ValidationError("feature dimension mismatch at step " + std::to_string(t));
        }
        out.row(static_cast<Index>(t)) = v.transpose();
    }
    return out;
}

} // namespace

FeatureSeries::FeatureSeries(const std::vector<FeatureFrame>& frames)
    : FeatureSeries(stack(frames, true), stack(frames, false)) {}

bool FeatureSeries::is_normalized(double tol) const {
    const auto near_one = [tol](const Eigen::MatrixXd& m) {
        return ((m.rowwise().norm().array() - 1.0).abs() <= tol).all();
    };
    return near_one(left_) && near_one(right_);
}

void require_aligned(const GazeSeries& gaze, const FeatureSeries& features) {
    if (gaze.size() != features.size()) {
        throw ValidationError("feature series has " + std::to_string(features.size()) +
                              " frames but gaze series has " + std::to_string(gaze.size()));
    }
}

ChangeScores::ChangeScores(Eigen::VectorXd pos, Eigen::VectorXd feat)
    : pos_(std::move(pos)), feat_(std::move(feat)) {
    if (pos_.size() < 2) throw ValidationError("score series needs at least 2 steps");
    if (pos_.size() != feat_.size()) {
        throw ValidationError("s_pos and s_feat lengths differ");
    }
    if (!pos_.allFinite() || !feat_.allFinite()) throw ValidationError("non-finite score");
    if (pos_[0] != 0.0 || feat_[0] != 0.0) throw ValidationError("scores at step 0 must be 0");
    if ((pos_.array() < 0.0).any()) throw ValidationError("negative position score");
}

ChangePointSet::ChangePointSet(std::vector<Index> points, Index last_step, bool refined)
    : points_(std::move(points)), last_step_(last_step), refined_(refined) {
    if (last_step_ < 0) throw ValidationError("negative horizon");
    Index previous = 0;
    for (Index p : points_) {
        if (p < 1 || p > last_step_) {
            throw ValidationError("change point " + std::to_string(p) + " outside [1, " +
                                  std::to_string(last_step_) + "]");
        }
        if (p <= previous) throw ValidationError("change points must be strictly increasing");
        previous = p;
    }
}

std::string_view to_string(Status status) {
    return status == Status::ok ? "ok" : "excluded";
}

Status parse_status(std::string_view text) {
    if (text == "ok") return Status::ok;
    if (text == "excluded") return Status::excluded;
    throw ValidationError("unknown status '" + std::string(text) + "'");
}

std::vector<Segment> derive_segments(const ChangePointSet& boundaries) {
    std::vector<Segment> out;
    out.reserve(boundaries.size() + 1);
    Index begin = 0;
    for (Index p : boundaries.points()) {
        out.push_back({begin, p});
        begin = p;
    }
    out.push_back({begin, boundaries.last_step() + 1});
    return out;
}

Segmentation::Segmentation(ChangePointSet boundaries, Status status)
    : boundaries_(std::move(boundaries)), status_(status), segments_(derive_segments(boundaries_)) {}

std::size_t Segmentation::segment_of(Index t) const {
    if (t < 0 || t > boundaries_.last_step()) throw ValidationError("step out of range");
    const auto& pts = boundaries_.points();
    return static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), t) - pts.begin());
}

std::string_view to_string(DetectionMode mode) {
    switch (mode) {
    case DetectionMode::pos_only: return "pos-only";
    case DetectionMode::feat_only: return "feat-only";
    case DetectionMode::both: return "both";
    }
    return "both";
}

DetectionMode parse_mode(std::string_view text) {
    if (text == "both") return DetectionMode::both;
    if (text == "pos-only" || text == "pos_only") return DetectionMode::pos_only;
    if (text == "feat-only" || text == "feat_only") return DetectionMode::feat_only;
    throw ConfigError("unknown detection mode '" + std::string(text) +
                      "' (expected both, pos-only or feat-only)");
}

void DetectionConfig::validate() const {
    if (window_w < 2) throw ConfigError("window_w must be >= 2, got " + std::to_string(window_w));
    if (patch_b < 1) throw ConfigError("patch_b must be positive");
    if (!(theta_pos > 0.0) || !std::isfinite(theta_pos)) throw ConfigError("theta_pos must be positive");
    if (!(theta_feat > 0.0) || !std::isfinite(theta_feat)) throw ConfigError("theta_feat must be positive");
    if (!(scale_down > 0.0 && scale_down < 1.0)) throw ConfigError("scale_down must lie in (0, 1)");
    if (!(scale_up > 1.0) || !std::isfinite(scale_up)) throw ConfigError("scale_up must be > 1");
    if (max_iters < 1) throw ConfigError("max_iters must be positive");
}

} // namespace gazeseg
