#pragma once

#include "gazeseg/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace gazeseg {

/// Lower clamp applied to the `<f_{t-1}, f_t> + 1` argument of the feature score log.
inline constexpr double kFeatureLogFloor = 1e-9;

/// Column-wise running median. Output row t is the median of input rows
/// [t - w/2, t + w/2] clipped to the series; even-sized (edge) windows take
/// the mean of the two middle values.
template <typename Derived>
typename Derived::PlainObject median_filter(const Eigen::MatrixBase<Derived>& input, int window_w) {
    using Scalar = typename Derived::Scalar;
    if (window_w < 2) throw ConfigError("median window must be >= 2, got " + std::to_string(window_w));
    const Index rows = input.rows();
    const Index half = window_w / 2;
    typename Derived::PlainObject out(rows, input.cols());
    std::vector<Scalar> buf;
    buf.reserve(static_cast<std::size_t>(2 * half + 1));
    for (Index c = 0; c < input.cols(); ++c) {
        for (Index t = 0; t < rows; ++t) {
            const Index lo = std::max<Index>(0, t - half);
            const Index hi = std::min<Index>(rows - 1, t + half);
            buf.clear();
            for (Index k = lo; k <= hi; ++k) buf.push_back(input(k, c));
            const auto n = buf.size();
            const auto mid = buf.begin() + static_cast<std::ptrdiff_t>(n / 2);
            std::nth_element(buf.begin(), mid, buf.end());
            Scalar m = *mid;
            if (n % 2 == 0) {
                const Scalar lower = *std::max_element(buf.begin(), mid);
                m = (lower + m) / Scalar(2);
            }
            out(t, c) = m;
        }
    }
    return out;
}

/// s_pos[t] = ||x_t - x_{t-1}||_2 over each row; s_pos[0] = 0.
template <typename Derived>
ScoreVector<typename Derived::Scalar> position_scores(const Eigen::MatrixBase<Derived>& filtered) {
    using Scalar = typename Derived::Scalar;
    const Index rows = filtered.rows();
    ScoreVector<Scalar> out = ScoreVector<Scalar>::Zero(rows);
    for (Index t = 1; t < rows; ++t) out[t] = (filtered.row(t) - filtered.row(t - 1)).norm();
    return out;
}

/// Feature change score from row-wise unit vectors:
///   s[t] = -(log(<l_{t-1}, l_t> + 1) + log(<r_{t-1}, r_t> + 1)) / 2 + log 2.
/// Inner products of unit vectors are evaluated as 1 - ||a - b||^2 / 2, so
/// identical consecutive frames give exactly 0. They are capped at 1 and the
/// log argument is floored at kFeatureLogFloor; s[0] = 0.
template <typename DerivedL, typename DerivedR>
ScoreVector<typename DerivedL::Scalar> feature_scores(const Eigen::MatrixBase<DerivedL>& left,
                                                      const Eigen::MatrixBase<DerivedR>& right) {
    using Scalar = typename DerivedL::Scalar;
    using std::log;
    if (left.rows() != right.rows() || left.cols() != right.cols()) {
        throw ValidationError("left/right feature shapes differ");
    }
    const Scalar floor = Scalar(kFeatureLogFloor);
    const Scalar log2 = Scalar(std::numbers::ln2);
    const auto term = [&](Scalar inner) {
        return log(std::max(std::min(inner, Scalar(1)) + Scalar(1), floor));
    };
    const Index rows = left.rows();
    ScoreVector<Scalar> out = ScoreVector<Scalar>::Zero(rows);
    for (Index t = 1; t < rows; ++t) {
        const Scalar l = Scalar(1) - (left.row(t - 1) - left.row(t)).squaredNorm() / Scalar(2);
        const Scalar r = Scalar(1) - (right.row(t - 1) - right.row(t)).squaredNorm() / Scalar(2);
        out[t] = -(term(l) + term(r)) / Scalar(2) + log2;
    }
    return out;
}

// Domain-type entry points.

GazeSeries median_filter(const GazeSeries& gaze, int window_w);

Eigen::VectorXd score_pos(const GazeSeries& filtered);

/// Throws ValidationError naming the step and eye of any zero-norm vector.
FeatureSeries normalize_features(const FeatureSeries& features, std::string_view demo_id = {});

/// Expects unit-normalized input.
Eigen::VectorXd score_feat(const FeatureSeries& features);

/// Both score series from already-filtered gaze. Without features the
/// feature score is all zeros. Features are normalized before scoring.
ChangeScores compute_scores(const GazeSeries& filtered, const FeatureSeries* features);

} // namespace gazeseg
