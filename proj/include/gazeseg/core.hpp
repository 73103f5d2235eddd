#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gazeseg {

using Index = Eigen::Index;

/// Row-major (T+1) x 4 matrix; columns are left_x, left_y, right_x, right_y.
template <typename Scalar>
using GazeMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 4, Eigen::RowMajor>;

template <typename Scalar>
using ScoreVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a type invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A hyperparameter or option is out of range.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Text input failed to parse; `line()` is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), message_(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }
    /// Message without the line suffix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t line_;
};

/// Binary input is malformed at `offset()` bytes into the file.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Gaze

using GazeSample = Eigen::Vector4d;

class GazeSeries {
public:
    /// Throws ValidationError if fewer than two samples or any value is non-finite.
    explicit GazeSeries(GazeMatrix<double> samples, double rate_hz = 10.0);

    Index size() const noexcept { return samples_.rows(); }
    /// Last time step T.
    Index last_step() const noexcept { return samples_.rows() - 1; }
    double rate_hz() const noexcept { return rate_hz_; }

    GazeSample sample(Index t) const { return samples_.row(t).transpose(); }
    Eigen::Vector2d left(Index t) const { return samples_.row(t).head<2>().transpose(); }
    Eigen::Vector2d right(Index t) const { return samples_.row(t).tail<2>().transpose(); }
    const GazeMatrix<double>& matrix() const noexcept { return samples_; }

    bool operator==(const GazeSeries& other) const {
        return rate_hz_ == other.rate_hz_ && samples_ == other.samples_;
    }

private:
    GazeMatrix<double> samples_;
    double rate_hz_;
};

// ---------------------------------------------------------------------------
// Features

struct FeatureFrame {
    Eigen::VectorXd left;
    Eigen::VectorXd right;
};

/// Per-step left/right feature vectors, stored as two (T+1) x D matrices.
class FeatureSeries {
public:
    FeatureSeries(Eigen::MatrixXd left, Eigen::MatrixXd right);
    explicit FeatureSeries(const std::vector<FeatureFrame>& frames);

    Index size() const noexcept { return left_.rows(); }
    Index dim() const noexcept { return left_.cols(); }
    FeatureFrame frame(Index t) const { return {left_.row(t).transpose(), right_.row(t).transpose()}; }
    const Eigen::MatrixXd& left() const noexcept { return left_; }
    const Eigen::MatrixXd& right() const noexcept { return right_; }

    /// True when every vector has unit L2 norm within `tol`.
    bool is_normalized(double tol = 1e-6) const;

private:
    Eigen::MatrixXd left_;
    Eigen::MatrixXd right_;
};

/// Throws ValidationError unless the series pair step-for-step.
void require_aligned(const GazeSeries& gaze, const FeatureSeries& features);

// ---------------------------------------------------------------------------
// Scores and change points

class ChangeScores {
public:
    /// Both series must have equal length >= 2, zero at index 0, and
    /// finite values; `pos` must be non-negative.
    ChangeScores(Eigen::VectorXd pos, Eigen::VectorXd feat);

    Index size() const noexcept { return pos_.size(); }
    Index last_step() const noexcept { return pos_.size() - 1; }
    const Eigen::VectorXd& pos() const noexcept { return pos_; }
    const Eigen::VectorXd& feat() const noexcept { return feat_; }

private:
    Eigen::VectorXd pos_;
    Eigen::VectorXd feat_;
};

class ChangePointSet {
public:
    ChangePointSet() = default;
    /// Points must be strictly increasing and lie in [1, last_step].
    ChangePointSet(std::vector<Index> points, Index last_step, bool refined = false);

    const std::vector<Index>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    Index last_step() const noexcept { return last_step_; }
    bool refined() const noexcept { return refined_; }

    ChangePointSet as_refined() const { return ChangePointSet(points_, last_step_, true); }

    bool operator==(const ChangePointSet&) const = default;

private:
    std::vector<Index> points_;
    Index last_step_ = 0;
    bool refined_ = false;
};

enum class Status { ok, excluded };

std::string_view to_string(Status status);
Status parse_status(std::string_view text);

/// Half-open step range [begin, end).
struct Segment {
    Index begin;
    Index end;
    bool operator==(const Segment&) const = default;
};

class Segmentation {
public:
    explicit Segmentation(ChangePointSet boundaries, Status status = Status::ok);

    const ChangePointSet& boundaries() const noexcept { return boundaries_; }
    Status status() const noexcept { return status_; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }
    /// Index of the segment containing step t.
    std::size_t segment_of(Index t) const;

private:
    ChangePointSet boundaries_;
    Status status_;
    std::vector<Segment> segments_;
};

/// Pure function of boundaries and horizon: partitions [0, last_step + 1).
std::vector<Segment> derive_segments(const ChangePointSet& boundaries);

// ---------------------------------------------------------------------------
// Configuration

enum class DetectionMode { pos_only, feat_only, both };

std::string_view to_string(DetectionMode mode);
/// Accepts "both", "pos-only"/"pos_only", "feat-only"/"feat_only".
DetectionMode parse_mode(std::string_view text);

struct DetectionConfig {
    int window_w = 20;
    int patch_b = 256;
    double theta_pos = 50.0;
    double theta_feat = 0.03;
    DetectionMode mode = DetectionMode::both;
    bool refine = true;
    double scale_down = 0.99;
    double scale_up = 1.01;
    int max_iters = 500;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

} // namespace gazeseg
