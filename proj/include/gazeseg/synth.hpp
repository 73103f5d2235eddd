#pragma once

#include "gazeseg/core.hpp"
#include "gazeseg/features.hpp"
#include "gazeseg/io.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gazeseg::synth {

/// Inclusive 8-bit intensity range used to texture a landmark.
struct IntensityBand {
    int lo = 0;
    int hi = 255;
};

struct Landmark {
    /// Per-eye pixel position (left_x, left_y, right_x, right_y) when the
    /// landmark is first fixated.
    Eigen::Vector4d position = Eigen::Vector4d::Zero();
    int dwell_steps = 50;
    Eigen::Vector4d drift_per_step = Eigen::Vector4d::Zero();
    IntensityBand band;
};

struct SynthSpec {
    std::vector<Landmark> landmarks;
    /// Std of the isotropic per-component gaze noise, in pixels.
    double noise_sigma = 5.0;
    /// Per-step probability of starting a 1-3 step glance away.
    double glance_rate = 0.0;
    /// Minimum fixation steps between the end of one glance and the next.
    int glance_refractory = 10;
    /// Glances start and end at least this many steps inside a dwell.
    int glance_margin = 16;
    double glance_distance_min = 200.0;
    double glance_distance_max = 400.0;
    /// Dimension of directly synthesised feature vectors.
    int feature_bins = 64;
    /// Std of the per-component perturbation added to synthesised features.
    double feature_jitter = 0.01;
    double rate_hz = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
    Index total_steps() const;
};

struct SynthDemo {
    GazeSeries gaze;
    /// Unit feature vectors following the fixated landmark of each step.
    FeatureSeries features;
    /// First step of every landmark after the first.
    std::vector<Index> boundaries;
    /// Fixated landmark per step (glances excluded).
    std::vector<int> landmark_of_step;
};

SynthDemo generate_demo(const SynthSpec& spec);

/// Landmark position at step t, including drift during its dwell.
Eigen::Vector4d landmark_position(const SynthSpec& spec, std::size_t landmark, Index t);

/// Unit histogram-like vector for a band: the histogram of a patch whose
/// intensities are spread uniformly over the band.
Eigen::VectorXd band_feature(const IntensityBand& band, int bins);

struct RenderSpec {
    int image_w = 640;
    int image_h = 480;
    /// Side of the textured square drawn around each landmark.
    int region_side = 192;
};

struct RenderedFrames {
    std::vector<features::Image> left;
    std::vector<features::Image> right;
};

/// One grayscale frame per step and eye. Each landmark is a textured square
/// with intensities drawn from its band; the background is 0.
RenderedFrames render_frames(const SynthSpec& spec, const RenderSpec& render);

// ---------------------------------------------------------------------------
// Task presets

struct TaskShape {
    int landmarks = 4;
    int dwell_min = 50;
    int dwell_max = 70;
    /// Per-eye jump distance between consecutive landmarks, in pixels.
    double jump_min_px = 150.0;
    double jump_max_px = 200.0;
    /// Dwell steps kept free of glances at both ends.
    int glance_margin = 16;
    double noise_sigma = 5.0;
    double glance_rate = 0.02;
    /// Horizontal offset of the right-eye position from the left.
    double disparity_px = 10.0;
    Eigen::Vector2d origin{520.0, 260.0};
    /// Landmarks stay inside [margin, view - margin] in both axes.
    Eigen::Vector2d view{1280.0, 720.0};
    double view_margin = 100.0;
};

/// Random landmark layout drawn from `shape` with the given seed.
SynthSpec make_task_spec(const TaskShape& shape, std::uint64_t seed);

/// Per-eye jump that yields a position-score spike of `spike` when both eyes
/// move together.
inline double jump_for_spike(double spike) { return spike / std::sqrt(2.0); }

/// Per-eye jump whose median-filtered position-score peak has median
/// `target_spike` under gaze noise `noise_sigma` and window `window_w`.
/// Noise erodes and smears filtered jumps, so this exceeds
/// jump_for_spike(target_spike) whenever noise_sigma > 0. Deterministic:
/// bisection over a fixed set of `trials` simulated transitions.
double calibrate_jump(double target_spike, double noise_sigma, int window_w, int trials = 128,
                      std::uint64_t seed = 0);

/// `n` task specs from `shape`, seeded derive_seed(seed, i). The last
/// `attenuated` demos use a fixed jump whose filtered position spike is
/// `attenuation * theta_pos` at window `window_w`.
std::vector<SynthSpec> benchmark_specs(const TaskShape& shape, int n, int attenuated, double attenuation,
                                       double theta_pos, int window_w, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Datasets on disk

enum class FeatureOutput { none, gzft, frames };

struct DatasetOptions {
    std::string task = "synthetic";
    FeatureOutput features = FeatureOutput::gzft;
    RenderSpec render;
};

/// Stable per-demo seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Writes `n_per_spec` demos per spec under `out_dir` (demo_NNNN/ with
/// gaze.csv, truth.json and features) plus manifest.json; returns the
/// manifest path.
std::filesystem::path generate_dataset(const std::vector<SynthSpec>& specs, int n_per_spec,
                                       const std::filesystem::path& out_dir,
                                       const DatasetOptions& options = {});

} // namespace gazeseg::synth
