#pragma once

#include "gazeseg/core.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gazeseg::features {

/// 8-bit grayscale image; rows are image y, columns image x.
using Image = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PatchSpec {
    int patch_b = 256;
    int image_w = 1280;
    int image_h = 720;

    /// 0 < patch_b <= 2 * min(image_w, image_h).
    void validate() const;
};

/// Maps an image patch to a fixed-dimension feature vector. Implementations
/// must be deterministic.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    virtual Eigen::VectorXd extract(const Image& patch) const = 0;
    virtual Index dim() const = 0;
};

/// b x b window centred on the rounded `center` (x, y); top-left corner is
/// round(center) - b/2. Out-of-image pixels are zero.
Image crop_patch(const Image& image, const Eigen::Vector2d& center, const PatchSpec& spec);

/// L2-normalised intensity histogram with `bins` equal-width bins over [0, 255].
Eigen::VectorXd histogram_extractor(const Image& patch, int bins = 64);

class HistogramExtractor final : public FeatureExtractor {
public:
    explicit HistogramExtractor(int bins = 64);
    Eigen::VectorXd extract(const Image& patch) const override { return histogram_extractor(patch, bins_); }
    Index dim() const override { return bins_; }

private:
    int bins_;
};

/// Extracts per-step features at the filtered gaze position of each eye and
/// normalises them.
FeatureSeries extract_series(std::span<const Image> images_left, std::span<const Image> images_right,
                             const GazeSeries& filtered, const PatchSpec& spec,
                             const FeatureExtractor& extractor);

// ---------------------------------------------------------------------------
// Image files

/// Reads binary P5 (gray) or P6 (RGB, converted to luma) with maxval 255.
Image read_pnm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& image);

/// `frame_{eye}_{t:06}.pgm`, falling back to `.ppm` when reading.
std::string frame_filename(std::string_view eye, Index t, std::string_view ext = "pgm");
std::vector<Image> read_frames(const std::filesystem::path& dir, std::string_view eye, Index count);

// ---------------------------------------------------------------------------
// GZFT embedding container

inline constexpr std::uint32_t kGzftVersion = 1;

void write_gzft(const std::filesystem::path& path, const FeatureSeries& features);

/// Reads a GZFT file without normalising.
FeatureSeries read_gzft(const std::filesystem::path& path);

/// Reads a GZFT file and normalises every vector.
FeatureSeries ingest_embeddings(const std::filesystem::path& path);

} // namespace gazeseg::features
