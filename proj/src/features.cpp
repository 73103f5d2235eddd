#include "gazeseg/features.hpp"
#include "gazeseg/signal.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace gazeseg::features {

namespace fs = std::filesystem;

void PatchSpec::validate() const {
    if (image_w < 1 || image_h < 1) throw ConfigError("image dimensions must be positive");
    if (patch_b < 1 || patch_b > 2 * std::min(image_w, image_h)) {
        throw ConfigError("patch_b must lie in [1, 2*min(image_w, image_h)], got " + std::to_string(patch_b));
    }
}

Image crop_patch(const Image& image, const Eigen::Vector2d& center, const PatchSpec& spec) {
    spec.validate();
    if (image.cols() != spec.image_w || image.rows() != spec.image_h) {
        throw ValidationError("image is " + std::to_string(image.cols()) + "x" + std::to_string(image.rows()) +
                              ", patch spec expects " + std::to_string(spec.image_w) + "x" +
                              std::to_string(spec.image_h));
    }
    if (!center.allFinite()) throw ValidationError("non-finite patch center");
    const Index b = spec.patch_b;
    const Index x0 = static_cast<Index>(std::lround(center.x())) - b / 2;
    const Index y0 = static_cast<Index>(std::lround(center.y())) - b / 2;

    Image patch = Image::Zero(b, b);
    const Index r_lo = std::max<Index>(0, y0), r_hi = std::min<Index>(image.rows(), y0 + b);
    const Index c_lo = std::max<Index>(0, x0), c_hi = std::min<Index>(image.cols(), x0 + b);
    if (r_lo < r_hi && c_lo < c_hi) {
        patch.block(r_lo - y0, c_lo - x0, r_hi - r_lo, c_hi - c_lo) =
            image.block(r_lo, c_lo, r_hi - r_lo, c_hi - c_lo);
    }
    return patch;
}

Eigen::VectorXd histogram_extractor(const Image& patch, int bins) {
    if (bins < 2) throw ConfigError("histogram needs at least 2 bins, got " + std::to_string(bins));
    if (patch.size() == 0) throw ValidationError("empty patch");
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(bins);
    for (Index i = 0; i < patch.size(); ++i) {
        hist[static_cast<Index>(patch.data()[i]) * bins / 256] += 1.0;
    }
    return hist / hist.norm();
}

HistogramExtractor::HistogramExtractor(int bins) : bins_(bins) {
    if (bins < 2) throw ConfigError("histogram needs at least 2 bins, got " + std::to_string(bins));
}

FeatureSeries extract_series(std::span<const Image> images_left, std::span<const Image> images_right,
                             const GazeSeries& filtered, const PatchSpec& spec,
                             const FeatureExtractor& extractor) {
    const auto n = static_cast<std::size_t>(filtered.size());
    if (images_left.size() != n || images_right.size() != n) {
        throw ValidationError("frame counts (" + std::to_string(images_left.size()) + ", " +
                              std::to_string(images_right.size()) + ") do not match gaze length " +
                              std::to_string(n));
    }
    const Index dim = extractor.dim();
    Eigen::MatrixXd left(filtered.size(), dim), right(filtered.size(), dim);
    for (Index t = 0; t < filtered.size(); ++t) {
        const auto ut = static_cast<std::size_t>(t);
        left.row(t) = extractor.extract(crop_patch(images_left[ut], filtered.left(t), spec)).transpose();
        right.row(t) = extractor.extract(crop_patch(images_right[ut], filtered.right(t), spec)).transpose();
    }
    return normalize_features(FeatureSeries(std::move(left), std::move(right)));
}

// ---------------------------------------------------------------------------
// PNM

namespace {

std::vector<char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(const std::vector<char>& buf, std::size_t& pos, const fs::path& path) {
    for (;;) {
        while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        if (pos < buf.size() && buf[pos] == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    std::string tok;
    while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) tok += buf[pos++];
    if (tok.empty()) throw FormatError("truncated PNM header in " + path.string(), pos);
    return tok;
}

int header_int(const std::vector<char>& buf, std::size_t& pos, const fs::path& path) {
    const std::size_t at = pos;
    const std::string tok = header_token(buf, pos, path);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw FormatError("bad PNM header value '" + tok + "' in " + path.string(), at);
    }
}

} // namespace

Image read_pnm(const fs::path& path) {
    const auto buf = slurp(path);
    std::size_t pos = 0;
    const std::string magic = header_token(buf, pos, path);
    if (magic != "P5" && magic != "P6") throw FormatError("unsupported PNM magic '" + magic + "'", 0);
    const int w = header_int(buf, pos, path);
    const int h = header_int(buf, pos, path);
    const int maxval = header_int(buf, pos, path);
    if (maxval != 255) throw FormatError("only 8-bit PNM supported", pos);
    ++pos; // single whitespace after maxval
    const std::size_t channels = magic == "P6" ? 3 : 1;
    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
    if (buf.size() < pos + need) {
        throw FormatError("PNM payload truncated: expected " + std::to_string(need) + " bytes, found " +
                              std::to_string(buf.size() > pos ? buf.size() - pos : 0),
                          buf.size());
    }
    Image img(h, w);
    const auto* px = reinterpret_cast<const unsigned char*>(buf.data() + pos);
    for (Index i = 0; i < img.size(); ++i) {
        if (channels == 1) {
            img.data()[i] = px[i];
        } else {
            const double luma = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
            img.data()[i] = static_cast<std::uint8_t>(std::lround(luma));
        }
    }
    return img;
}

void write_pgm(const fs::path& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

std::string frame_filename(std::string_view eye, Index t, std::string_view ext) {
    char num[32];
    std::snprintf(num, sizeof num, "%06lld", static_cast<long long>(t));
    return "frame_" + std::string(eye) + "_" + num + "." + std::string(ext);
}

std::vector<Image> read_frames(const fs::path& dir, std::string_view eye, Index count) {
    std::vector<Image> frames;
    frames.reserve(static_cast<std::size_t>(count));
    for (Index t = 0; t < count; ++t) {
        fs::path p = dir / frame_filename(eye, t, "pgm");
        if (!fs::exists(p)) p = dir / frame_filename(eye, t, "ppm");
        if (!fs::exists(p)) throw IoError("missing frame " + (dir / frame_filename(eye, t, "pgm")).string());
        frames.push_back(read_pnm(p));
    }
    return frames;
}

// ---------------------------------------------------------------------------
// GZFT

namespace {

constexpr std::size_t kGzftHeaderBytes = 20;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(const std::vector<char>& buf, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[at + i])) << (8 * i);
    return v;
}

} // namespace

void write_gzft(const fs::path& path, const FeatureSeries& features) {
    std::string out;
    const auto frames = static_cast<std::size_t>(features.size());
    const auto dim = static_cast<std::size_t>(features.dim());
    out.reserve(kGzftHeaderBytes + frames * 2 * dim * 4);
    out += "GZFT";
    put_u32(out, kGzftVersion);
    put_u32(out, static_cast<std::uint32_t>(frames));
    put_u32(out, static_cast<std::uint32_t>(dim));
    put_u32(out, 2);
    for (Index t = 0; t < features.size(); ++t) {
        for (const Eigen::MatrixXd* m : {&features.left(), &features.right()}) {
            for (Index d = 0; d < features.dim(); ++d) {
                put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>((*m)(t, d))));
            }
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

FeatureSeries read_gzft(const fs::path& path) {
    const auto buf = slurp(path);
    if (buf.size() < kGzftHeaderBytes) {
        throw FormatError("GZFT header truncated: expected " + std::to_string(kGzftHeaderBytes) +
                              " bytes, found " + std::to_string(buf.size()),
                          buf.size());
    }
    if (std::memcmp(buf.data(), "GZFT", 4) != 0) throw FormatError("bad GZFT magic", 0);
    if (const auto version = get_u32(buf, 4); version != kGzftVersion) {
        throw FormatError("unsupported GZFT version " + std::to_string(version), 4);
    }
    const std::uint64_t frames = get_u32(buf, 8);
    const std::uint64_t dim = get_u32(buf, 12);
    if (frames < 2) throw FormatError("GZFT frame count must be >= 2", 8);
    if (dim < 1) throw FormatError("GZFT dimension must be >= 1", 12);
    if (get_u32(buf, 16) != 2) throw FormatError("GZFT stream count must be 2", 16);

    const std::uint64_t expected = kGzftHeaderBytes + frames * 2 * dim * 4;
    if (buf.size() != expected) {
        throw FormatError("GZFT payload size mismatch: expected " + std::to_string(expected) +
                              " bytes, found " + std::to_string(buf.size()),
                          std::min<std::uint64_t>(buf.size(), expected));
    }
    Eigen::MatrixXd left(static_cast<Index>(frames), static_cast<Index>(dim));
    Eigen::MatrixXd right(static_cast<Index>(frames), static_cast<Index>(dim));
    std::size_t at = kGzftHeaderBytes;
    for (Index t = 0; t < left.rows(); ++t) {
        for (Eigen::MatrixXd* m : {&left, &right}) {
            for (Index d = 0; d < left.cols(); ++d, at += 4) {
                const float v = std::bit_cast<float>(get_u32(buf, at));
                if (!std::isfinite(v)) throw FormatError("non-finite GZFT value", at);
                (*m)(t, d) = v;
            }
        }
    }
    return FeatureSeries(std::move(left), std::move(right));
}

FeatureSeries ingest_embeddings(const fs::path& path) {
    return normalize_features(read_gzft(path), path.string());
}

} // namespace gazeseg::features
