#include "gazeseg/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gazeseg::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kGazeHeader = "t,left_x,left_y,right_x,right_y";

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json parse_json(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
        throw ParseError(path.string() + ": " + e.what(), line);
    }
}

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// Gaze CSV

GazeSeries parse_gaze_csv(std::string_view text, double rate_hz) {
    std::vector<std::array<double, 4>> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = trim_cr(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (!header_seen) {
            if (line != kGazeHeader) {
                throw ParseError("expected header '" + std::string(kGazeHeader) + "'", line_no);
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) {
            if (pos >= text.size()) break;
            throw ParseError("empty row", line_no);
        }
        std::array<std::string_view, 5> fields;
        std::size_t start = 0, n = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (n == fields.size()) throw ParseError("expected 5 fields", line_no);
                fields[n++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (n != fields.size()) throw ParseError("expected 5 fields, got " + std::to_string(n), line_no);

        long long t = -1;
        if (auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), t);
            ec != std::errc() || p != fields[0].data() + fields[0].size()) {
            throw ParseError("bad time index '" + std::string(fields[0]) + "'", line_no);
        }
        const auto expected = static_cast<long long>(rows.size());
        if (t != expected) {
            throw ParseError("time index " + std::to_string(t) + " where " + std::to_string(expected) +
                                 " was expected (gap or out-of-order row)",
                             line_no);
        }
        std::array<double, 4> values{};
        for (std::size_t k = 0; k < 4; ++k) {
            const auto f = fields[k + 1];
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), values[k]);
            if (ec != std::errc() || p != f.data() + f.size()) {
                throw ParseError("bad number '" + std::string(f) + "'", line_no);
            }
            if (!std::isfinite(values[k])) throw ParseError("non-finite value", line_no);
        }
        rows.push_back(values);
    }
    if (!header_seen) throw ParseError("missing header", 1);
    if (rows.size() < 2) throw ParseError("gaze CSV needs at least 2 rows", line_no);

    GazeMatrix<double> m(static_cast<Index>(rows.size()), 4);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t k = 0; k < 4; ++k) m(static_cast<Index>(t), static_cast<Index>(k)) = rows[t][k];
    }
    return GazeSeries(std::move(m), rate_hz);
}

GazeSeries read_gaze_csv(const fs::path& path, double rate_hz) {
    try {
        return parse_gaze_csv(read_text(path), rate_hz);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.message(), e.line());
    }
}

std::string format_gaze_csv(const GazeSeries& gaze) {
    std::string out(kGazeHeader);
    out += '\n';
    char buf[160];
    const auto& m = gaze.matrix();
    for (Index t = 0; t < m.rows(); ++t) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g\n", static_cast<long long>(t), m(t, 0),
                      m(t, 1), m(t, 2), m(t, 3));
        out += buf;
    }
    return out;
}

void write_gaze_csv(const fs::path& path, const GazeSeries& gaze) {
    write_text(path, format_gaze_csv(gaze));
}

// ---------------------------------------------------------------------------
// Ground truth

void write_ground_truth_json(const fs::path& path, const GroundTruth& truth) {
    ordered_json j;
    j["demo_id"] = truth.demo_id;
    j["boundaries"] = truth.boundaries;
    write_text(path, j.dump() + "\n");
}

namespace {

GroundTruth truth_from_json(const nlohmann::json& j, const fs::path& path) {
    if (!j.is_object() || !j.contains("demo_id") || !j.contains("boundaries")) {
        throw ValidationError(path.string() + ": ground truth needs 'demo_id' and 'boundaries'");
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "demo_id" && key != "boundaries") {
            throw ValidationError(path.string() + ": unknown ground truth key '" + key + "'");
        }
    }
    GroundTruth truth;
    try {
        truth = {j.at("demo_id").get<std::string>(), j.at("boundaries").get<std::vector<Index>>()};
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    Index previous = 0;
    for (Index b : truth.boundaries) {
        if (b <= previous) {
            throw ValidationError(path.string() + ": boundaries of '" + truth.demo_id +
                                  "' must be positive and strictly increasing");
        }
        previous = b;
    }
    return truth;
}

} // namespace

std::vector<GroundTruth> read_ground_truth_json(const fs::path& path) {
    const auto j = parse_json(path);
    std::vector<GroundTruth> out;
    if (j.is_array()) {
        for (const auto& item : j) out.push_back(truth_from_json(item, path));
    } else {
        out.push_back(truth_from_json(j, path));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::optional<fs::path> optional_path(const nlohmann::json& entry, const char* key, const fs::path& manifest) {
    if (!entry.contains(key) || entry.at(key).is_null()) return std::nullopt;
    if (!entry.at(key).is_string()) {
        throw ValidationError(manifest.string() + ": '" + key + "' must be a string or null");
    }
    return fs::path(entry.at(key).get<std::string>());
}

} // namespace

Manifest read_manifest(const fs::path& path) {
    const auto j = parse_json(path);
    if (!j.is_object()) throw ValidationError(path.string() + ": manifest must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (key != "task" && key != "demos") {
            throw ValidationError(path.string() + ": unknown manifest key '" + key + "'");
        }
    }
    if (!j.contains("task") || !j.at("task").is_string()) {
        throw ValidationError(path.string() + ": manifest needs a string 'task'");
    }
    if (!j.contains("demos") || !j.at("demos").is_array()) {
        throw ValidationError(path.string() + ": manifest needs a 'demos' array");
    }
    Manifest m;
    m.task = j.at("task").get<std::string>();
    m.base_dir = path.parent_path();
    std::set<std::string> seen;
    static const std::set<std::string> kKeys = {"id", "gaze", "features", "frames_left", "frames_right",
                                                "ground_truth"};
    for (const auto& d : j.at("demos")) {
        if (!d.is_object()) throw ValidationError(path.string() + ": demo entries must be objects");
        for (const auto& [key, _] : d.items()) {
            if (!kKeys.contains(key)) {
                throw ValidationError(path.string() + ": unknown demo key '" + key + "'");
            }
        }
        if (!d.contains("id") || !d.at("id").is_string()) {
            throw ValidationError(path.string() + ": demo entry needs a string 'id'");
        }
        ManifestEntry e;
        e.id = d.at("id").get<std::string>();
        if (!seen.insert(e.id).second) throw ValidationError(path.string() + ": duplicate demo id '" + e.id + "'");
        auto gaze = optional_path(d, "gaze", path);
        if (!gaze) throw ValidationError(path.string() + ": demo '" + e.id + "' has no 'gaze' path");
        e.gaze = *gaze;
        e.features = optional_path(d, "features", path);
        e.frames_left = optional_path(d, "frames_left", path);
        e.frames_right = optional_path(d, "frames_right", path);
        e.ground_truth = optional_path(d, "ground_truth", path);
        if (e.frames_left.has_value() != e.frames_right.has_value()) {
            throw ValidationError(path.string() + ": demo '" + e.id +
                                  "' must give both frames_left and frames_right or neither");
        }
        m.demos.push_back(std::move(e));
    }
    return m;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
    const auto opt = [](const std::optional<fs::path>& p) -> ordered_json {
        return p ? ordered_json(p->generic_string()) : ordered_json(nullptr);
    };
    ordered_json demos = ordered_json::array();
    for (const auto& e : manifest.demos) {
        ordered_json d;
        d["id"] = e.id;
        d["gaze"] = e.gaze.generic_string();
        d["features"] = opt(e.features);
        d["frames_left"] = opt(e.frames_left);
        d["frames_right"] = opt(e.frames_right);
        d["ground_truth"] = opt(e.ground_truth);
        demos.push_back(std::move(d));
    }
    ordered_json j;
    j["task"] = manifest.task;
    j["demos"] = std::move(demos);
    write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Segmentation results

std::string format_segmentation_json(const std::string& task, const RefinementReport& report) {
    ordered_json demos = ordered_json::array();
    for (const auto& d : report.per_demo) {
        ordered_json item;
        item["id"] = d.id;
        item["status"] = std::string(to_string(d.status));
        item["change_points"] = d.points.points();
        item["theta_pos_final"] = d.theta_pos;
        item["theta_feat_final"] = d.theta_feat;
        item["iterations"] = d.iterations;
        demos.push_back(std::move(item));
    }
    ordered_json j;
    j["task"] = task;
    j["s"] = report.s;
    j["demos"] = std::move(demos);
    return j.dump(2) + "\n";
}

void write_segmentation_json(const fs::path& path, const std::string& task, const RefinementReport& report) {
    write_text(path, format_segmentation_json(task, report));
}

SegmentationFile read_segmentation_json(const fs::path& path) {
    const auto j = parse_json(path);
    SegmentationFile out;
    try {
        out.task = j.at("task").get<std::string>();
        out.report.s = j.at("s").get<std::size_t>();
        for (const auto& d : j.at("demos")) {
            DemoRefinement r;
            r.id = d.at("id").get<std::string>();
            r.status = parse_status(d.at("status").get<std::string>());
            auto pts = d.at("change_points").get<std::vector<Index>>();
            const Index last = pts.empty() ? 0 : pts.back();
            r.points = ChangePointSet(std::move(pts), last);
            r.theta_pos = d.at("theta_pos_final").get<double>();
            r.theta_feat = d.at("theta_feat_final").get<double>();
            r.iterations = d.at("iterations").get<int>();
            out.report.per_demo.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return out;
}

} // namespace gazeseg::io
