#include "gazeseg/refine.hpp"
#include "gazeseg/detect.hpp"

#include "parallel.hpp"

namespace gazeseg {

std::size_t RefinementReport::excluded_count() const {
    return static_cast<std::size_t>(std::count_if(per_demo.begin(), per_demo.end(),
                                                  [](const auto& d) { return d.status == Status::excluded; }));
}

std::size_t modal_count(std::span<const std::size_t> counts) {
    if (counts.empty()) throw ValidationError("cannot take the mode of an empty dataset");
    std::map<std::size_t, std::size_t> freq;
    for (auto c : counts) ++freq[c];
    // std::map iterates ascending, so strict '>' keeps the smaller count on ties.
    std::size_t best = freq.begin()->first, best_n = 0;
    for (const auto& [count, n] : freq) {
        if (n > best_n) {
            best = count;
            best_n = n;
        }
    }
    return best;
}

std::size_t modal_count(std::span<const ChangePointSet> raw) {
    std::vector<std::size_t> counts;
    counts.reserve(raw.size());
    for (const auto& c : raw) counts.push_back(c.size());
    return modal_count(counts);
}

DemoRefinement refine_demo(const ChangeScores& scores, std::size_t s, const DetectionConfig& config) {
    config.validate();
    DemoRefinement out;
    out.theta_pos = config.theta_pos;
    out.theta_feat = config.theta_feat;
    out.points = detect(scores, out.theta_pos, out.theta_feat, config.mode);

    for (int i = 0; i < config.max_iters && out.points.size() < s; ++i) {
        out.theta_pos *= config.scale_down;
        out.theta_feat *= config.scale_down;
        out.points = detect(scores, out.theta_pos, out.theta_feat, config.mode);
        ++out.iterations;
    }
    for (int i = 0; i < config.max_iters && out.points.size() > s; ++i) {
        out.theta_pos *= config.scale_up;
        out.theta_feat *= config.scale_up;
        out.points = detect(scores, out.theta_pos, out.theta_feat, config.mode);
        ++out.iterations;
    }
    if (out.points.size() == s) {
        out.status = Status::ok;
        out.points = out.points.as_refined();
    } else {
        out.status = Status::excluded;
    }
    return out;
}

namespace {

std::vector<ChangePointSet> detect_all(std::span<const ChangeScores> demos, const DetectionConfig& config) {
    std::vector<ChangePointSet> raw;
    raw.reserve(demos.size());
    for (const auto& d : demos) raw.push_back(detect(d, config));
    return raw;
}

RefinementReport report_skeleton(const std::vector<ChangePointSet>& raw) {
    RefinementReport report;
    report.s = modal_count(raw);
    for (const auto& c : raw) ++report.counts_histogram[c.size()];
    report.per_demo.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) report.per_demo[i].id = std::to_string(i);
    return report;
}

} // namespace

RefinementReport refine_dataset(std::span<const ChangeScores> demos, const DetectionConfig& config, int jobs) {
    config.validate();
    if (demos.empty()) throw ValidationError("refinement needs at least one demonstration");
    RefinementReport report = report_skeleton(detect_all(demos, config));
    detail::parallel_for(demos.size(), jobs, [&](std::size_t i) {
        auto id = std::move(report.per_demo[i].id);
        report.per_demo[i] = refine_demo(demos[i], report.s, config);
        report.per_demo[i].id = std::move(id);
    });
    return report;
}

RefinementReport detect_dataset(std::span<const ChangeScores> demos, const DetectionConfig& config) {
    config.validate();
    if (demos.empty()) throw ValidationError("detection needs at least one demonstration");
    const auto raw = detect_all(demos, config);
    RefinementReport report = report_skeleton(raw);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& d = report.per_demo[i];
        d.points = raw[i];
        d.theta_pos = config.theta_pos;
        d.theta_feat = config.theta_feat;
    }
    return report;
}

RefinementReport segment_scores(std::span<const ChangeScores> demos, const DetectionConfig& config, int jobs) {
    return config.refine ? refine_dataset(demos, config, jobs) : detect_dataset(demos, config);
}

} // namespace gazeseg
