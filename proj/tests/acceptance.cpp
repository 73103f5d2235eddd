// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Datasets are generated under the system temp directory.

#include "gazeseg/detect.hpp"
#include "gazeseg/features.hpp"
#include "gazeseg/io.hpp"
#include "gazeseg/pipeline.hpp"
#include "gazeseg/refine.hpp"
#include "gazeseg/signal.hpp"
#include "gazeseg/synth.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace gazeseg;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr Index kTolerance = 10;
constexpr std::uint64_t kSeed = 0;
constexpr int kCases = 1000;

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("gazeseg_acceptance_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

pipeline::EvalMetrics run(const pipeline::Dataset& ds, const DetectionConfig& cfg) {
    return pipeline::evaluate(pipeline::segment_dataset(ds, cfg), pipeline::dataset_truths(ds), kTolerance);
}

std::string counts(const pipeline::EvalMetrics& m) {
    return std::to_string(m.majority) + "/" + std::to_string(m.n_demos) + " correct, " +
           std::to_string(m.excluded) + " excluded";
}

// ---------------------------------------------------------------------------

void a1() {
    const auto start = Clock::now();
    const auto specs = synth::benchmark_specs(synth::TaskShape{}, 100, 0, 0.0, 50.0, 20, kSeed);
    const auto ds = pipeline::load_dataset(synth::generate_dataset(specs, 1, scratch("a1")));
    DetectionConfig cfg;
    cfg.mode = DetectionMode::pos_only;
    const auto refined = run(ds, cfg);
    const double elapsed = seconds_since(start);
    cfg.refine = false;
    const auto raw = run(ds, cfg);
    char buf[256];
    std::snprintf(buf, sizeof buf, "pos-only w=20 theta_pos=50: refine %s; no-refine %s; %.2f s",
                  counts(refined).c_str(), counts(raw).c_str(), elapsed);
    report("A1", refined.majority >= 99 && raw.majority >= 99 && elapsed < 5.0, buf);
}

pipeline::Dataset a2_dataset() {
    const auto specs = synth::benchmark_specs(synth::TaskShape{}, 100, 10, 0.7, 50.0, 20, kSeed);
    return pipeline::load_dataset(synth::generate_dataset(specs, 1, scratch("a2")));
}

void a2(const pipeline::Dataset& ds) {
    bool ok = true;
    std::string detail;
    for (auto mode : {DetectionMode::both, DetectionMode::pos_only}) {
        DetectionConfig cfg;
        cfg.mode = mode;
        const auto report = pipeline::segment_dataset(ds, cfg);
        const auto refined = pipeline::evaluate(report, pipeline::dataset_truths(ds), kTolerance);
        bool sizes = report.s == 3;
        for (const auto& d : report.per_demo) {
            if (d.status == Status::ok && d.points.size() != report.s) sizes = false;
        }
        cfg.refine = false;
        const auto raw = run(ds, cfg);
        ok = ok && raw.minority >= 10 && refined.minority <= 1 && sizes;
        detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(mode)) + ": no-refine minority " +
                  std::to_string(raw.minority) + ", refine minority " + std::to_string(refined.minority) +
                  ", s=" + std::to_string(report.s) + (sizes ? "" : " (size mismatch)");
    }
    report("A2", ok, detail);
}

void a3(const pipeline::Dataset& ds) {
    const auto start = Clock::now();
    const auto grid = pipeline::default_sweep_grid();
    const auto rows = pipeline::sweep(ds, grid, DetectionConfig{}, kTolerance);
    const double elapsed = seconds_since(start);

    const std::size_t cells = grid.windows.size() * grid.theta_pos.size();
    std::size_t dominated = 0;
    bool central = true;
    for (std::size_t i = 0; i < cells; ++i) {
        const auto& on = rows[i];
        const auto& off = rows[cells + i];
        if (on.n_correct >= off.n_correct) ++dominated;
        // Central 3x3: w in {10, 15, 20}, theta_pos in {50, 75, 100}.
        const std::size_t wi = i / grid.theta_pos.size(), ti = i % grid.theta_pos.size();
        if (wi >= 1 && wi <= 3 && ti >= 1 && ti <= 3 && on.n_correct != static_cast<long>(ds.demos.size())) {
            central = false;
        }
    }
    const double share = static_cast<double>(dominated) / static_cast<double>(cells);
    char buf[256];
    std::snprintf(buf, sizeof buf, "refine >= no-refine in %zu/%zu cells (%.0f%%), central 3x3 all correct: %s; %.1f s",
                  dominated, cells, 100.0 * share, central ? "yes" : "no", elapsed);
    report("A3", share >= 0.8 && central && elapsed < 120.0, buf);
}

// ---------------------------------------------------------------------------

struct Property {
    const char* name;
    std::function<bool(std::mt19937_64&)> check;
};

ChangeScores random_scores(std::mt19937_64& rng) {
    const Index n = std::uniform_int_distribution<Index>(2, 80)(rng);
    std::exponential_distribution<double> pos(1.0 / 30.0), feat(1.0 / 0.03);
    Eigen::VectorXd p(n), f(n);
    p[0] = f[0] = 0.0;
    for (Index t = 1; t < n; ++t) {
        p[t] = pos(rng);
        f[t] = feat(rng);
    }
    return ChangeScores(p, f);
}

Eigen::MatrixXd random_unit_rows(std::mt19937_64& rng, Index n, Index d) {
    std::normal_distribution<double> val;
    Eigen::MatrixXd m(n, d);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = val(rng);
    m.rowwise().normalize();
    return m;
}

GazeMatrix<double> random_gaze(std::mt19937_64& rng, Index n) {
    std::normal_distribution<double> val(500.0, 200.0);
    GazeMatrix<double> m(n, 4);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = val(rng);
    return m;
}

std::vector<Property> properties() {
    std::vector<Property> props;
    props.push_back({"exceedance monotonicity", [](std::mt19937_64& rng) {
        const auto s = random_scores(rng);
        const double tp = std::uniform_real_distribution<>(1, 80)(rng);
        const double tf = std::uniform_real_distribution<>(0.001, 0.08)(rng);
        const double k = std::uniform_real_distribution<>(1, 2)(rng);
        for (auto mode : {DetectionMode::pos_only, DetectionMode::feat_only, DetectionMode::both}) {
            const auto lo = strict_exceedance_set(s, tp, tf, mode);
            const auto hi = strict_exceedance_set(s, tp * k, tf * k, mode);
            if (!std::includes(lo.begin(), lo.end(), hi.begin(), hi.end())) return false;
        }
        return true;
    }});
    props.push_back({"s_feat non-negative", [](std::mt19937_64& rng) {
        const Index d = std::uniform_int_distribution<Index>(1, 64)(rng);
        const auto l = random_unit_rows(rng, 10, d), r = random_unit_rows(rng, 10, d);
        return (score_feat(FeatureSeries(l, r)).array() >= 0.0).all();
    }});
    props.push_back({"s_feat fixed point is zero", [](std::mt19937_64& rng) {
        const Index d = std::uniform_int_distribution<Index>(1, 64)(rng);
        Eigen::MatrixXd l(2, d), r(2, d);
        l.row(0) = l.row(1) = random_unit_rows(rng, 1, d).row(0);
        r.row(0) = r.row(1) = random_unit_rows(rng, 1, d).row(0);
        return score_feat(FeatureSeries(l, r))[1] == 0.0;
    }});
    props.push_back({"median filter equals naive median (w <= 30)", [](std::mt19937_64& rng) {
        const Index n = std::uniform_int_distribution<Index>(2, 90)(rng);
        const int w = std::uniform_int_distribution<int>(2, 30)(rng);
        GazeMatrix<double> m = random_gaze(rng, n).array().round();
        const auto f = median_filter(GazeSeries(m), w);
        for (Index c = 0; c < 4; ++c) {
            std::vector<double> col(static_cast<std::size_t>(n));
            for (Index t = 0; t < n; ++t) col[static_cast<std::size_t>(t)] = m(t, c);
            const auto ref = oracle::window_median(col, w);
            for (Index t = 0; t < n; ++t) {
                if (f.matrix()(t, c) != ref[static_cast<std::size_t>(t)]) return false;
            }
        }
        return true;
    }});
    props.push_back({"s_pos translation invariance", [](std::mt19937_64& rng) {
        const GazeMatrix<double> m = random_gaze(rng, 40);
        std::normal_distribution<double> off(0.0, 300.0);
        const Eigen::RowVector4d o(off(rng), off(rng), off(rng), off(rng));
        const GazeMatrix<double> shifted = m.rowwise() + o;
        return (score_pos(GazeSeries(m)) - score_pos(GazeSeries(shifted))).cwiseAbs().maxCoeff() < 1e-9;
    }});
    props.push_back({"refinement post-condition |C*| = s", [](std::mt19937_64& rng) {
        std::vector<ChangeScores> demos;
        const int n = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int i = 0; i < n; ++i) demos.push_back(random_scores(rng));
        DetectionConfig cfg;
        cfg.mode = static_cast<DetectionMode>(std::uniform_int_distribution<int>(0, 2)(rng));
        const auto r = refine_dataset(demos, cfg);
        for (const auto& d : r.per_demo) {
            if (d.status == Status::ok && d.points.size() != r.s) return false;
        }
        return true;
    }});
    props.push_back({"gaze CSV round trip byte-exact", [](std::mt19937_64& rng) {
        const GazeSeries g(random_gaze(rng, std::uniform_int_distribution<Index>(2, 30)(rng)));
        const auto text = io::format_gaze_csv(g);
        const auto back = io::parse_gaze_csv(text);
        return back == g && io::format_gaze_csv(back) == text;
    }});
    const fs::path dir = scratch("a4");
    fs::create_directories(dir);
    props.push_back({"GZFT round trip byte-exact", [dir](std::mt19937_64& rng) {
        const Index n = std::uniform_int_distribution<Index>(2, 20)(rng);
        const Index d = std::uniform_int_distribution<Index>(1, 32)(rng);
        const FeatureSeries f(random_unit_rows(rng, n, d), random_unit_rows(rng, n, d));
        features::write_gzft(dir / "a.gzft", f);
        const auto back = features::read_gzft(dir / "a.gzft");
        features::write_gzft(dir / "b.gzft", back);
        return (back.left() - f.left()).cwiseAbs().maxCoeff() < 1e-7 && slurp(dir / "a.gzft") == slurp(dir / "b.gzft");
    }});
    props.push_back({"segmentation JSON round trip byte-exact", [dir](std::mt19937_64& rng) {
        std::vector<ChangeScores> demos;
        const int n = std::uniform_int_distribution<int>(1, 5)(rng);
        for (int i = 0; i < n; ++i) demos.push_back(random_scores(rng));
        const auto r = refine_dataset(demos, DetectionConfig{});
        const auto text = io::format_segmentation_json("task", r);
        io::write_segmentation_json(dir / "seg.json", "task", r);
        const auto back = io::read_segmentation_json(dir / "seg.json");
        return io::format_segmentation_json(back.task, back.report) == text;
    }});
    return props;
}

void a4() {
    std::mt19937_64 rng(kSeed + 4);
    std::string failed;
    std::size_t suites = 0;
    for (const auto& p : properties()) {
        ++suites;
        for (int i = 0; i < kCases; ++i) {
            if (!p.check(rng)) {
                failed += std::string(failed.empty() ? "" : ", ") + p.name + " (case " + std::to_string(i) + ")";
                break;
            }
        }
    }
    report("A4", failed.empty(),
           std::to_string(suites) + " property suites x " + std::to_string(kCases) + " cases" +
               (failed.empty() ? "" : "; failed: " + failed));
}

void a5() {
    const auto score = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
        Eigen::MatrixXd m(2, 3);
        m.row(0) = a.transpose();
        m.row(1) = b.transpose();
        return score_feat(FeatureSeries(m, m))[1];
    };
    const Eigen::Vector3d u = Eigen::Vector3d(1, 2, 2) / 3.0;
    const Eigen::Vector3d v = Eigen::Vector3d(2, 1, -2) / 3.0;
    const double same = score(u, u);
    const double orth = score(Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY());
    const double anti = score(u, -u);
    const double anti_expected = -std::log(1e-9) + std::numbers::ln2;
    const double orth_err = std::abs(orth - std::numbers::ln2);
    const double anti_err = std::abs(anti - anti_expected);
    const double orth_uv = std::abs(score(u, v) - std::numbers::ln2);
    char buf[256];
    std::snprintf(buf, sizeof buf, "identical %.17g, |orthogonal - log 2| = %.3g (%.3g), |antipodal - %.17g| = %.3g",
                  same, orth_err, orth_uv, anti_expected, anti_err);
    report("A5", same == 0.0 && orth_err <= 1e-12 && orth_uv <= 1e-12 && anti_err <= 1e-9, buf);
}

void a6() {
    std::mt19937_64 rng(kSeed + 6);
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        const auto s = random_scores(rng);
        const double tp = std::uniform_real_distribution<>(1, 80)(rng);
        const double tf = std::uniform_real_distribution<>(0.001, 0.08)(rng);
        const auto p = strict_exceedance_set(s, tp, tf, DetectionMode::pos_only);
        const auto f = strict_exceedance_set(s, tp, tf, DetectionMode::feat_only);
        std::vector<Index> both;
        std::set_intersection(p.begin(), p.end(), f.begin(), f.end(), std::back_inserter(both));
        if (strict_exceedance_set(s, tp, tf, DetectionMode::both) != both) ++mismatches;
    }
    report("A6", mismatches == 0, "100 random score series, " + std::to_string(mismatches) + " mismatches");
}

void guarded(const char* id, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        report(id, false, std::string("error: ") + e.what());
    }
}

} // namespace

int main() {
    guarded("A1", a1);
    std::optional<pipeline::Dataset> ds;
    guarded("A2", [&] {
        ds = a2_dataset();
        a2(*ds);
    });
    guarded("A3", [&] {
        if (!ds) throw Error("A2 dataset unavailable");
        a3(*ds);
    });
    guarded("A4", a4);
    guarded("A5", a5);
    guarded("A6", a6);
    std::printf("%s\n", failures == 0 ? "all acceptance criteria passed" : "acceptance FAILED");
    return failures == 0 ? 0 : 1;
}
