#include "gazeseg/synth.hpp"
#include "gazeseg/signal.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <random>

namespace gazeseg::synth {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace

std::vector<SynthSpec> benchmark_specs(const TaskShape& shape, int n, int attenuated, double attenuation,
                                       double theta_pos, int window_w, std::uint64_t seed) {
    if (n < 1 || attenuated < 0 || attenuated > n) throw ConfigError("need 1 <= n and 0 <= attenuated <= n");
    const double weak_jump =
        attenuated > 0 ? calibrate_jump(attenuation * theta_pos, shape.noise_sigma, window_w) : 0.0;
    std::vector<SynthSpec> specs;
    specs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        TaskShape s = shape;
        if (i >= n - attenuated) s.jump_min_px = s.jump_max_px = weak_jump;
        specs.push_back(make_task_spec(s, derive_seed(seed, static_cast<std::uint64_t>(i))));
    }
    return specs;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ (index * 0xD1B54A32D192ED03ull));
}

void SynthSpec::validate() const {
    if (landmarks.empty()) throw ValidationError("synthetic spec needs at least one landmark");
    for (const auto& l : landmarks) {
        if (l.dwell_steps < 1) throw ValidationError("landmark dwell_steps must be >= 1");
        if (!l.position.allFinite() || !l.drift_per_step.allFinite()) {
            throw ValidationError("non-finite landmark geometry");
        }
        if (l.band.lo < 0 || l.band.hi > 255 || l.band.lo > l.band.hi) {
            throw ValidationError("landmark intensity band must satisfy 0 <= lo <= hi <= 255");
        }
    }
    if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
    if (!(glance_rate >= 0.0 && glance_rate < 1.0)) throw ValidationError("glance_rate must lie in [0, 1)");
    if (glance_refractory < 0) throw ValidationError("glance_refractory must be >= 0");
    if (glance_margin < 0) throw ValidationError("glance_margin must be >= 0");
    if (!(glance_distance_min >= 0.0 && glance_distance_max >= glance_distance_min)) {
        throw ValidationError("bad glance distance range");
    }
    if (feature_bins < 2) throw ValidationError("feature_bins must be >= 2");
    if (!(feature_jitter >= 0.0)) throw ValidationError("feature_jitter must be >= 0");
    if (total_steps() < 2) throw ValidationError("synthetic demo must span at least 2 steps");
}

Index SynthSpec::total_steps() const {
    Index n = 0;
    for (const auto& l : landmarks) n += l.dwell_steps;
    return n;
}

namespace {

std::vector<Index> landmark_starts(const SynthSpec& spec) {
    std::vector<Index> starts;
    Index t = 0;
    for (const auto& l : spec.landmarks) {
        starts.push_back(t);
        t += l.dwell_steps;
    }
    return starts;
}

} // namespace

Eigen::Vector4d landmark_position(const SynthSpec& spec, std::size_t landmark, Index t) {
    const auto starts = landmark_starts(spec);
    const auto& l = spec.landmarks.at(landmark);
    const Index local = std::clamp<Index>(t - starts[landmark], 0, l.dwell_steps - 1);
    return l.position + static_cast<double>(local) * l.drift_per_step;
}

Eigen::VectorXd band_feature(const IntensityBand& band, int bins) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(bins);
    for (int value = band.lo; value <= band.hi; ++value) v[value * bins / 256] += 1.0;
    return v.normalized();
}

SynthDemo generate_demo(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> glance_len(1, 3);

    const Index steps = spec.total_steps();
    const auto starts = landmark_starts(spec);

    std::vector<Index> boundaries(starts.begin() + 1, starts.end());
    std::vector<int> landmark_of_step(static_cast<std::size_t>(steps));

    GazeMatrix<double> gaze(steps, 4);
    int glance_left = 0;
    Index next_glance_allowed = 0;
    Eigen::Vector4d glance_target = Eigen::Vector4d::Zero();
    std::size_t current = 0;
    for (Index t = 0; t < steps; ++t) {
        while (current + 1 < starts.size() && t >= starts[current + 1]) ++current;
        landmark_of_step[static_cast<std::size_t>(t)] = static_cast<int>(current);
        const Eigen::Vector4d fixation = landmark_position(spec, current, t);
        const Index dwell_end = starts[current] + spec.landmarks[current].dwell_steps;

        if (glance_left == 0 && spec.glance_rate > 0.0 && t >= next_glance_allowed &&
            t >= starts[current] + spec.glance_margin && unit(rng) < spec.glance_rate) {
            const int len = glance_len(rng);
            const double angle = 2.0 * std::numbers::pi * unit(rng);
            const double dist = spec.glance_distance_min +
                                (spec.glance_distance_max - spec.glance_distance_min) * unit(rng);
            // Glances stay inside the dwell so they never straddle a transition.
            if (t + len + spec.glance_margin <= dwell_end) {
                glance_left = len;
                const Eigen::Vector2d offset(dist * std::cos(angle), dist * std::sin(angle));
                glance_target = fixation;
                glance_target.head<2>() += offset;
                glance_target.tail<2>() += offset;
            }
        }

        Eigen::Vector4d g = glance_left > 0 ? glance_target : fixation;
        if (glance_left > 0 && --glance_left == 0) next_glance_allowed = t + 1 + spec.glance_refractory;
        for (int c = 0; c < 4; ++c) g[c] += spec.noise_sigma * noise(rng);
        gaze.row(t) = g.transpose();
    }

    const int bins = spec.feature_bins;
    std::vector<Eigen::VectorXd> bases;
    for (const auto& l : spec.landmarks) bases.push_back(band_feature(l.band, bins));
    Eigen::MatrixXd left(steps, bins), right(steps, bins);
    const auto jittered = [&](const Eigen::VectorXd& base) {
        Eigen::VectorXd v = base;
        for (Index d = 0; d < v.size(); ++d) v[d] += spec.feature_jitter * noise(rng);
        return Eigen::VectorXd(v.normalized());
    };
    for (Index t = 0; t < steps; ++t) {
        const auto& base = bases[static_cast<std::size_t>(landmark_of_step[static_cast<std::size_t>(t)])];
        left.row(t) = jittered(base).transpose();
        right.row(t) = jittered(base).transpose();
    }

    return SynthDemo{GazeSeries(std::move(gaze), spec.rate_hz), FeatureSeries(std::move(left), std::move(right)),
                     std::move(boundaries), std::move(landmark_of_step)};
}

RenderedFrames render_frames(const SynthSpec& spec, const RenderSpec& render) {
    spec.validate();
    if (render.image_w < 1 || render.image_h < 1 || render.region_side < 1) {
        throw ConfigError("render dimensions must be positive");
    }
    const Index steps = spec.total_steps();
    RenderedFrames out;
    out.left.reserve(static_cast<std::size_t>(steps));
    out.right.reserve(static_cast<std::size_t>(steps));
    const Index side = render.region_side;

    for (Index t = 0; t < steps; ++t) {
        features::Image left = features::Image::Zero(render.image_h, render.image_w);
        features::Image right = left;
        for (std::size_t i = 0; i < spec.landmarks.size(); ++i) {
            const auto& band = spec.landmarks[i].band;
            const auto span = static_cast<std::uint64_t>(band.hi - band.lo + 1);
            const Eigen::Vector4d p = landmark_position(spec, i, t);
            for (int eye = 0; eye < 2; ++eye) {
                features::Image& img = eye == 0 ? left : right;
                const Index x0 = static_cast<Index>(std::lround(p[2 * eye])) - side / 2;
                const Index y0 = static_cast<Index>(std::lround(p[2 * eye + 1])) - side / 2;
                for (Index dy = 0; dy < side; ++dy) {
                    const Index y = y0 + dy;
                    if (y < 0 || y >= img.rows()) continue;
                    for (Index dx = 0; dx < side; ++dx) {
                        const Index x = x0 + dx;
                        if (x < 0 || x >= img.cols()) continue;
                        // Texture is attached to the landmark, so it moves with drift.
                        const std::uint64_t h = splitmix64(spec.seed ^ (std::uint64_t(i) << 48) ^
                                                           (std::uint64_t(dy) << 24) ^ std::uint64_t(dx));
                        img(y, x) = static_cast<std::uint8_t>(band.lo + static_cast<int>(h % span));
                    }
                }
            }
        }
        out.left.push_back(std::move(left));
        out.right.push_back(std::move(right));
    }
    return out;
}

SynthSpec make_task_spec(const TaskShape& shape, std::uint64_t seed) {
    if (shape.landmarks < 1) throw ConfigError("task shape needs at least one landmark");
    if (shape.dwell_min < 1 || shape.dwell_max < shape.dwell_min) throw ConfigError("bad dwell range");
    if (!(shape.jump_min_px >= 0.0 && shape.jump_max_px >= shape.jump_min_px)) {
        throw ConfigError("bad jump range");
    }
    static constexpr IntensityBand kBands[] = {{32, 63}, {96, 127}, {160, 191}, {224, 255}};

    std::mt19937_64 rng(derive_seed(seed, 0x7a5c));
    std::uniform_int_distribution<int> dwell(shape.dwell_min, shape.dwell_max);
    std::uniform_real_distribution<double> jump(shape.jump_min_px, shape.jump_max_px);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    const Eigen::Vector2d lo = Eigen::Vector2d::Constant(shape.view_margin);
    const Eigen::Vector2d hi = shape.view - lo;
    if ((hi.array() < lo.array()).any()) throw ConfigError("view margin leaves no room for landmarks");
    const auto inside = [&](const Eigen::Vector2d& p) {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    };

    SynthSpec spec;
    spec.noise_sigma = shape.noise_sigma;
    spec.glance_rate = shape.glance_rate;
    spec.glance_margin = shape.glance_margin;
    spec.seed = seed;
    Eigen::Vector2d p = shape.origin;
    for (int k = 0; k < shape.landmarks; ++k) {
        if (k > 0) {
            const double d = jump(rng);
            Eigen::Vector2d next = p;
            for (int attempt = 0; attempt < 64; ++attempt) {
                const double a = angle(rng);
                next = p + d * Eigen::Vector2d(std::cos(a), std::sin(a));
                if (inside(next)) break;
            }
            p = next;
        }
        Landmark l;
        l.position << p.x(), p.y(), p.x() + shape.disparity_px, p.y();
        l.dwell_steps = dwell(rng);
        l.band = kBands[k % 4];
        spec.landmarks.push_back(l);
    }
    return spec;
}

double calibrate_jump(double target_spike, double noise_sigma, int window_w, int trials, std::uint64_t seed) {
    if (!(target_spike > 0.0)) throw ConfigError("target spike must be positive");
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
    if (window_w < 2) throw ConfigError("window_w must be >= 2");
    if (trials < 1) throw ConfigError("trials must be positive");
    if (noise_sigma == 0.0) return jump_for_spike(target_spike);

    // Fixed noise draws and directions, shared by every candidate jump.
    const Index half = window_w / 2;
    const Index steps = 4 * half + 8;
    const Index jump_at = steps / 2;
    std::mt19937_64 rng(derive_seed(seed, 0xca11));
    std::normal_distribution<double> noise(0.0, noise_sigma);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<GazeMatrix<double>> draws;
    std::vector<Eigen::Vector2d> directions;
    for (int k = 0; k < trials; ++k) {
        GazeMatrix<double> n(steps, 4);
        for (Index i = 0; i < n.size(); ++i) n.data()[i] = noise(rng);
        draws.push_back(std::move(n));
        const double a = angle(rng);
        directions.emplace_back(std::cos(a), std::sin(a));
    }
    const auto median_peak = [&](double jump) {
        std::vector<double> peaks;
        for (int k = 0; k < trials; ++k) {
            GazeMatrix<double> g = draws[static_cast<std::size_t>(k)];
            const Eigen::Vector2d d = jump * directions[static_cast<std::size_t>(k)];
            g.bottomRows(steps - jump_at).rowwise() += Eigen::RowVector4d(d.x(), d.y(), d.x(), d.y());
            const auto s = position_scores(median_filter(g, window_w));
            peaks.push_back(s.segment(jump_at - half, 2 * half + 1).maxCoeff());
        }
        auto mid = peaks.begin() + static_cast<std::ptrdiff_t>(peaks.size() / 2);
        std::nth_element(peaks.begin(), mid, peaks.end());
        return *mid;
    };

    double lo = 0.0, hi = jump_for_spike(target_spike) + 20.0 * noise_sigma;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (median_peak(mid) < target_spike ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::filesystem::path generate_dataset(const std::vector<SynthSpec>& specs, int n_per_spec,
                                       const fs::path& out_dir, const DatasetOptions& options) {
    if (specs.empty()) throw ConfigError("generate_dataset needs at least one spec");
    if (n_per_spec < 1) throw ConfigError("n_per_spec must be positive");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    io::Manifest manifest;
    manifest.task = options.task;
    manifest.base_dir = out_dir;
    std::uint64_t index = 0;
    for (const auto& base : specs) {
        for (int n = 0; n < n_per_spec; ++n, ++index) {
            SynthSpec spec = base;
            spec.seed = derive_seed(base.seed, static_cast<std::uint64_t>(n));
            const SynthDemo demo = generate_demo(spec);

            char name[32];
            std::snprintf(name, sizeof name, "demo_%04llu", static_cast<unsigned long long>(index));
            const fs::path rel(name);
            fs::create_directories(out_dir / rel, ec);
            if (ec) throw IoError("cannot create " + (out_dir / rel).string() + ": " + ec.message());

            io::ManifestEntry entry;
            entry.id = name;
            entry.gaze = rel / "gaze.csv";
            entry.ground_truth = rel / "truth.json";
            io::write_gaze_csv(out_dir / rel / "gaze.csv", demo.gaze);
            io::write_ground_truth_json(out_dir / rel / "truth.json", {entry.id, demo.boundaries});
            if (options.features == FeatureOutput::gzft) {
                entry.features = rel / "features.gzft";
                features::write_gzft(out_dir / rel / "features.gzft", demo.features);
            } else if (options.features == FeatureOutput::frames) {
                entry.frames_left = rel / "frames_left";
                entry.frames_right = rel / "frames_right";
                fs::create_directories(out_dir / *entry.frames_left);
                fs::create_directories(out_dir / *entry.frames_right);
                const auto frames = render_frames(spec, options.render);
                for (std::size_t t = 0; t < frames.left.size(); ++t) {
                    const auto ti = static_cast<Index>(t);
                    features::write_pgm(out_dir / *entry.frames_left / features::frame_filename("left", ti),
                                        frames.left[t]);
                    features::write_pgm(out_dir / *entry.frames_right / features::frame_filename("right", ti),
                                        frames.right[t]);
                }
            }
            manifest.demos.push_back(std::move(entry));
        }
    }
    const fs::path manifest_path = out_dir / "manifest.json";
    io::write_manifest(manifest_path, manifest);
    return manifest_path;
}

} // namespace gazeseg::synth
