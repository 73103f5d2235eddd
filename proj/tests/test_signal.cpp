#include <doctest.h>

#include "gazeseg/signal.hpp"
#include "gazeseg/synth.hpp"
#include "oracles.hpp"

#include <numbers>
#include <random>

using namespace gazeseg;

namespace {

GazeSeries series_from_left_x(const std::vector<double>& xs) {
    GazeMatrix<double> m = GazeMatrix<double>::Zero(static_cast<Index>(xs.size()), 4);
    for (std::size_t i = 0; i < xs.size(); ++i) m(static_cast<Index>(i), 0) = xs[i];
    return GazeSeries(m);
}

FeatureSeries two_frames(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::MatrixXd m(2, a.size());
    m.row(0) = a.transpose();
    m.row(1) = b.transpose();
    return FeatureSeries(m, m);
}

} // namespace

TEST_CASE("median_filter leaves a constant series unchanged") {
    GazeMatrix<double> m = GazeMatrix<double>::Constant(4, 4, 5.0);
    for (int w : {2, 4, 6, 20}) CHECK(median_filter(GazeSeries(m), w).matrix() == m);
}

TEST_CASE("median_filter removes an isolated outlier") {
    const std::vector<double> xs{0, 0, 0, 100, 0, 0, 0};
    const auto expected = oracle::window_median(xs, 4);
    for (double v : expected) REQUIRE(v == 0.0);
    const auto f = median_filter(series_from_left_x(xs), 4);
    for (Index t = 0; t < f.size(); ++t) CHECK(f.matrix()(t, 0) == 0.0);
}

TEST_CASE("median_filter window and edge handling") {
    // Edge windows shrink: index 0 with w=4 sees {1, 2, 3} -> 2; with w=2 sees {1, 2} -> 1.5.
    const std::vector<double> xs{1, 2, 3, 10, 20};
    CHECK(median_filter(series_from_left_x(xs), 4).matrix()(0, 0) == 2.0);
    CHECK(median_filter(series_from_left_x(xs), 2).matrix()(0, 0) == 1.5);
    CHECK(median_filter(series_from_left_x(xs), 2).matrix()(4, 0) == 15.0);
    CHECK_THROWS_AS(median_filter(series_from_left_x(xs), 1), ConfigError);
    CHECK(median_filter(series_from_left_x(xs), 20).size() == 5);
}

TEST_CASE("median_filter matches the naive oracle on random series") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> len(2, 80), win(2, 30);
    std::normal_distribution<double> val(0.0, 50.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = len(rng), w = win(rng);
        GazeMatrix<double> m(n, 4);
        for (Index i = 0; i < m.size(); ++i) m.data()[i] = std::round(val(rng));
        const auto f = median_filter(GazeSeries(m), w);
        for (int c = 0; c < 4; ++c) {
            std::vector<double> col(static_cast<std::size_t>(n));
            for (int t = 0; t < n; ++t) col[static_cast<std::size_t>(t)] = m(t, c);
            const auto ref = oracle::window_median(col, w);
            for (int t = 0; t < n; ++t) REQUIRE(f.matrix()(t, c) == ref[static_cast<std::size_t>(t)]);
        }
    }
}

TEST_CASE("median_filter is idempotent on its fixed points") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        // Piecewise-constant series with long plateaus are fixed points.
        GazeMatrix<double> m(60, 4);
        double level = 0.0;
        for (Index t = 0; t < 60; ++t) {
            if (t % 20 == 0) level = std::uniform_real_distribution<>(-300, 300)(rng);
            m.row(t).setConstant(level);
        }
        const auto once = median_filter(GazeSeries(m), 10);
        if (once.matrix() == m) CHECK(median_filter(once, 10).matrix() == once.matrix());
    }
}

TEST_CASE("median_filter works on Eigen expressions in float") {
    Eigen::MatrixXf x(5, 1);
    x << 1, 9, 1, 9, 1;
    const Eigen::MatrixXf f = median_filter(x * 2.0f, 4);
    CHECK(f(2, 0) == doctest::Approx(2.0f));
}

TEST_CASE("score_pos") {
    GazeMatrix<double> m = GazeMatrix<double>::Zero(3, 4);
    m.row(2) << 3, 4, 0, 0;
    const auto s = score_pos(GazeSeries(m));
    REQUIRE(s.size() == 3);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 5.0);
}

TEST_CASE("score_pos spike for a 120 px jump in both eyes' x") {
    synth::SynthSpec spec;
    spec.noise_sigma = 0.0;
    synth::Landmark a, b;
    a.position << 300, 300, 310, 300;
    b.position << 420, 300, 430, 300;
    a.dwell_steps = b.dwell_steps = 40;
    spec.landmarks = {a, b};
    const auto demo = synth::generate_demo(spec);
    const auto s = score_pos(median_filter(demo.gaze, 20));
    Index peak = 0;
    const double max = s.maxCoeff(&peak);
    CHECK(peak == 40);
    CHECK(max == doctest::Approx(120.0 * std::numbers::sqrt2).epsilon(1e-12));
    CHECK((s.array() > 0.0).count() == 1);
}

TEST_CASE("score_pos is translation invariant") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> val(0.0, 100.0);
    for (int trial = 0; trial < 1000; ++trial) {
        GazeMatrix<double> m(30, 4);
        for (Index i = 0; i < m.size(); ++i) m.data()[i] = val(rng);
        Eigen::RowVector4d offset(val(rng), val(rng), val(rng), val(rng));
        GazeMatrix<double> shifted = m.rowwise() + offset;
        const auto a = score_pos(GazeSeries(m));
        const auto b = score_pos(GazeSeries(shifted));
        REQUIRE((a - b).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("normalize_features") {
    Eigen::MatrixXd m(2, 2);
    m << 3, 4, 0.6, 0.8;
    const auto n = normalize_features(FeatureSeries(m, m));
    CHECK(n.left()(0, 0) == doctest::Approx(0.6));
    CHECK(n.left()(0, 1) == doctest::Approx(0.8));
    CHECK((n.left().row(1) - m.row(1)).cwiseAbs().maxCoeff() < 1e-9);

    Eigen::MatrixXd zero = m;
    zero.row(1).setZero();
    CHECK_THROWS_WITH_AS(normalize_features(FeatureSeries(m, zero), "demo_7"),
                         doctest::Contains("step 1"), ValidationError);
    CHECK_THROWS_WITH_AS(normalize_features(FeatureSeries(m, zero), "demo_7"),
                         doctest::Contains("demo_7"), ValidationError);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> val;
    Eigen::MatrixXd big(20, 512);
    for (Index i = 0; i < big.size(); ++i) big.data()[i] = val(rng);
    const auto nb = normalize_features(FeatureSeries(big, big));
    CHECK(nb.is_normalized(1e-6));
}

TEST_CASE("score_feat anchors") {
    const Eigen::Vector2d u(0.6, 0.8), v(-0.8, 0.6);
    CHECK(score_feat(two_frames(u, u))[1] == 0.0);
    CHECK(score_feat(two_frames(u, v))[1] == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    CHECK(std::abs(score_feat(two_frames(u, -u))[1] - 21.416413017506354) < 1e-9);
    CHECK(score_feat(two_frames(u, u))[0] == 0.0);
}

TEST_CASE("score_feat matches the scalar formula and is non-negative on unit vectors") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> val;
    std::uniform_int_distribution<int> dim(1, 16);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = dim(rng);
        Eigen::MatrixXd l(6, d), r(6, d);
        for (Index i = 0; i < l.size(); ++i) {
            l.data()[i] = val(rng);
            r.data()[i] = val(rng);
        }
        // Occasionally repeat or negate a frame to hit the fixed point and the clamp.
        if (trial % 7 == 0) l.row(2) = l.row(1);
        if (trial % 11 == 0) r.row(4) = -r.row(3);
        const auto f = normalize_features(FeatureSeries(l, r));
        const auto s = score_feat(f);
        REQUIRE(s.size() == 6);
        CHECK(s[0] == 0.0);
        for (Index t = 1; t < 6; ++t) {
            std::vector<double> l0(static_cast<std::size_t>(d)), l1(l0), r0(l0), r1(l0);
            for (int k = 0; k < d; ++k) {
                l0[k] = f.left()(t - 1, k);
                l1[k] = f.left()(t, k);
                r0[k] = f.right()(t - 1, k);
                r1[k] = f.right()(t, k);
            }
            REQUIRE(s[t] >= 0.0);
            // Near-antipodal frames amplify last-bit differences in the inner product.
            CHECK(s[t] == doctest::Approx(oracle::feat_score(l0, l1, r0, r1)).epsilon(1e-9));
        }
    }
}

TEST_CASE("identical normalized frames score exactly zero") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> val;
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::MatrixXd m(3, 1 + trial % 40);
        for (Index i = 0; i < m.size(); ++i) m.data()[i] = val(rng);
        m.row(1) = m.row(0);
        const auto s = score_feat(normalize_features(FeatureSeries(m, m)));
        REQUIRE(s[1] == 0.0);
    }
}

TEST_CASE("score_feat rejects mismatched shapes") {
    CHECK_THROWS_AS(feature_scores(Eigen::MatrixXd::Ones(3, 2), Eigen::MatrixXd::Ones(3, 3)), ValidationError);
}

TEST_CASE("compute_scores without features yields zero s_feat") {
    GazeMatrix<double> m = GazeMatrix<double>::Zero(5, 4);
    m.row(3) << 1, 1, 1, 1;
    const auto sc = compute_scores(GazeSeries(m), nullptr);
    CHECK(sc.feat().isZero());
    CHECK(sc.pos()[3] == 2.0);
    const FeatureSeries short_f(Eigen::MatrixXd::Ones(4, 2), Eigen::MatrixXd::Ones(4, 2));
    CHECK_THROWS_AS(compute_scores(GazeSeries(m), &short_f), ValidationError);
}
