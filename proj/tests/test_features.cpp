#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mprim/errors.hpp"
#include "mprim/features.hpp"

using namespace mprim;
using Eigen::Vector3d;

namespace {

std::vector<CurvePoint> points_on_line(int n) {
    std::vector<CurvePoint> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = {Vector3d(i, 2.0 * i, -i), 0.1 * i, 0.01 * i};
    return pts;
}

}  // namespace

TEST_CASE("window extraction") {
    SUBCASE("3 points give exactly one vector with unit window count") {
        auto f = extract_features(points_on_line(3), 0.0);
        REQUIRE(f.size() == 1);
        CHECK(f[0][kCountIndicator] == doctest::Approx(1.0));
    }
    SUBCASE("5 points give 3 stride-1 windows") {
        auto f = extract_features(points_on_line(5), 2.0);
        REQUIRE(f.size() == 3);
        for (const auto& v : f) {
            CHECK(v[kIndexIndicator] == doctest::Approx(2.0));
            CHECK(v[kCountIndicator] == doctest::Approx(3.0));
        }
    }
    SUBCASE("window layout: coordinates then curvatures then torsions") {
        auto pts = points_on_line(4);
        auto f = extract_features(pts, 1.0);
        REQUIRE(f.size() == 2);
        // second window covers points 1..3
        for (int w = 0; w < 3; ++w) {
            const auto& p = pts[1 + w];
            CHECK(f[1][3 * w + 0] == doctest::Approx(p.p.x()));
            CHECK(f[1][3 * w + 1] == doctest::Approx(p.p.y()));
            CHECK(f[1][3 * w + 2] == doctest::Approx(p.p.z()));
            CHECK(f[1][9 + w] == doctest::Approx(p.kappa));
            CHECK(f[1][12 + w] == doctest::Approx(p.tau));
        }
    }
    SUBCASE("fewer than 3 points is an error") {
        CHECK_THROWS_AS(extract_features(points_on_line(2), 0.0), TooShort);
    }
}

TEST_CASE("indicator normalization") {
    Bounds b{2.0, 6.0};
    CHECK(normalize_indicator(2.0, b) == doctest::Approx(0.0));
    CHECK(normalize_indicator(6.0, b) == doctest::Approx(1.0));
    CHECK(normalize_indicator(4.0, b) == doctest::Approx(0.5));
    CHECK(normalize_indicator(3.0, Bounds{3.0, 3.0}) == doctest::Approx(0.0));

    CHECK(denormalize_indicator(0.0, Bounds{5.0, 9.0}) == 5);
    CHECK(denormalize_indicator(0.5, Bounds{1.0, 37.0}) == 19);

    SUBCASE("round trip over 100 random bounds") {
        std::mt19937 rng(11);
        std::uniform_int_distribution<int> lo(0, 50), span(1, 200);
        for (int i = 0; i < 100; ++i) {
            Bounds bb{double(lo(rng)), 0.0};
            bb.max = bb.min + span(rng);
            std::uniform_int_distribution<long> v(long(bb.min), long(bb.max));
            const long raw = v(rng);
            CHECK(denormalize_indicator(normalize_indicator(raw, bb), bb) == raw);
        }
    }
}

TEST_CASE("feature set assembly") {
    SUBCASE("bounds cover the enumeration and the recovery is exact") {
        std::mt19937 rng(13);
        std::uniform_int_distribution<int> npts(3, 12), ntraj(1, 8);
        for (int trial = 0; trial < 100; ++trial) {
            const int m = ntraj(rng);
            std::vector<std::vector<FeatureVector>> per_traj;
            std::vector<int> window_counts;
            for (int nu = 0; nu < m; ++nu) {
                const int n = npts(rng);
                per_traj.push_back(extract_features(points_on_line(n), nu));
                window_counts.push_back(n - 2);
            }
            auto fs = build_feature_set(per_traj, 4);
            CHECK(fs.group == 4);
            std::size_t total = 0;
            for (int c : window_counts) total += c;
            REQUIRE(fs.features.size() == total);

            std::size_t at = 0;
            for (int nu = 0; nu < m; ++nu)
                for (int w = 0; w < window_counts[nu]; ++w, ++at) {
                    const auto& v = fs.features[at];
                    CHECK(denormalize_indicator(v[kIndexIndicator], fs.index_bounds) == nu);
                    CHECK(denormalize_indicator(v[kCountIndicator], fs.count_bounds) ==
                          window_counts[nu]);
                    CHECK(v[kIndexIndicator] >= 0.0);
                    CHECK(v[kIndexIndicator] <= 1.0);
                    CHECK(v[kCountIndicator] >= 0.0);
                    CHECK(v[kCountIndicator] <= 1.0);
                }
        }
    }
    SUBCASE("empty collection gives an empty set") {
        auto fs = build_feature_set({}, 1);
        CHECK(fs.features.empty());
    }
}

TEST_CASE("sampling and decimation of a trajectory") {
    std::vector<double> ts;
    std::vector<Vector3d> ps;
    for (int i = 0; i <= 100; ++i) {
        const double t = i / 50.0;
        ts.push_back(t);
        ps.emplace_back(std::cos(t), std::sin(t), 0.1 * t);
    }
    SplineTrajectory traj(ts, ps);

    auto pts = sample_and_decimate(traj, 50.0, 5);
    // 101 samples at 50 Hz over [0,2]: indices 0,5,...,100
    REQUIRE(pts.size() == 21);
    CHECK((pts[0].p - ps[0]).norm() < 1e-9);
    CHECK((pts.back().p - ps.back()).norm() < 1e-9);
    // unit-radius circle in a gentle helix: curvature near 1
    CHECK(pts[10].kappa == doctest::Approx(1.0).epsilon(0.05));
}
