#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "mprim/classes.hpp"
#include "mprim/errors.hpp"

using namespace mprim;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

// Feature set with n_prims trajectories whose windows sit at prescribed
// centers; indicators already normalized the way build_feature_set does it.
FeatureSet make_feature_set(const std::vector<std::vector<double>>& centers_per_prim) {
    std::vector<std::vector<FeatureVector>> per_traj;
    for (std::size_t nu = 0; nu < centers_per_prim.size(); ++nu) {
        std::vector<FeatureVector> fv;
        const int n_windows = static_cast<int>(centers_per_prim[nu].size());
        for (double c : centers_per_prim[nu]) {
            FeatureVector f = FeatureVector::Zero();
            for (int i = 0; i < 15; ++i) f[i] = c;
            f[kIndexIndicator] = static_cast<double>(nu);
            f[kCountIndicator] = static_cast<double>(n_windows);
            fv.push_back(f);
        }
        per_traj.push_back(fv);
    }
    return build_feature_set(per_traj, 2);
}

// Two-component model with unit covariances at scalar centers a and b
// (replicated across all 17 coordinates).
DpmModel two_component_model(double a, double b) {
    DpmModel model;
    model.alpha = 1.0;
    for (double c : {a, b}) {
        DpmComponent comp;
        comp.weight = 0.5;
        comp.mean = VectorXd::Constant(kFeatureDim, c);
        for (int i = 15; i < kFeatureDim; ++i) comp.mean[i] = 0.5;
        comp.cov = MatrixXd::Identity(kFeatureDim, kFeatureDim);
        model.components.push_back(comp);
    }
    return model;
}

}  // namespace

TEST_CASE("indicator provenance") {
    auto fs = make_feature_set({{0.0, 0.0, 0.0}, {1.0, 1.0}, {2.0}});
    auto prov = recover_provenance(fs, 3);
    REQUIRE(prov.trajectory_of.size() == 6);
    const int want_traj[] = {0, 0, 0, 1, 1, 2};
    const int want_count[] = {3, 3, 3, 2, 2, 1};
    for (int i = 0; i < 6; ++i) {
        CHECK(prov.trajectory_of[i] == want_traj[i]);
        CHECK(prov.count_of[i] == want_count[i]);
    }
    CHECK_THROWS_AS(recover_provenance(fs, 2), InconsistentIndicators);
}

TEST_CASE("component membership rule") {
    SUBCASE("unanimous features assign the primitive") {
        auto fs = make_feature_set({{0.0, 0.0, 0.0, 0.0, 0.0}, {8.0, 8.0, 8.0, 8.0, 8.0}});
        auto model = two_component_model(0.0, 8.0);
        auto classes = classes_from_components(model, fs, 2, 2);
        REQUIRE(classes.size() == 2);
        CHECK(classes[0].component == 0);
        CHECK(classes[0].members == std::vector<int>{0});
        CHECK(classes[1].members == std::vector<int>{1});
        CHECK(classes[0].group == 2);
        CHECK(classes[0].representative == 0);
    }
    SUBCASE("a share of exactly 80% still assigns") {
        // 4 of 5 windows at component 0, 1 window at component 1
        auto fs = make_feature_set({{0.0, 0.0, 0.0, 0.0, 8.0}});
        auto model = two_component_model(0.0, 8.0);
        auto classes = classes_from_components(model, fs, 1, 2);
        REQUIRE(classes.size() == 1);
        CHECK(classes[0].component == 0);
        CHECK(classes[0].members == std::vector<int>{0});
    }
    SUBCASE("a 50/50 split assigns nowhere") {
        auto fs = make_feature_set({{0.0, 0.0, 8.0, 8.0}});
        auto model = two_component_model(0.0, 8.0);
        auto classes = classes_from_components(model, fs, 1, 2);
        CHECK(classes.empty());
    }
    SUBCASE("classes are disjoint over random feature sets") {
        std::mt19937 rng(19);
        std::uniform_int_distribution<int> n_prims(1, 8), n_win(1, 6);
        std::bernoulli_distribution side(0.5);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::vector<double>> centers;
            const int m = n_prims(rng);
            for (int p = 0; p < m; ++p) {
                std::vector<double> c;
                const int w = n_win(rng);
                for (int i = 0; i < w; ++i) c.push_back(side(rng) ? 8.0 : 0.0);
                centers.push_back(c);
            }
            auto fs = make_feature_set(centers);
            auto model = two_component_model(0.0, 8.0);
            auto classes = classes_from_components(model, fs, m, 2);
            std::vector<char> seen(m, 0);
            for (const auto& cls : classes)
                for (int member : cls.members) {
                    CHECK(!seen[member]);
                    seen[member] = 1;
                }
        }
    }
}

TEST_CASE("class representative") {
    // three members; member 1's features sit exactly on the component mean
    auto fs = make_feature_set({{1.5, 1.5}, {0.0, 0.0}, {2.5, 2.5}});
    auto model = two_component_model(0.0, 50.0);
    auto prov = recover_provenance(fs, 3);
    PrimitiveClass cls;
    cls.group = 2;
    cls.component = 0;
    cls.members = {0, 1, 2};
    CHECK(class_representative(cls, model, fs, prov) == 1);

    PrimitiveClass empty;
    CHECK_THROWS_AS(class_representative(empty, model, fs, prov), EmptyClass);
}

TEST_CASE("hausdorff distance") {
    SUBCASE("identical sets and single points") {
        std::vector<Vector3d> a = {{0, 0, 0}, {1, 0, 0}};
        CHECK(hausdorff(a, a) == doctest::Approx(0.0));
        CHECK(hausdorff({Vector3d(0, 0, 0)}, {Vector3d(3, 4, 0)}) == doctest::Approx(5.0));
    }
    SUBCASE("symmetry and brute-force agreement over 100 random pairs") {
        std::mt19937 rng(29);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::uniform_int_distribution<int> count(1, 12);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<Vector3d> a, b;
            for (int i = count(rng); i > 0; --i) a.emplace_back(u(rng), u(rng), u(rng));
            for (int i = count(rng); i > 0; --i) b.emplace_back(u(rng), u(rng), u(rng));
            double d_ab = 0, d_ba = 0;
            for (const auto& p : a) {
                double best = 1e300;
                for (const auto& q : b) best = std::min(best, (p - q).norm());
                d_ab = std::max(d_ab, best);
            }
            for (const auto& q : b) {
                double best = 1e300;
                for (const auto& p : a) best = std::min(best, (p - q).norm());
                d_ba = std::max(d_ba, best);
            }
            const double want = std::max(d_ab, d_ba);
            CHECK(hausdorff(a, b) == doctest::Approx(want).epsilon(1e-12));
            CHECK(hausdorff(b, a) == doctest::Approx(hausdorff(a, b)).epsilon(1e-12));
        }
    }
    SUBCASE("empty sets throw") {
        CHECK_THROWS_AS(hausdorff({}, {Vector3d::Zero()}), EmptyData);
    }
}

TEST_CASE("label files") {
    SUBCASE("parse and apply, last entry wins") {
        std::istringstream in(
            "group,class_index,label\n"
            "2,0,wave\n"
            "2,1,reach\n"
            "2,0,salute\n");
        auto labels = read_label_csv(in);
        REQUIRE(labels.size() == 3);

        std::vector<PrimitiveClass> classes(2);
        classes[0].group = 2;
        classes[0].component = 0;
        classes[1].group = 2;
        classes[1].component = 1;
        apply_labels(classes, labels);
        CHECK(classes[0].label == "salute");
        CHECK(classes[1].label == "reach");
    }
    SUBCASE("unknown class reference throws") {
        std::vector<PrimitiveClass> classes(1);
        classes[0].group = 2;
        classes[0].component = 0;
        CHECK_THROWS_AS(apply_labels(classes, {{2, 5, "x"}}), UnknownClassRef);
        CHECK_THROWS_AS(apply_labels(classes, {{3, 0, "x"}}), UnknownClassRef);
    }
    SUBCASE("empty file applies no labels") {
        std::istringstream in("group,class_index,label\n");
        CHECK(read_label_csv(in).empty());
    }
    SUBCASE("malformed rows throw") {
        std::istringstream in("group,class_index,label\n2,zero,wave\n");
        CHECK_THROWS_AS(read_label_csv(in), MalformedInput);
    }
}
