#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "mprim/errors.hpp"
#include "mprim/skeleton.hpp"

using namespace mprim;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

Matrix3d random_rotation(std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    return q.toRotationMatrix();
}

// Sequence with identity rotations and per-joint translations from a callback.
template <typename F>
SkeletonSequence make_sequence(int n_frames, double rate, F&& pos_of) {
    SkeletonSequence seq;
    seq.rate = rate;
    seq.id = "synthetic";
    for (int k = 0; k < n_frames; ++k) {
        SkeletonSequence::Frame f;
        for (int j = 0; j < kNumJoints; ++j) f.joints[j].translation = pos_of(j, k / rate);
        seq.frames.push_back(f);
    }
    return seq;
}

nlohmann::json sequence_json(int n_frames, double rate) {
    const auto& spec = SkeletonSpec::canonical();
    nlohmann::json doc;
    doc["id"] = "t";
    doc["rate_hz"] = rate;
    doc["position_only"] = false;
    doc["frames"] = nlohmann::json::array();
    for (int k = 0; k < n_frames; ++k) {
        nlohmann::json joints;
        for (const auto& info : spec.joints())
            joints[info.name] = {{"q", {1.0, 0.0, 0.0, 0.0}}, {"t", {0.0, 0.0, 0.0}}};
        doc["frames"].push_back({{"joints", joints}});
    }
    return doc;
}

}  // namespace

TEST_CASE("canonical skeleton layout") {
    const auto& spec = SkeletonSpec::canonical();
    CHECK(spec.joints().size() == kNumJoints);
    CHECK(spec.root() == "root");
    CHECK(spec.joint_index("root") == 3);
    CHECK(spec.joints()[3].group == 2);
    for (int g = 1; g <= kNumGroups; ++g) {
        auto js = spec.group_joints(g);
        for (int j : js) CHECK(spec.joints()[j].group == g);
        CHECK(spec.group_parent(g) == js[0]);
    }
    CHECK(spec.joint_index("no-such-joint") == -1);
    CHECK_THROWS_AS(spec.group_joints(0), OutOfDomain);
    CHECK_THROWS_AS(spec.group_joints(7), OutOfDomain);
}

TEST_CASE("parse identity JSON sequence") {
    auto doc = sequence_json(2, 100.0);
    std::istringstream in(doc.dump());
    auto seq = parse_sequence(in, SequenceFormat::json);
    CHECK(seq.frames.size() == 2);
    CHECK(seq.rate == 100.0);
    for (const auto& f : seq.frames)
        for (const auto& tf : f.joints) {
            CHECK(tf.rotation.isApprox(Matrix3d::Identity(), 1e-12));
            CHECK(tf.translation.norm() == 0.0);
        }
}

TEST_CASE("parser rejects bad input") {
    SUBCASE("missing joint") {
        auto doc = sequence_json(2, 50.0);
        doc["frames"][0]["joints"].erase("head");
        std::istringstream in(doc.dump());
        CHECK_THROWS_AS(parse_sequence(in, SequenceFormat::json), MalformedInput);
    }
    SUBCASE("improper rotation, det = -1") {
        auto doc = sequence_json(2, 50.0);
        // reflection across the xy plane as a row-major matrix
        doc["frames"][0]["joints"]["head"].erase("q");
        doc["frames"][0]["joints"]["head"]["R"] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, -1.0}};
        std::istringstream in(doc.dump());
        CHECK_THROWS_AS(parse_sequence(in, SequenceFormat::json), MalformedInput);
    }
    SUBCASE("non-finite translation") {
        auto doc = sequence_json(2, 50.0);
        doc["frames"][1]["joints"]["root"]["t"][0] = "nan";
        std::istringstream in(doc.dump());
        CHECK_THROWS_AS(parse_sequence(in, SequenceFormat::json), MalformedInput);
    }
    SUBCASE("single frame") {
        auto doc = sequence_json(1, 50.0);
        std::istringstream in(doc.dump());
        CHECK_THROWS_AS(parse_sequence(in, SequenceFormat::json), MalformedInput);
    }
    SUBCASE("CSV with non-numeric field") {
        std::istringstream in(
            "frame,joint,qw,qx,qy,qz,tx,ty,tz\n"
            "1,root,1,0,0,0,abc,0,0\n");
        CHECK_THROWS_AS(parse_sequence(in, SequenceFormat::csv), MalformedInput);
    }
}

TEST_CASE("serialize then parse is the identity") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        SkeletonSequence seq;
        seq.rate = 30.0 + trial;
        seq.id = "rt" + std::to_string(trial);
        const int n = 2 + trial % 4;
        for (int k = 0; k < n; ++k) {
            SkeletonSequence::Frame f;
            for (int j = 0; j < kNumJoints; ++j) {
                f.joints[j].rotation = random_rotation(rng);
                f.joints[j].translation = Vector3d(u(rng), u(rng), u(rng));
            }
            seq.frames.push_back(f);
        }
        std::stringstream buf;
        serialize_sequence(seq, buf);
        auto back = parse_sequence(buf, SequenceFormat::json);
        REQUIRE(back.frames.size() == seq.frames.size());
        CHECK(back.rate == seq.rate);
        CHECK(back.id == seq.id);
        for (std::size_t k = 0; k < seq.frames.size(); ++k)
            for (int j = 0; j < kNumJoints; ++j) {
                CHECK(back.frames[k].joints[j].rotation.isApprox(
                    seq.frames[k].joints[j].rotation, 1e-12));
                CHECK(back.frames[k].joints[j].translation.isApprox(
                    seq.frames[k].joints[j].translation, 1e-12));
            }
    }
}

TEST_CASE("resample") {
    SUBCASE("constant pose survives any rate change") {
        auto seq = make_sequence(11, 100.0, [](int j, double) { return Vector3d(j, 0, 1); });
        auto out = resample(seq, 50.0);
        CHECK(out.rate == 50.0);
        for (const auto& f : out.frames)
            for (int j = 0; j < kNumJoints; ++j)
                CHECK((f.joints[j].translation - Vector3d(j, 0, 1)).norm() < 1e-12);
    }
    SUBCASE("linear translation is reproduced exactly") {
        auto seq = make_sequence(61, 60.0, [](int, double t) { return Vector3d(t, 2 * t, -t); });
        auto out = resample(seq, 50.0);
        for (std::size_t k = 0; k < out.frames.size(); ++k) {
            const double t = k / 50.0;
            CHECK((out.frames[k].joints[0].translation - Vector3d(t, 2 * t, -t)).norm() < 1e-9);
        }
    }
    SUBCASE("smooth translation within interpolation error") {
        auto seq = make_sequence(101, 100.0, [](int, double t) {
            return Vector3d(std::sin(2 * M_PI * t), std::cos(2 * M_PI * t), t);
        });
        auto out = resample(seq, 50.0);
        for (std::size_t k = 0; k < out.frames.size(); ++k) {
            const double t = k / 50.0;
            Vector3d truth(std::sin(2 * M_PI * t), std::cos(2 * M_PI * t), t);
            CHECK((out.frames[k].joints[5].translation - truth).norm() < 1e-4);
        }
    }
    SUBCASE("resampling at the native rate is a near no-op") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 5 + trial % 20;
            std::vector<Vector3d> pts;
            for (int k = 0; k < n; ++k) pts.emplace_back(u(rng), u(rng), u(rng));
            auto seq = make_sequence(n, 40.0, [&](int, double t) {
                return pts[std::lround(t * 40.0)];
            });
            auto out = resample(seq, 40.0);
            REQUIRE(out.frames.size() == seq.frames.size());
            for (int k = 0; k < n; ++k)
                CHECK((out.frames[k].joints[0].translation - pts[k]).norm() < 1e-9);
        }
    }
}

TEST_CASE("root-sequence normalization") {
    const auto& spec = SkeletonSpec::canonical();

    SUBCASE("identity sequence stays identity") {
        auto seq = make_sequence(5, 50.0, [](int, double) { return Vector3d::Zero(); });
        auto out = root_sequence_normalize(seq);
        for (const auto& f : out.frames)
            for (const auto& tf : f.joints) {
                CHECK(tf.rotation.isApprox(Matrix3d::Identity(), 1e-12));
                CHECK(tf.translation.norm() < 1e-12);
            }
    }
    SUBCASE("matches the explicit 4x4 product") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            SkeletonSequence seq;
            seq.rate = 50.0;
            for (int k = 0; k < 3; ++k) {
                SkeletonSequence::Frame f;
                for (int j = 0; j < kNumJoints; ++j) {
                    f.joints[j].rotation = random_rotation(rng);
                    f.joints[j].translation = Vector3d(u(rng), u(rng), u(rng));
                }
                seq.frames.push_back(f);
            }
            auto out = root_sequence_normalize(seq);
            auto hom = [](const Se3Transform& tf) {
                Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
                m.block<3, 3>(0, 0) = tf.rotation;
                m.block<3, 1>(0, 3) = tf.translation;
                return m;
            };
            const int root = spec.joint_index(spec.root());
            for (std::size_t k = 0; k < seq.frames.size(); ++k)
                for (int j = 0; j < kNumJoints; ++j) {
                    const int parent = spec.joint_index(spec.joints()[j].parent);
                    Eigen::Matrix4d expect =
                        hom(seq.frames[0].joints[root]).inverse() *
                        hom(seq.frames[0].joints[parent]) *
                        hom(seq.frames[k].joints[parent]).inverse() *
                        hom(seq.frames[k].joints[j]);
                    Eigen::Matrix4d got = hom(out.frames[k].joints[j]);
                    CHECK((got - expect).norm() < 1e-9);
                }
        }
    }
    SUBCASE("position-only input is rejected") {
        auto seq = make_sequence(3, 50.0, [](int j, double t) { return Vector3d(j * t, 0, 0); });
        seq.position_only = true;
        CHECK_THROWS_AS(root_sequence_normalize(seq), PositionOnlyInput);
        auto out = position_normalize(seq);
        const int root = spec.joint_index(spec.root());
        CHECK(out.frames[0].joints[root].translation.norm() < 1e-12);
    }
    SUBCASE("idempotent on already-normalized identity-root data") {
        auto seq = make_sequence(4, 50.0, [](int, double) { return Vector3d::Zero(); });
        auto once = root_sequence_normalize(seq);
        auto twice = root_sequence_normalize(once);
        for (std::size_t k = 0; k < once.frames.size(); ++k)
            for (int j = 0; j < kNumJoints; ++j)
                CHECK((twice.frames[k].joints[j].translation -
                       once.frames[k].joints[j].translation)
                          .norm() < 1e-12);
    }
}

TEST_CASE("group position series") {
    auto seq = make_sequence(10, 50.0, [](int j, double t) { return Vector3d(j + t, t, 0); });
    auto series = group_positions(seq, 3);
    const auto& spec = SkeletonSpec::canonical();
    auto js = spec.group_joints(3);
    for (int i = 0; i < kJointsPerGroup; ++i) {
        REQUIRE(series[i].times.size() == 10);
        for (int k = 0; k < 10; ++k) {
            const double t = k / 50.0;
            CHECK(series[i].times[k] == doctest::Approx(t));
            CHECK((series[i].points[k] - Vector3d(js[i] + t, t, 0)).norm() < 1e-12);
        }
    }
    CHECK_THROWS_AS(group_positions(seq, 0), OutOfDomain);
}
