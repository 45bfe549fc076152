#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "mprim/behavior.hpp"
#include "mprim/errors.hpp"

using namespace mprim;

namespace {

std::vector<std::string> label_vocabulary(int n) {
    std::vector<std::string> v = {kNoPrimitiveLabel};
    for (int i = 0; i < n - 1; ++i) v.push_back("prim-" + std::to_string(i));
    return v;
}

// linearly separable corpus in the first embedding coordinate
std::vector<BehaviorSample> separable_corpus(int per_class, std::uint64_t seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 0.05);
    std::vector<BehaviorSample> out;
    for (int i = 0; i < per_class; ++i) {
        BehaviorSample pos, neg;
        for (int d = 0; d < 6; ++d) {
            pos.x[d] = 0.8 + g(rng);
            neg.x[d] = 0.2 + g(rng);
        }
        pos.y = 1;
        neg.y = -1;
        out.push_back(pos);
        out.push_back(neg);
    }
    return out;
}

}  // namespace

TEST_CASE("primitive embedding") {
    auto vocab = label_vocabulary(69);

    SUBCASE("deterministic, injective, inside the open unit interval") {
        auto e1 = PrimitiveEmbedding::build(vocab, 12);
        auto e2 = PrimitiveEmbedding::build(vocab, 12);
        REQUIRE(e1.map().size() == vocab.size());
        std::set<double> values;
        for (const auto& [label, v] : e1.map()) {
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            CHECK(e2.at(label) == v);
            values.insert(v);
        }
        CHECK(values.size() == vocab.size());
    }
    SUBCASE("different seeds give different embeddings") {
        auto e1 = PrimitiveEmbedding::build(vocab, 1);
        auto e2 = PrimitiveEmbedding::build(vocab, 2);
        int differing = 0;
        for (const auto& [label, v] : e1.map())
            if (e2.at(label) != v) ++differing;
        CHECK(differing > 0);
    }
    SUBCASE("unknown label and empty vocabulary throw") {
        auto e = PrimitiveEmbedding::build(vocab, 0);
        CHECK_THROWS_AS(e.at("never-seen"), UnknownClassRef);
        CHECK_THROWS_AS(PrimitiveEmbedding::build({}, 0), EmptyData);
    }
    SUBCASE("round trip through the serialized map") {
        auto e = PrimitiveEmbedding::build(vocab, 5);
        auto back = PrimitiveEmbedding::from_map(e.map());
        for (const auto& [label, v] : e.map()) CHECK(back.at(label) == v);
    }
}

TEST_CASE("timeline to samples") {
    auto embedding = PrimitiveEmbedding::build({kNoPrimitiveLabel, "a", "b"}, 3);
    PrimitiveTimeline tl;
    tl.subject = 4;

    std::array<std::string, 6> rest;
    rest.fill(kNoPrimitiveLabel);

    SUBCASE("a constant timeline emits exactly the first frame") {
        tl.frames.assign(10, rest);
        auto samples = frames_to_samples({tl}, embedding, -1);
        REQUIRE(samples.size() == 1);
        CHECK(samples[0].frame == 0);
        CHECK(samples[0].subject == 4);
        CHECK(samples[0].y == -1);
        for (int d = 0; d < 6; ++d)
            CHECK(samples[0].x[d] == doctest::Approx(embedding.at(kNoPrimitiveLabel)));
    }
    SUBCASE("each change emits one sample") {
        tl.frames.assign(20, rest);
        auto active = rest;
        active[2] = "a";
        for (int k = 10; k < 20; ++k) tl.frames[k] = active;
        auto samples = frames_to_samples({tl}, embedding, 1);
        REQUIRE(samples.size() == 2);
        CHECK(samples[1].frame == 10);
        CHECK(samples[1].x[2] == doctest::Approx(embedding.at("a")));
        CHECK(samples[1].x[0] == doctest::Approx(embedding.at(kNoPrimitiveLabel)));
    }
    SUBCASE("three changes give four samples") {
        tl.frames.assign(8, rest);
        for (int change : {2, 4, 6}) {
            auto f = rest;
            f[change % 6] = (change % 2) ? "a" : "b";
            for (std::size_t k = change; k < tl.frames.size(); ++k) tl.frames[k] = f;
        }
        auto samples = frames_to_samples({tl}, embedding, 1);
        CHECK(samples.size() == 4);
    }
}

TEST_CASE("SVM training") {
    SvmOptions opts;
    opts.seed = 3;

    SUBCASE("separable data trains to zero error") {
        auto samples = separable_corpus(40, 17);
        auto model = train_svm(samples, opts);
        for (const auto& s : samples)
            CHECK(model.decision(s.x) * s.y > 0.0);
    }
    SUBCASE("XOR needs the kernel and still fits") {
        std::vector<BehaviorSample> xs(4);
        const double lo = 0.2, hi = 0.8;
        const double grid[4][2] = {{lo, lo}, {lo, hi}, {hi, lo}, {hi, hi}};
        for (int i = 0; i < 4; ++i) {
            xs[i].x.setConstant(0.5);
            xs[i].x[0] = grid[i][0];
            xs[i].x[1] = grid[i][1];
            xs[i].y = (grid[i][0] < 0.5) == (grid[i][1] < 0.5) ? 1 : -1;
        }
        SvmOptions xor_opts = opts;
        xor_opts.eta_k = 1.0;
        xor_opts.lambda = 10.0;
        auto model = train_svm(xs, xor_opts);
        for (const auto& s : xs) CHECK(model.decision(s.x) * s.y > 0.0);
    }
    SUBCASE("dual constraints hold") {
        auto samples = separable_corpus(25, 23);
        auto model = train_svm(samples, opts);
        double sum = 0.0;
        for (double c : model.coefficients) {
            sum += c;
            CHECK(std::abs(c) <= opts.lambda + 1e-9);
        }
        CHECK(std::abs(sum) < 1e-6);
    }
    SUBCASE("duplicating every sample leaves the decision sign unchanged") {
        auto samples = separable_corpus(15, 29);
        auto doubled = samples;
        doubled.insert(doubled.end(), samples.begin(), samples.end());
        auto m1 = train_svm(samples, opts);
        auto m2 = train_svm(doubled, opts);
        for (const auto& s : samples)
            CHECK(m1.decision(s.x) * m2.decision(s.x) > 0.0);
    }
    SUBCASE("one-class data throws") {
        auto samples = separable_corpus(10, 31);
        for (auto& s : samples) s.y = 1;
        CHECK_THROWS_AS(train_svm(samples, opts), SingleClassData);
    }
}

TEST_CASE("Platt calibration") {
    SUBCASE("recovers a generative sigmoid within 10%") {
        const double a0 = -2.0, b0 = 0.5;
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> score(-4.0, 4.0);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < 10000; ++i) {
            const double s = score(rng);
            const double p = 1.0 / (1.0 + std::exp(a0 * s + b0));
            scores.push_back(s);
            labels.push_back(coin(rng) < p ? 1 : -1);
        }
        auto cal = platt_fit(scores, labels);
        CHECK(std::abs(cal.a - a0) < 0.1 * std::abs(a0));
        CHECK(std::abs(cal.b - b0) < 0.1 * std::abs(b0));
    }
    SUBCASE("probabilities are monotone in the score for a negative slope") {
        PlattCalibrator cal{-1.5, 0.2};
        double prev = cal.probability(-5.0);
        for (double s = -4.5; s <= 5.0; s += 0.5) {
            const double p = cal.probability(s);
            CHECK(p > prev);
            CHECK(p > 0.0);
            CHECK(p < 1.0);
            prev = p;
        }
    }
    SUBCASE("degenerate inputs throw") {
        CHECK_THROWS_AS(platt_fit({1.0, 1.0, 1.0}, {1, -1, 1}), DegenerateScores);
        CHECK_THROWS_AS(platt_fit({1.0, NAN}, {1, -1}), DegenerateScores);
        CHECK_THROWS_AS(platt_fit({0.5, 1.5}, {1, 1}), SingleClassData);
        CHECK_THROWS_AS(platt_fit({0.5}, {1, -1}), DimensionMismatch);
    }
}

TEST_CASE("danger probability") {
    PlattCalibrator cal{-2.0, 0.1};

    SUBCASE("a single subject is exactly its calibrated probability") {
        for (double s : {-2.0, -0.3, 0.0, 0.7, 3.1})
            CHECK(danger_probability({s}, cal) == cal.probability(s));
    }
    SUBCASE("equal scores average uniformly") {
        const double s = 0.8;
        CHECK(danger_probability({s, s, s}, cal) == doctest::Approx(cal.probability(s)));
    }
    SUBCASE("bounded and permutation invariant") {
        std::mt19937 rng(47);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> scores;
            for (int i = 0; i < 2 + trial % 5; ++i) scores.push_back(u(rng));
            const double p = danger_probability(scores, cal);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            auto shuffled = scores;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            CHECK(danger_probability(shuffled, cal) == doctest::Approx(p).epsilon(1e-12));
        }
    }
    SUBCASE("weights favor the dangerous subject") {
        // one high-risk subject among low-risk ones pulls the blend above the mean
        const double risky = 2.5, calm = -2.5;
        const double blend = danger_probability({risky, calm, calm}, cal);
        const double mean =
            (cal.probability(risky) + 2 * cal.probability(calm)) / 3.0;
        CHECK(blend > mean);
    }
    SUBCASE("no subjects throws") {
        CHECK_THROWS_AS(danger_probability({}, cal), EmptyData);
    }
}

TEST_CASE("ROC analysis") {
    SUBCASE("perfect separation scores unit area") {
        std::vector<double> p = {0.1, 0.2, 0.8, 0.9};
        std::vector<int> y = {-1, -1, 1, 1};
        auto roc = roc_auc(p, y);
        CHECK(roc.auc == doctest::Approx(1.0));
        CHECK(roc.points.front().tpr == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(roc.points.back().fpr == doctest::Approx(1.0));
    }
    SUBCASE("random labels sit near half") {
        std::mt19937 rng(53);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::bernoulli_distribution coin(0.5);
        std::vector<double> p;
        std::vector<int> y;
        for (int i = 0; i < 10000; ++i) {
            p.push_back(u(rng));
            y.push_back(coin(rng) ? 1 : -1);
        }
        auto roc = roc_auc(p, y);
        CHECK(std::abs(roc.auc - 0.5) < 0.02);
    }
    SUBCASE("one-class labels throw") {
        CHECK_THROWS_AS(roc_auc({0.2, 0.4}, {1, 1}), SingleClassData);
    }
}

TEST_CASE("model and sample persistence") {
    SUBCASE("behavior model round trip") {
        auto samples = separable_corpus(30, 59);
        SvmOptions opts;
        auto svm = train_svm(samples, opts);
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& s : samples) {
            scores.push_back(svm.decision(s.x));
            labels.push_back(s.y);
        }
        BehaviorModel model;
        model.svm = svm;
        model.platt = platt_fit(scores, labels);
        model.embedding = PrimitiveEmbedding::build(label_vocabulary(10), 1);

        std::stringstream buf;
        serialize_behavior_model(model, buf);
        auto back = parse_behavior_model(buf);
        CHECK(back.platt.a == doctest::Approx(model.platt.a));
        CHECK(back.platt.b == doctest::Approx(model.platt.b));
        REQUIRE(back.svm.support_vectors.size() == model.svm.support_vectors.size());
        for (const auto& s : samples)
            CHECK(back.svm.decision(s.x) == doctest::Approx(model.svm.decision(s.x)));
        for (const auto& [label, v] : model.embedding.map())
            CHECK(back.embedding.at(label) == v);
    }
    SUBCASE("samples CSV round trip") {
        auto samples = separable_corpus(5, 61);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            samples[i].frame = 10 * i;
            samples[i].subject = i % 3;
        }
        std::stringstream buf;
        write_samples_csv(samples, buf);
        auto back = read_samples_csv(buf);
        REQUIRE(back.size() == samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            CHECK(back[i].y == samples[i].y);
            CHECK(back[i].frame == samples[i].frame);
            CHECK(back[i].subject == samples[i].subject);
            CHECK((back[i].x - samples[i].x).norm() < 1e-12);
        }
    }
}
