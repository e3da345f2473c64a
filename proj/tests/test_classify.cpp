#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "fpmod/classify.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fpmod;

namespace {

LabeledExample ex(std::vector<double> x, Label y, std::string finger = "") {
    LabeledExample e;
    e.features.values = std::move(x);
    e.label = y;
    e.finger = std::move(finger);
    return e;
}

oracle::SvmProblem problem(const std::vector<LabeledExample>& xs, double C) {
    oracle::SvmProblem p;
    for (const auto& e : xs) {
        p.x.push_back(e.features.values);
        p.y.push_back(static_cast<double>(static_cast<int>(e.label)));
    }
    p.C = C;
    p.s = 1.0;
    return p;
}

std::vector<LabeledExample> random_set(std::mt19937_64& rng, int n, int dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<LabeledExample> out;
    for (int i = 0; i < n; ++i) {
        const Label y = i % 2 == 0 ? Label::Real : Label::Synthetic;
        std::vector<double> x(dim);
        for (double& v : x) {
            v = g(rng) + (y == Label::Real ? 0.7 : -0.7);
        }
        out.push_back(ex(std::move(x), y));
    }
    return out;
}

LinearModel constant_model(std::size_t dim, double bias) {
    LinearModel m;
    m.weights.assign(dim, 0.0);
    m.bias = bias;
    return m;
}

}  // namespace

TEST(Train, SeparablePairHasUnitMargin) {
    const std::vector<LabeledExample> xs = {ex({1, 0}, Label::Real), ex({-1, 0}, Label::Synthetic)};
    SvmOptions opt;
    opt.C = 1000;
    const auto m = train(xs, opt);
    for (const auto& e : xs) {
        const double y = static_cast<int>(e.label);
        EXPECT_GE(y * predict(m, e.features).score, 1.0 - 1e-6);
    }
    EXPECT_EQ(predict(m, FeatureVector{{1, 0}}).label, Label::Real);
    EXPECT_EQ(predict(m, FeatureVector{{-1, 0}}).label, Label::Synthetic);
}

TEST(Train, SixExamplesMatchOracle) {
    const std::vector<LabeledExample> xs = {
        ex({0.2, 0.9}, Label::Real),      ex({0.8, 0.4}, Label::Real),      ex({0.5, 0.7}, Label::Real),
        ex({0.1, 0.3}, Label::Synthetic), ex({0.6, 0.1}, Label::Synthetic), ex({0.45, 0.5}, Label::Synthetic),
    };
    for (double C : {0.1, 1.0, 10.0}) {
        SvmOptions opt;
        opt.C = C;
        const auto m = train(xs, opt);
        const double want = oracle::svm_dual_optimum(problem(xs, C));
        EXPECT_NEAR(m.meta.dual, want, 1e-5 * std::max(1.0, std::abs(want)));
        EXPECT_NEAR(dual_objective(xs, m.meta.alphas), m.meta.dual, 1e-12 * std::max(1.0, std::abs(want)));
        EXPECT_LE(m.meta.primal - m.meta.dual, 1e-6 + 1e-12);
        EXPECT_NEAR(primal_objective(xs, m), m.meta.primal, 1e-9);
    }
}

TEST(Train, RandomInstancesMatchOracle) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> n_d(2, 6), dim_d(1, 3);
    std::uniform_real_distribution<double> logc(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto xs = random_set(rng, n_d(rng), dim_d(rng));
        const double C = std::pow(10.0, logc(rng));
        SvmOptions opt;
        opt.C = C;
        const auto m = train(xs, opt);
        const double want = oracle::svm_dual_optimum(problem(xs, C));
        EXPECT_NEAR(m.meta.dual, want, 1e-4 * std::max(1.0, std::abs(want)));
    }
}

TEST(Train, DuplicatedDataEqualsDoubledC) {
    const std::vector<LabeledExample> base = {ex({0.3, 1.0}, Label::Real), ex({0.9, 0.2}, Label::Synthetic),
                                              ex({0.5, 0.6}, Label::Real)};
    auto twice = base;
    twice.insert(twice.end(), base.begin(), base.end());
    SvmOptions one;
    one.C = 0.7;
    SvmOptions two = one;
    two.C = 1.4;
    const double dup_opt = oracle::svm_dual_optimum(problem(twice, one.C));
    const double dbl_opt = oracle::svm_dual_optimum(problem(base, two.C));
    EXPECT_NEAR(dup_opt, dbl_opt, 1e-9);

    const auto a = train(twice, one);
    const auto b = train(base, two);
    EXPECT_NEAR(a.meta.dual, dup_opt, 1e-5);
    EXPECT_NEAR(b.meta.dual, dbl_opt, 1e-5);
    for (const auto& e : base) {
        EXPECT_NEAR(predict(a, e.features).score, predict(b, e.features).score, 1e-3);
    }
}

TEST(Train, DualFeasibilityAndDeterminism) {
    std::mt19937_64 rng(5);
    const auto xs = random_set(rng, 40, 5);
    SvmOptions opt;
    opt.C = 2.0;
    const auto a = train(xs, opt);
    const auto b = train(xs, opt);
    ASSERT_EQ(a.meta.alphas.size(), xs.size());
    for (double al : a.meta.alphas) {
        EXPECT_GE(al, 0.0);
        EXPECT_LE(al, opt.C);
    }
    EXPECT_LE(a.meta.primal - a.meta.dual, opt.tolerance);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.bias, b.bias);
    EXPECT_EQ(a.meta.alphas, b.meta.alphas);
}

TEST(Train, LabelAntisymmetry) {
    std::mt19937_64 rng(6);
    const auto xs = random_set(rng, 30, 4);
    auto flipped = xs;
    for (auto& e : flipped) {
        e.label = e.label == Label::Real ? Label::Synthetic : Label::Real;
    }
    const auto a = train(xs);
    const auto b = train(flipped);
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
        EXPECT_NEAR(a.weights[i], -b.weights[i], 1e-3);
    }
    EXPECT_NEAR(a.bias, -b.bias, 1e-3);
    for (const auto& e : xs) {
        const double sa = predict(a, e.features).score;
        const double sb = predict(b, e.features).score;
        if (std::abs(sa) > 1e-2) {
            EXPECT_NE(predict(a, e.features).label, predict(b, e.features).label);
        }
        EXPECT_NEAR(sa, -sb, 1e-2);
    }
}

TEST(Train, InputErrors) {
    EXPECT_THROW(train({}), InputError);
    EXPECT_THROW(train({ex({1}, Label::Real), ex({2}, Label::Real)}), InputError);
    EXPECT_THROW(train({ex({1}, Label::Real), ex({2, 3}, Label::Synthetic)}), InputError);
}

TEST(Predict, Examples) {
    const auto m = constant_model(3, 0.5);
    const auto p = predict(m, FeatureVector{{0.2, 0.3, 0.5}});
    EXPECT_EQ(p.label, Label::Real);
    EXPECT_EQ(p.score, 0.5);
    const auto zero = predict(constant_model(2, 0.0), FeatureVector{{1, 1}});
    EXPECT_EQ(zero.score, 0.0);
    EXPECT_EQ(zero.label, Label::Real);
    EXPECT_THROW(predict(m, FeatureVector{{1}}), InputError);
}

TEST(Evaluate, AllRealModel) {
    const auto m = constant_model(1, 1.0);
    const std::vector<LabeledExample> real = {ex({0}, Label::Real), ex({1}, Label::Real)};
    const auto e1 = evaluate(m, real);
    EXPECT_EQ(e1.accuracy, 1.0);
    EXPECT_EQ(e1.tp, 2);
    const std::vector<LabeledExample> mixed = {ex({0}, Label::Real), ex({1}, Label::Real),
                                               ex({0}, Label::Synthetic), ex({1}, Label::Synthetic)};
    const auto e2 = evaluate(m, mixed);
    EXPECT_EQ(e2.accuracy, 0.5);
    EXPECT_EQ(e2.tp, 2);
    EXPECT_EQ(e2.fp, 2);
    EXPECT_EQ(e2.tn, 0);
    EXPECT_EQ(e2.fn, 0);
    EXPECT_THROW(evaluate(m, {}), InputError);
}

TEST(Split, SixtyFiftyFingerSplit) {
    std::vector<LabeledExample> corpus;
    for (int cls = 0; cls < 2; ++cls) {
        for (int f = 0; f < 110; ++f) {
            for (int imp = 0; imp < 2; ++imp) {
                corpus.push_back(ex({1.0}, cls == 0 ? Label::Real : Label::Synthetic,
                                    (cls == 0 ? "r" : "s") + std::to_string(f)));
            }
        }
    }
    const auto [train_a, test_a] = split_by_finger(corpus, 60, 7);
    const auto [train_b, test_b] = split_by_finger(corpus, 60, 7);
    auto fingers = [](const std::vector<LabeledExample>& v, Label y) {
        std::set<std::string> s;
        for (const auto& e : v) {
            if (e.label == y) {
                s.insert(e.finger);
            }
        }
        return s;
    };
    for (Label y : {Label::Real, Label::Synthetic}) {
        const auto tr = fingers(train_a, y);
        const auto te = fingers(test_a, y);
        EXPECT_EQ(tr.size(), 60u);
        EXPECT_EQ(te.size(), 50u);
        for (const auto& f : tr) {
            EXPECT_EQ(te.count(f), 0u);
        }
    }
    EXPECT_EQ(train_a.size(), 240u);
    EXPECT_EQ(test_a.size(), 200u);
    ASSERT_EQ(train_a.size(), train_b.size());
    for (std::size_t i = 0; i < train_a.size(); ++i) {
        EXPECT_EQ(train_a[i].finger, train_b[i].finger);
    }
    const auto [train_c, test_c] = split_by_finger(corpus, 60, 8);
    EXPECT_NE(fingers(train_a, Label::Real), fingers(train_c, Label::Real));
}

TEST(Split, RejectsEmptyTestSide) {
    std::vector<LabeledExample> corpus;
    for (int f = 0; f < 5; ++f) {
        corpus.push_back(ex({1.0}, Label::Real, "r" + std::to_string(f)));
        corpus.push_back(ex({1.0}, Label::Synthetic, "s" + std::to_string(f)));
    }
    EXPECT_THROW(split_by_finger(corpus, 5, 1), InputError);
    EXPECT_NO_THROW(split_by_finger(corpus, 4, 1));
}

TEST(ModelJson, RoundTrip) {
    testutil::TempDir dir("classify");
    std::mt19937_64 rng(9);
    const auto xs = random_set(rng, 10, 4);
    const auto m = train(xs);
    write_model_json(m, dir / "model.json");
    const auto back = read_model_json(dir / "model.json");
    EXPECT_EQ(back.weights, m.weights);
    EXPECT_EQ(back.bias, m.bias);
    EXPECT_EQ(back.C, m.C);
    const auto j = to_json(m);
    for (const char* key : {"bins", "C", "weights", "bias", "training_meta"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    testutil::spit(dir / "bad.json", "{\"weights\": 3}");
    EXPECT_THROW(read_model_json(dir / "bad.json"), InputError);
    EXPECT_THROW(read_model_json(dir / "missing.json"), InputError);
}
