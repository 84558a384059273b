#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"
#include "tabcheck/error.hpp"
#include "tabcheck/pps.hpp"
#include "tabcheck/rng.hpp"
#include "tabcheck/trust_score.hpp"

using namespace tabcheck;
using testing_support::make_dataset;
using testing_support::num;

TEST(Pps, LabelCopyScoresOne) {
    std::vector<std::string> y;
    for (int i = 0; i < 200; ++i) y.push_back(i % 3 == 0 ? "x" : (i % 3 == 1 ? "y" : "z"));
    const auto ds = make_dataset({{"f", y}, {"label", y}}, "label");
    const auto r = pps(ds.column("f"), ds.label(), Task::Classification);
    EXPECT_FALSE(r.skipped);
    EXPECT_EQ(r.score, 1.0);
}

TEST(Pps, NoiseStaysLow) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        std::vector<std::string> f, y;
        for (int i = 0; i < 1000; ++i) {
            f.push_back(num(rng.uniform()));
            y.push_back(rng.uniform() < 0.5 ? "a" : "b");
        }
        const auto ds = make_dataset({{"f", f}, {"label", y}}, "label");
        const auto r = pps(ds.column("f"), ds.label(), Task::Classification);
        EXPECT_LE(r.score, 0.05) << "seed " << seed;
        EXPECT_GE(r.score, 0.0);
    }
}

TEST(Pps, ConstantLabelIsZero) {
    std::vector<std::string> f, y(100, "same");
    for (int i = 0; i < 100; ++i) f.push_back(std::to_string(i));
    const auto ds = make_dataset({{"f", f}, {"label", y}}, "label", Task::Classification);
    EXPECT_EQ(pps(ds.column("f"), ds.label(), Task::Classification).score, 0.0);
}

TEST(Pps, RegressionLinearHigh) {
    Rng rng(2);
    std::vector<std::string> f, y;
    for (int i = 0; i < 400; ++i) {
        const double x = rng.uniform();
        f.push_back(num(x));
        y.push_back(num(3 * x + 0.01 * testing_support::normal(rng)));
    }
    const auto ds = make_dataset({{"f", f}, {"y", y}}, "y", Task::Regression);
    const auto r = pps(ds.column("f"), ds.label(), Task::Regression);
    EXPECT_GT(r.score, 0.8);
    EXPECT_LE(r.score, 1.0);
}

TEST(Pps, TooFewRowsSkipped) {
    std::vector<std::string> f, y;
    for (int i = 0; i < 10; ++i) f.push_back(std::to_string(i)), y.push_back(i % 2 ? "a" : "b");
    const auto ds = make_dataset({{"f", f}, {"label", y}}, "label");
    const auto r = pps(ds.column("f"), ds.label(), Task::Classification);
    EXPECT_TRUE(r.skipped);
    EXPECT_EQ(r.score, 0.0);
}

TEST(Pps, AlwaysInUnitInterval) {
    Rng rng(6);
    for (int t = 0; t < 15; ++t) {
        std::vector<std::string> f, y;
        for (int i = 0; i < 60; ++i) {
            const double x = std::floor(rng.uniform() * 5);
            f.push_back(num(x));
            y.push_back(rng.uniform() < 0.3 + 0.1 * x ? "p" : "n");
        }
        const auto ds = make_dataset({{"f", f}, {"label", y}}, "label");
        const double s = pps(ds.column("f"), ds.label(), Task::Classification).score;
        EXPECT_GE(s, 0.0);
        EXPECT_LE(s, 1.0);
    }
}

TEST(Trust, GeometryExamples) {
    const FeatureRows ref{{0, 0}, {1, 0}, {0, 1}};
    const std::vector<std::string> labels{"a", "b", "a"};
    const FeatureRows eval{{0, 0}, {0.5, 0}};
    const std::vector<std::string> pred{"a", "a"};
    const auto s = trust_scores(ref, labels, eval, pred);
    EXPECT_DOUBLE_EQ(s[0], 1.0 / 1e-12);
    EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(Trust, ExcludeSkipsReferenceRow) {
    const FeatureRows ref{{0, 0}, {1, 0}, {0, 1}};
    const std::vector<std::string> labels{"a", "b", "a"};
    const std::vector<std::string> pred{"a"};
    const std::vector<std::optional<std::size_t>> exclude{std::size_t{0}};
    const auto s = trust_scores(ref, labels, FeatureRows{{0, 0}}, pred, {}, exclude);
    EXPECT_DOUBLE_EQ(s[0], 1.0);
}

TEST(Trust, InvariantToFeatureRescaling) {
    Rng rng(12);
    FeatureRows ref, eval, scaled_ref, scaled_eval;
    std::vector<std::string> labels, pred;
    for (int i = 0; i < 80; ++i) {
        const bool b = i % 2;
        const std::vector<double> row{testing_support::normal(rng) + 2 * b, testing_support::normal(rng)};
        ref.push_back(row);
        scaled_ref.push_back({row[0] * 250.0 + 7, row[1]});
        labels.push_back(b ? "b" : "a");
    }
    for (int i = 0; i < 30; ++i) {
        const std::vector<double> row{testing_support::normal(rng) + 1, testing_support::normal(rng)};
        eval.push_back(row);
        scaled_eval.push_back({row[0] * 250.0 + 7, row[1]});
        pred.push_back(i % 3 ? "a" : "b");
    }
    const auto s1 = trust_scores(ref, labels, eval, pred);
    const auto s2 = trust_scores(scaled_ref, labels, scaled_eval, pred);
    for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_NEAR(s1[i], s2[i], 1e-9 * std::max(1.0, s1[i]));
}

TEST(Trust, CorrectPredictionsMoreTrustedThanFlipped) {
    Rng rng(31);
    FeatureRows ref, eval;
    std::vector<std::string> labels, truth, flipped;
    for (int i = 0; i < 400; ++i) {
        const bool b = i % 2;
        ref.push_back({testing_support::normal(rng) + 3 * b, testing_support::normal(rng) + 3 * b});
        labels.push_back(b ? "b" : "a");
    }
    for (int i = 0; i < 200; ++i) {
        const bool b = i % 2;
        eval.push_back({testing_support::normal(rng) + 3 * b, testing_support::normal(rng) + 3 * b});
        truth.push_back(b ? "b" : "a");
        flipped.push_back(b ? "a" : "b");
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += std::min(x, 100.0);
        return s / v.size();
    };
    EXPECT_GT(mean(trust_scores(ref, labels, eval, truth)), mean(trust_scores(ref, labels, eval, flipped)));
}

TEST(Trust, AlphaDropsSparsePoints) {
    FeatureRows ref{{0, 0}, {0.01, 0}, {0, 0.01}, {1, 1}, {0.9, 0.9}, {0.9, 1}, {0.5, 0.5}};
    std::vector<std::string> labels{"a", "a", "a", "b", "b", "b", "a"};
    const std::vector<std::string> pred{"a"};
    TrustParams params;
    params.alpha = 0.25;
    const auto with_outlier = trust_scores(ref, labels, FeatureRows{{0.5, 0.5}}, pred);
    const auto filtered = trust_scores(ref, labels, FeatureRows{{0.5, 0.5}}, pred, params);
    EXPECT_GT(with_outlier[0], 1e6);
    EXPECT_LT(filtered[0], 10.0);
}

TEST(Trust, Preconditions) {
    const FeatureRows ref{{0, 0}, {1, 1}};
    const std::vector<std::string> one_class{"a", "a"};
    const std::vector<std::string> pred{"a"};
    EXPECT_THROW(trust_scores(ref, one_class, FeatureRows{{0, 0}}, pred), Error);
    const std::vector<std::string> labels{"a", "b"};
    const std::vector<std::string> unknown{"c"};
    EXPECT_THROW(trust_scores(ref, labels, FeatureRows{{0, 0}}, unknown), Error);
}
