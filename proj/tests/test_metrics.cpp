#include "shfm/errors.hpp"
#include "shfm/evaluation.hpp"
#include "shfm/metrics.hpp"
#include "shfm/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

using namespace shfm;

TEST(F1, AllCorrect) {
    const std::vector<std::size_t> labels{ 0, 1, 2, 1 };
    const auto scores = f1_scores(labels, labels, 3);
    EXPECT_EQ(scores.micro, 1.0);
    EXPECT_EQ(scores.macro, 1.0);
}

TEST(F1, HandConfusionMatrix) {
    // class 0: P = 1/1, R = 1/2; class 1: P = 1/2, R = 1/1
    // mean P = 3/4, mean R = 3/4 -> macro 3/4; micro = accuracy = 2/3
    const std::vector<std::size_t> predicted{ 0, 1, 1 }, actual{ 0, 0, 1 };
    const auto scores = f1_scores(predicted, actual, 2);
    EXPECT_DOUBLE_EQ(scores.macro, 0.75);
    EXPECT_DOUBLE_EQ(scores.micro, 2.0 / 3.0);
    const auto expected = oracle::confusion_f1(predicted, actual, 2);
    EXPECT_DOUBLE_EQ(scores.macro, expected.macro);
}

TEST(F1, MicroEqualsAccuracyAndMatchesOracleProperty) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t c = 2 + trial % 6, n = 1 + trial % 40;
        std::uniform_int_distribution<std::size_t> cls(0, c - 1);
        std::vector<std::size_t> predicted(n), actual(n);
        std::size_t correct = 0;
        for (std::size_t s = 0; s < n; ++s) {
            predicted[s] = cls(rng);
            actual[s] = cls(rng);
            correct += predicted[s] == actual[s] ? 1 : 0;
        }
        const auto scores = f1_scores(predicted, actual, c);
        EXPECT_NEAR(scores.micro, static_cast<double>(correct) / static_cast<double>(n), 1e-12);
        const auto expected = oracle::confusion_f1(predicted, actual, c);
        EXPECT_NEAR(scores.macro, expected.macro, 1e-12);
    }
}

TEST(F1, EmptyIsError) { EXPECT_THROW((void)f1_scores({}, {}, 2), argument_error); }

TEST(RegressionErrors, Values) {
    const std::vector<double> same{ 1.0, -2.0 };
    const auto zero = regression_errors(same, same);
    EXPECT_EQ(zero.rmse, 0.0);
    EXPECT_EQ(zero.mae, 0.0);
    const auto r = regression_errors(std::vector<double>{ 1, 2 }, std::vector<double>{ 1, 4 });
    EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(r.mae, 1.0);
}

TEST(RegressionErrors, RmseAtLeastMaeProperty) {
    std::mt19937_64 rng(59);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(1 + trial % 30), b(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = normal(rng);
            b[i] = normal(rng);
        }
        const auto r = regression_errors(a, b);
        EXPECT_GE(r.rmse, r.mae - 1e-12);
    }
}

TEST(Sparsity, Counting) {
    // fm, d = 5, k = 2: rows 1..5 hold 10 entries
    FactorizedModel model(ModelKind::fm, Task::regression, 1, 5, 2);
    for (std::size_t i = 1; i <= 5; ++i) {
        for (std::size_t f = 0; f < 2; ++f) {
            model.factor(0, i, f) = 1.0;
        }
    }
    EXPECT_EQ(sparsity(model).elements, 0.0);
    model.factor(0, 1, 0) = 0.0;
    model.factor(0, 2, 1) = 0.0;
    model.factor(0, 3, 0) = 0.0;
    EXPECT_DOUBLE_EQ(sparsity(model).elements, 0.3);
    EXPECT_EQ(sparsity(model).rows, 0.0);
    model.factor(0, 1, 1) = 0.0;
    EXPECT_DOUBLE_EQ(sparsity(model).rows, 0.2);
}

TEST(Sparsity, MonotoneUnderZeroingProperty) {
    std::mt19937_64 rng(61);
    auto model = oracle::random_model(rng, ModelKind::shfm, Task::regression, 1, 12, 3);
    double last = sparsity(model).elements;
    std::uniform_int_distribution<std::size_t> row(0, 12), col(0, 2);
    for (int step = 0; step < 60; ++step) {
        model.factor(0, row(rng), col(rng)) = 0.0;
        const double now = sparsity(model).elements;
        EXPECT_GE(now, last);
        last = now;
    }
}

TEST(Audit, ZeroRowInteractsWithNothing) {
    FactorizedModel model(ModelKind::shfm, Task::regression, 1, 2, 1);
    model.factor(0, 0, 0) = 1.0;
    model.factor(0, 1, 0) = 1.0;
    const auto report = hierarchy_audit(model, 1e-8, true);
    EXPECT_EQ(report.zero_rows, 1u);
    EXPECT_EQ(*report.violating_pairs, 0u);
    EXPECT_TRUE(report.assumptions_hold());
}

TEST(Audit, OrthogonalRowsViolate) {
    FactorizedModel model(ModelKind::shfm, Task::regression, 1, 2, 2);
    model.factor(0, 0, 0) = 1.0;
    model.factor(0, 1, 1) = 1.0;
    model.factor(0, 2, 1) = 1.0;
    const auto report = hierarchy_audit(model, 1e-8, true);
    EXPECT_EQ(*report.violating_pairs, 1u);
    EXPECT_EQ(*report.nonzero_pairs, 1u);
    EXPECT_EQ(report.orthogonal_nonzero_rows, 2u);
    EXPECT_FALSE(report.assumptions_hold());
}

TEST(Audit, NoViolationsWhenAssumptionsHoldProperty) {
    std::mt19937_64 rng(67);
    std::bernoulli_distribution drop(0.4);
    for (const ModelKind kind : { ModelKind::shfm, ModelKind::sha2 }) {
        for (int trial = 0; trial < 100; ++trial) {
            auto model = oracle::random_model(rng, kind, Task::regression, 1, 15, 1 + trial % 4);
            for (std::size_t i = 1; i < model.rows(); ++i) {
                if (drop(rng)) {
                    for (std::size_t f = 0; f < model.rank(); ++f) {
                        model.factor(0, i, f) = 0.0;
                    }
                }
            }
            const auto report = hierarchy_audit(model, 1e-8, true);
            if (report.assumptions_hold()) {
                EXPECT_EQ(*report.violating_pairs, 0u);
            }
        }
    }
}

TEST(Audit, RequiresHierarchicalModel) {
    FactorizedModel model(ModelKind::fm, Task::regression, 1, 3, 2);
    try {
        (void)hierarchy_audit(model);
        FAIL();
    } catch (const argument_error &e) {
        EXPECT_STREQ(e.what(), "hierarchical model required");
    }
}

TEST(Evaluate, ClassificationReport) {
    FactorizedModel model(ModelKind::linear, Task::classification, 2, 2, 0);
    model.head(0).weights[1] = 1.0;
    model.head(1).weights[2] = 1.0;
    Dataset data(Task::classification, 2, 2);
    data.push_back(SparseVector({ 1 }, { 1.0 }, 2), 0);
    data.push_back(SparseVector({ 2 }, { 1.0 }, 2), 1);
    data.push_back(SparseVector({ 2 }, { 1.0 }, 2), 0);
    const auto report = evaluate(model, data);
    EXPECT_DOUBLE_EQ(report.micro_f1, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(report.macro_f1, 0.75);
    EXPECT_FALSE(report.hierarchy.has_value());
}

TEST(Evaluate, DimensionMismatchIsShapeError) {
    FactorizedModel model(ModelKind::shfm, Task::regression, 1, 2, 2);
    Dataset data(Task::regression, 3, 1);
    data.push_back(SparseVector({ 3 }, { 1.0 }, 3), 0.0);
    EXPECT_THROW((void)evaluate(model, data), shape_error);
}

TEST(Evaluate, ThreadCountDoesNotChangeResults) {
    std::mt19937_64 rng(71);
    const auto model = oracle::random_model(rng, ModelKind::sha2, Task::regression, 1, 20, 4);
    Dataset data(Task::regression, 20, 1);
    for (int s = 0; s < 300; ++s) {
        data.push_back(oracle::random_sparse(rng, 20, 6), 0.5);
    }
    EvalOptions one, four;
    one.threads = 1;
    four.threads = 4;
    EXPECT_EQ(evaluate(model, data, one).to_key_values(), evaluate(model, data, four).to_key_values());
}
