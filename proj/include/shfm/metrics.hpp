#pragma once

#include "shfm/errors.hpp"
#include "shfm/model.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shfm {

struct F1Scores {
    double micro{ 0.0 };
    double macro{ 0.0 };
};

/**
 * Micro-F1: harmonic mean of pooled precision and recall.
 * Macro-F1: harmonic mean of the class-averaged precision and recall, where a
 * class with an empty precision (recall) denominator contributes 0 to it.
 */
[[nodiscard]] inline F1Scores f1_scores(std::span<const std::size_t> predictions, std::span<const std::size_t> labels, std::size_t num_classes) {
    if (predictions.empty()) {
        throw argument_error("f1_scores: empty input");
    }
    if (predictions.size() != labels.size()) {
        throw argument_error("f1_scores: prediction and label counts differ");
    }
    std::vector<std::uint64_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    for (std::size_t s = 0; s < predictions.size(); ++s) {
        const std::size_t p = predictions[s];
        const std::size_t y = labels[s];
        if (p >= num_classes || y >= num_classes) {
            throw argument_error("f1_scores: class id outside [0, " + std::to_string(num_classes) + ")");
        }
        if (p == y) {
            ++tp[y];
        } else {
            ++fp[p];
            ++fn[y];
        }
    }
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    auto harmonic = [](double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; };

    double tp_sum = 0.0, fp_sum = 0.0, fn_sum = 0.0, precision_sum = 0.0, recall_sum = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        const auto t = static_cast<double>(tp[c]);
        const auto f_p = static_cast<double>(fp[c]);
        const auto f_n = static_cast<double>(fn[c]);
        tp_sum += t;
        fp_sum += f_p;
        fn_sum += f_n;
        precision_sum += ratio(t, t + f_p);
        recall_sum += ratio(t, t + f_n);
    }
    const auto classes = static_cast<double>(num_classes);
    return { harmonic(ratio(tp_sum, tp_sum + fp_sum), ratio(tp_sum, tp_sum + fn_sum)), harmonic(precision_sum / classes, recall_sum / classes) };
}

struct RegressionErrors {
    double rmse{ 0.0 };
    double mae{ 0.0 };
};

[[nodiscard]] inline RegressionErrors regression_errors(std::span<const double> predictions, std::span<const double> labels) {
    if (predictions.empty()) {
        throw argument_error("regression_errors: empty input");
    }
    if (predictions.size() != labels.size()) {
        throw argument_error("regression_errors: prediction and label counts differ");
    }
    double squared = 0.0;
    double absolute = 0.0;
    for (std::size_t s = 0; s < predictions.size(); ++s) {
        const double r = predictions[s] - labels[s];
        squared += r * r;
        absolute += std::abs(r);
    }
    const auto n = static_cast<double>(predictions.size());
    return { std::sqrt(squared / n), absolute / n };
}

struct SparsityReport {
    /// Fraction of exactly-zero parameter entries.
    double elements{ 0.0 };
    /// Fraction of rows that are entirely zero.
    double rows{ 0.0 };
};

/**
 * Zero fraction over V' across heads; rows 1..d only for fm/anova2 since their
 * row 0 is structurally absent. For the linear kind, over the weights.
 */
[[nodiscard]] inline SparsityReport sparsity(const FactorizedModel &model) {
    const std::size_t first_row = is_hierarchical(model.kind()) ? 0 : 1;
    std::size_t zero_entries = 0, entries = 0, zero_rows = 0, rows = 0;
    for (std::size_t h = 0; h < model.num_heads(); ++h) {
        for (std::size_t i = first_row; i < model.rows(); ++i) {
            bool all_zero = true;
            if (is_factorized(model.kind())) {
                for (const double v : model.factor_row(h, i)) {
                    ++entries;
                    if (v == 0.0) {
                        ++zero_entries;
                    } else {
                        all_zero = false;
                    }
                }
            } else {
                ++entries;
                if (model.head(h).weights[i] == 0.0) {
                    ++zero_entries;
                } else {
                    all_zero = false;
                }
            }
            ++rows;
            zero_rows += all_zero ? 1 : 0;
        }
    }
    if (entries == 0) {
        return { 0.0, 0.0 };
    }
    return { static_cast<double>(zero_entries) / static_cast<double>(entries), static_cast<double>(zero_rows) / static_cast<double>(rows) };
}

struct HierarchyReport {
    /// Rows 1..d with v_i == 0, summed over heads.
    std::size_t zero_rows{ 0 };
    /// Nonzero rows whose main effect <v_i * beta, v0> is zero up to the cosine tolerance.
    std::size_t orthogonal_nonzero_rows{ 0 };
    bool context_is_zero{ false };
    /// Filled by the exhaustive pair scan only.
    std::optional<std::size_t> violating_pairs;
    std::optional<std::size_t> nonzero_pairs;

    /// Both assumptions of the strong-hierarchy guarantee hold.
    [[nodiscard]] bool assumptions_hold() const noexcept { return !context_is_zero && orthogonal_nonzero_rows == 0; }

    [[nodiscard]] double violating_fraction() const {
        if (!violating_pairs || !nonzero_pairs || *nonzero_pairs == 0) {
            return 0.0;
        }
        return static_cast<double>(*violating_pairs) / static_cast<double>(*nonzero_pairs);
    }
};

inline constexpr std::size_t default_audit_cap = 5000;

/**
 * Strong-hierarchy audit of a hierarchical model.
 *
 * The main effect of feature i is <v_i * beta, v0>; it counts as zero when
 * |<v_i * beta, v0>| <= tol * ||v_i * beta|| * ||v0||. The exhaustive scan
 * (O(d^2 k), capped at `max_dim`) counts pairs i < j with
 * |<v_i * beta, v_j>| > tol whose main effects are not both nonzero.
 */
[[nodiscard]] inline HierarchyReport hierarchy_audit(const FactorizedModel &model, double tol = 1e-8, bool exhaustive = false,
                                                     std::size_t max_dim = default_audit_cap) {
    if (!is_hierarchical(model.kind())) {
        throw argument_error("hierarchical model required");
    }
    if (exhaustive && model.dim() > max_dim) {
        throw argument_error("exhaustive audit limited to d <= " + std::to_string(max_dim) + ", model has d = " + std::to_string(model.dim()));
    }
    const std::size_t k = model.rank();
    HierarchyReport report;
    if (exhaustive) {
        report.violating_pairs = 0;
        report.nonzero_pairs = 0;
    }
    std::vector<double> weighted(k);
    for (std::size_t h = 0; h < model.num_heads(); ++h) {
        const auto &beta = model.head(h).beta;
        const auto context = model.factor_row(h, 0);
        double context_norm = 0.0;
        for (const double v : context) {
            context_norm += v * v;
        }
        context_norm = std::sqrt(context_norm);
        report.context_is_zero = report.context_is_zero || context_norm == 0.0;

        std::vector<std::size_t> nonzero;
        std::vector<std::uint8_t> main_is_zero(model.rows(), 1);
        for (std::size_t i = 1; i < model.rows(); ++i) {
            const auto row = model.factor_row(h, i);
            double row_norm = 0.0, weighted_norm = 0.0, main = 0.0;
            for (std::size_t f = 0; f < k; ++f) {
                row_norm += row[f] * row[f];
                const double w = row[f] * beta[f];
                weighted_norm += w * w;
                main += w * context[f];
            }
            if (row_norm == 0.0) {
                ++report.zero_rows;
                continue;
            }
            nonzero.push_back(i);
            if (std::abs(main) <= tol * std::sqrt(weighted_norm) * context_norm) {
                ++report.orthogonal_nonzero_rows;
            } else {
                main_is_zero[i] = 0;
            }
        }
        if (!exhaustive) {
            continue;
        }
        for (std::size_t a = 0; a < nonzero.size(); ++a) {
            const auto ri = model.factor_row(h, nonzero[a]);
            for (std::size_t f = 0; f < k; ++f) {
                weighted[f] = ri[f] * beta[f];
            }
            for (std::size_t b = a + 1; b < nonzero.size(); ++b) {
                const auto rj = model.factor_row(h, nonzero[b]);
                double interaction = 0.0;
                for (std::size_t f = 0; f < k; ++f) {
                    interaction += weighted[f] * rj[f];
                }
                if (std::abs(interaction) <= tol) {
                    continue;
                }
                ++*report.nonzero_pairs;
                if (main_is_zero[nonzero[a]] || main_is_zero[nonzero[b]]) {
                    ++*report.violating_pairs;
                }
            }
        }
    }
    return report;
}

}  // namespace shfm
