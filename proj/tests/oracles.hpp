#pragma once

// Independent reference implementations used by the tests. None of these
// call into the library's prediction, kernel, or solver code.

#include "shfm/dataset.hpp"
#include "shfm/model.hpp"
#include "shfm/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// (row, value) pairs of the augmented input: (0, 1) first for hierarchical kinds.
inline std::vector<std::pair<std::size_t, double>> augmented(const shfm::FactorizedModel &model, const shfm::SparseVector &x) {
    std::vector<std::pair<std::size_t, double>> out;
    if (shfm::is_hierarchical(model.kind())) {
        out.emplace_back(0, 1.0);
    }
    for (std::size_t p = 0; p < x.nnz(); ++p) {
        out.emplace_back(x.index(p), x.value(p));
    }
    return out;
}

/// Head output by the explicit double sum over pairs i < j of the augmented input.
inline double brute_force_predict(const shfm::FactorizedModel &model, const shfm::SparseVector &x, std::size_t h = 0) {
    const auto &head = model.head(h);
    double y = head.bias;
    if (!shfm::is_factorized(model.kind())) {
        for (std::size_t p = 0; p < x.nnz(); ++p) {
            y += head.weights[x.index(p)] * x.value(p);
        }
        return y;
    }
    const auto terms = augmented(model, x);
    for (std::size_t a = 0; a < terms.size(); ++a) {
        for (std::size_t b = a + 1; b < terms.size(); ++b) {
            double pair = 0.0;
            for (std::size_t f = 0; f < model.rank(); ++f) {
                pair += head.beta[f] * model.factor(h, terms[a].first, f) * model.factor(h, terms[b].first, f);
            }
            y += pair * terms[a].second * terms[b].second;
        }
    }
    return y;
}

/// m-th order ANOVA kernel by enumerating all index subsets of size m.
inline double brute_force_anova(int m, const std::vector<double> &a, const std::vector<double> &b) {
    const std::size_t n = a.size();
    double total = 0.0;
    std::function<void(std::size_t, int, double)> walk = [&](std::size_t start, int left, double product) {
        if (left == 0) {
            total += product;
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            walk(i + 1, left - 1, product * a[i] * b[i]);
        }
    };
    walk(0, m, 1.0);
    return total;
}

inline shfm::SparseVector random_sparse(std::mt19937_64 &rng, std::size_t dim, std::size_t max_nnz) {
    std::uniform_int_distribution<std::size_t> count(0, std::min(dim, max_nnz));
    std::uniform_real_distribution<double> value(-2.0, 2.0);
    const std::size_t nnz = count(rng);
    std::vector<std::uint32_t> all(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        all[i] = static_cast<std::uint32_t>(i + 1);
    }
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(nnz);
    std::sort(all.begin(), all.end());
    std::vector<double> values(nnz);
    for (auto &v : values) {
        do {
            v = value(rng);
        } while (v == 0.0);
    }
    return shfm::SparseVector(all, values, dim);
}

/// Model of `kind` with every parameter drawn at random (row 0 left zero for fm/anova2, beta = 1 for fm/shfm).
inline shfm::FactorizedModel random_model(std::mt19937_64 &rng, shfm::ModelKind kind, shfm::Task task, std::size_t heads, std::size_t dim, std::size_t rank) {
    shfm::FactorizedModel model(kind, task, heads, dim, rank);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t h = 0; h < heads; ++h) {
        auto &head = model.head(h);
        head.bias = normal(rng);
        if (!shfm::is_factorized(kind)) {
            for (std::size_t i = 1; i < model.rows(); ++i) {
                head.weights[i] = normal(rng);
            }
            continue;
        }
        if (shfm::learns_beta(kind)) {
            for (auto &b : head.beta) {
                b = normal(rng);
            }
        }
        const std::size_t first = shfm::is_hierarchical(kind) ? 0 : 1;
        for (std::size_t i = first; i < model.rows(); ++i) {
            for (std::size_t f = 0; f < rank; ++f) {
                model.factor(h, i, f) = normal(rng);
            }
        }
    }
    return model;
}

/// Golden-section minimization of a unimodal scalar function on [lo, hi].
inline double golden_section_min(const std::function<double(double)> &f, double lo, double hi, int iterations = 200) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - ratio * (b - a), d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < iterations; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Minimizer of (1/eta + l2)/2 v^2 + z v + l1 |v| found numerically, with eta = alpha / (mu + n)^gamma written out.
inline double numeric_proximal_min(double z, double n, double alpha, double mu, double gamma, double l1, double l2) {
    const double curvature = std::pow(mu + n, gamma) / alpha + l2;
    auto objective = [&](double v) { return 0.5 * curvature * v * v + z * v + l1 * std::abs(v); };
    const double bound = (std::abs(z) + l1) / curvature + 1.0;
    return golden_section_min(objective, -bound, bound);
}

/// Macro and micro F1 from an explicit confusion matrix.
struct ConfusionF1 {
    double micro;
    double macro;
};

inline ConfusionF1 confusion_f1(const std::vector<std::size_t> &predicted, const std::vector<std::size_t> &actual, std::size_t classes) {
    std::vector<std::vector<double>> matrix(classes, std::vector<double>(classes, 0.0));
    for (std::size_t s = 0; s < predicted.size(); ++s) {
        matrix[actual[s]][predicted[s]] += 1.0;
    }
    double precision_sum = 0.0, recall_sum = 0.0, tp_all = 0.0, fp_all = 0.0, fn_all = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        double tp = matrix[c][c], column = 0.0, row = 0.0;
        for (std::size_t o = 0; o < classes; ++o) {
            column += matrix[o][c];
            row += matrix[c][o];
        }
        precision_sum += column > 0.0 ? tp / column : 0.0;
        recall_sum += row > 0.0 ? tp / row : 0.0;
        tp_all += tp;
        fp_all += column - tp;
        fn_all += row - tp;
    }
    const double p = precision_sum / static_cast<double>(classes), r = recall_sum / static_cast<double>(classes);
    const double macro = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    const double micro_p = tp_all / (tp_all + fp_all), micro_r = tp_all / (tp_all + fn_all);
    return { 2.0 * micro_p * micro_r / (micro_p + micro_r), macro };
}

/// Coefficient of determination of the least-squares line through (x, y).
inline double r_squared(const std::vector<double> &x, const std::vector<double> &y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return syy > 0.0 && sxx > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
}

}  // namespace oracle
