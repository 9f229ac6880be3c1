#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace shfm {

enum class LossKind { mse, softmax_ce };

[[nodiscard]] constexpr LossKind loss_for(Task task) noexcept { return task == Task::regression ? LossKind::mse : LossKind::softmax_ce; }

struct ScalarLoss {
    double loss;
    double gradient;
};

/// L = (y - yhat)^2 / 2, dL/dyhat = yhat - y.
[[nodiscard]] inline ScalarLoss mse(double y, double yhat) {
    if (!std::isfinite(y) || !std::isfinite(yhat)) {
        throw numeric_error("mse: non-finite input");
    }
    const double residual = yhat - y;
    return { 0.5 * residual * residual, residual };
}

/**
 * Softmax cross-entropy with a base-2 logarithm, L = -log2 softmax(yhat)_y.
 * Writes dL/dyhat_i = (softmax_i - [i == y]) / ln 2 into `gradient`.
 */
inline double softmax_ce(std::size_t y, std::span<const double> logits, std::span<double> gradient) {
    const std::size_t c = logits.size();
    if (y >= c) {
        throw label_error("class label " + std::to_string(y) + " outside [0, " + std::to_string(c) + ")");
    }
    double top = logits[0];
    for (const double logit : logits) {
        if (!std::isfinite(logit)) {
            throw numeric_error("softmax_ce: non-finite logit");
        }
        top = std::max(top, logit);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        gradient[i] = std::exp(logits[i] - top);
        total += gradient[i];
    }
    // log2 softmax_y = ((l_y - top) - ln total) / ln 2
    const double loss = -((logits[y] - top) - std::log(total)) / std::numbers::ln2;
    for (std::size_t i = 0; i < c; ++i) {
        const double p = gradient[i] / total;
        gradient[i] = (p - (i == y ? 1.0 : 0.0)) / std::numbers::ln2;
    }
    return loss;
}

struct VectorLoss {
    double loss;
    std::vector<double> gradient;
};

[[nodiscard]] inline VectorLoss softmax_ce(std::size_t y, std::span<const double> logits) {
    VectorLoss out{ 0.0, std::vector<double>(logits.size()) };
    out.loss = softmax_ce(y, logits, out.gradient);
    return out;
}

/// Loss for one sample; `gradient` receives dL/dyhat per head.
inline double sample_loss(LossKind kind, double label, std::span<const double> outputs, std::span<double> gradient) {
    if (kind == LossKind::mse) {
        const auto [loss, grad] = mse(label, outputs[0]);
        gradient[0] = grad;
        return loss;
    }
    return softmax_ce(static_cast<std::size_t>(label), outputs, gradient);
}

}  // namespace shfm
