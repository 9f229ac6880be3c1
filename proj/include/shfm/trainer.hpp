#pragma once

#include "shfm/batches.hpp"
#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/evaluation.hpp"
#include "shfm/ftrl.hpp"
#include "shfm/losses.hpp"
#include "shfm/model.hpp"
#include "shfm/text.hpp"

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace shfm {

struct TrainConfig {
    ModelKind kind{ ModelKind::shfm };
    std::size_t rank{ 10 };
    std::size_t epochs{ 10 };
    std::size_t batch_size{ 16 };
    HyperParams hp;
    /// Evaluate on the test set every this many epochs (and after the last).
    std::size_t eval_every{ 1 };
    bool shuffle{ true };

    void validate() const {
        if (epochs == 0) {
            throw config_error("epochs must be >= 1");
        }
        if (batch_size == 0) {
            throw config_error("batch size must be >= 1");
        }
        if (eval_every == 0) {
            throw config_error("eval_every must be >= 1");
        }
        if (is_factorized(kind) && rank == 0) {
            throw config_error("k must be >= 1");
        }
        hp.validate();
    }
};

struct TraceRow {
    std::size_t epoch{ 0 };
    double train_loss{ 0.0 };
    EvalReport test;
    double seconds{ 0.0 };
};

/**
 * Mini-batch FTRL-Proximal over one model.
 *
 * Each step: rows of I = {0} u support(x) (no row 0 for fm/anova2) are
 * initialized on first touch from N(0, init_sigma); predictions use the cached
 * factor dots; gradients are averaged over the batch per coordinate; every
 * touched coordinate gets one accumulate and one closed-form solve.
 */
class Trainer {
  public:
    Trainer(Task task, std::size_t num_classes, std::size_t dim, TrainConfig config)
        : config_{ (config.validate(), std::move(config)) },
          model_(config_.kind, task, task == Task::regression ? 1 : num_classes, dim, config_.rank),
          state_(model_),
          loss_kind_{ loss_for(task) } {
        const std::size_t heads = model_.num_heads();
        const std::size_t width = state_.width;
        v_grad_.assign(heads, std::vector<double>(model_.rows() * width, 0.0));
        beta_grad_.assign(heads, std::vector<double>(model_.rank(), 0.0));
        bias_grad_.assign(heads, 0.0);
        row_in_batch_.assign(model_.rows(), 0);
        outputs_.resize(heads);
        dloss_.resize(heads);
        if (learns_beta(config_.kind)) {
            // z chosen so the closed-form solve reproduces beta = 1 before any gradient
            const double z0 = -(config_.hp.lambda1 + inverse_learning_rate(0.0, config_.hp) + config_.hp.lambda2);
            for (auto &head : state_.heads) {
                head.beta_z.assign(model_.rank(), z0);
            }
        }
    }

    [[nodiscard]] const FactorizedModel &model() const noexcept { return model_; }
    [[nodiscard]] const FtrlState &state() const noexcept { return state_; }
    [[nodiscard]] const TrainConfig &config() const noexcept { return config_; }
    [[nodiscard]] FactorizedModel release_model() && { return std::move(model_); }

    /// One FTRL update from the samples at `batch`; returns their summed loss.
    double step(const Dataset &data, std::span<const std::size_t> batch, std::size_t batch_index = 0) {
        if (batch.empty()) {
            return 0.0;
        }
        const std::size_t heads = model_.num_heads();
        const std::size_t k = model_.rank();
        const bool factorized = is_factorized(model_.kind());

        batch_rows_.clear();
        for (const std::size_t s : batch) {
            for_each_support(model_, data.sample(s), [&](std::size_t row, double) {
                if (!row_in_batch_[row]) {
                    row_in_batch_[row] = 1;
                    batch_rows_.push_back(row);
                }
            });
        }
        for (const std::size_t row : batch_rows_) {
            initialize_row(row);
        }

        double total_loss = 0.0;
        try {
            for (const std::size_t s : batch) {
                const SparseVector &x = data.sample(s);
                compute_factor_dots(model_, x, dots_);
                predict_from_dots(model_, x, dots_, outputs_, s);
                const double loss = sample_loss(loss_kind_, data.label(s), outputs_, dloss_);
                if (!std::isfinite(loss)) {
                    throw numeric_error("non-finite loss at sample " + std::to_string(s));
                }
                total_loss += loss;
                for (std::size_t h = 0; h < heads; ++h) {
                    const double dl = dloss_[h];
                    bias_grad_[h] += grad_b(dl);
                    auto &grad = v_grad_[h];
                    if (!factorized) {
                        for (std::size_t p = 0; p < x.nnz(); ++p) {
                            grad[x.index(p)] += dl * x.value(p);
                        }
                        continue;
                    }
                    const auto &beta = model_.head(h).beta;
                    const auto sums = dots_.head_sums(h);
                    for_each_support(model_, x, [&](std::size_t row, double value) {
                        const auto v = model_.factor_row(h, row);
                        double *g = grad.data() + row * k;
                        for (std::size_t f = 0; f < k; ++f) {
                            g[f] += grad_v(dl, beta[f], value, sums[f], v[f]);
                        }
                    });
                    if (learns_beta(model_.kind())) {
                        for (std::size_t f = 0; f < k; ++f) {
                            beta_grad_[h][f] += grad_beta(dl, dots_.kernel(h, f));
                        }
                    }
                }
            }
        } catch (const numeric_error &e) {
            reset_batch_buffers();
            throw numeric_error("batch " + std::to_string(batch_index) + ": " + e.what());
        }

        apply_updates(static_cast<double>(batch.size()));
        reset_batch_buffers();
        return total_loss;
    }

    /// One pass over `data` in `batch_size` chunks; returns the mean sample loss.
    double epoch(const Dataset &data, std::size_t epoch_index) {
        std::optional<std::uint64_t> seed;
        if (config_.shuffle) {
            seed = config_.hp.seed + 0x9E3779B97F4A7C15ULL * (epoch_index + 1);
        }
        const Batches batches(data.size(), config_.batch_size, seed);
        double total = 0.0;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            total += step(data, batches[b], b);
        }
        return data.empty() ? 0.0 : total / static_cast<double>(data.size());
    }

  private:
    void initialize_row(std::size_t row) {
        const std::size_t width = state_.width;
        for (std::size_t h = 0; h < model_.num_heads(); ++h) {
            auto &head_state = state_.heads[h];
            if (head_state.touched[row]) {
                continue;
            }
            head_state.touched[row] = 1;
            if (!is_factorized(model_.kind()) || config_.hp.init_sigma == 0.0) {
                continue;
            }
            std::seed_seq seq{ static_cast<std::uint32_t>(config_.hp.seed), static_cast<std::uint32_t>(config_.hp.seed >> 32),
                               static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(row >> 32) };
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> normal(0.0, config_.hp.init_sigma);
            auto v = model_.factor_row(h, row);
            for (std::size_t f = 0; f < width; ++f) {
                v[f] = normal(rng);
            }
        }
    }

    void apply_updates(double batch_size) {
        const HyperParams &hp = config_.hp;
        const std::size_t width = state_.width;
        const bool factorized = is_factorized(model_.kind());
        for (std::size_t h = 0; h < model_.num_heads(); ++h) {
            auto &head = model_.head(h);
            auto &head_state = state_.heads[h];

            auto bias = accumulate(head_state.bias_z, head_state.bias_n, bias_grad_[h] / batch_size, head.bias, hp);
            head_state.bias_z = bias.z;
            head_state.bias_n = bias.n;
            head.bias = solve_coordinate(bias.z, bias.n, hp, 0.0, hp.lambda2);

            if (learns_beta(model_.kind())) {
                for (std::size_t f = 0; f < model_.rank(); ++f) {
                    const auto acc = accumulate(head_state.beta_z[f], head_state.beta_n[f], beta_grad_[h][f] / batch_size, head.beta[f], hp);
                    head_state.beta_z[f] = acc.z;
                    head_state.beta_n[f] = acc.n;
                    head.beta[f] = solve_coordinate(acc.z, acc.n, hp);
                }
            }

            auto &grad = v_grad_[h];
            for (const std::size_t row : batch_rows_) {
                for (std::size_t f = 0; f < width; ++f) {
                    const std::size_t at = row * width + f;
                    double &param = factorized ? head.factors[at] : head.weights[row];
                    const auto acc = accumulate(head_state.z[at], head_state.n[at], grad[at] / batch_size, param, hp);
                    head_state.z[at] = acc.z;
                    head_state.n[at] = acc.n;
                    param = solve_coordinate(acc.z, acc.n, hp);
                }
            }
        }
    }

    void reset_batch_buffers() {
        const std::size_t width = state_.width;
        for (std::size_t h = 0; h < model_.num_heads(); ++h) {
            for (const std::size_t row : batch_rows_) {
                std::fill_n(v_grad_[h].begin() + static_cast<std::ptrdiff_t>(row * width), width, 0.0);
            }
            std::fill(beta_grad_[h].begin(), beta_grad_[h].end(), 0.0);
            bias_grad_[h] = 0.0;
        }
        for (const std::size_t row : batch_rows_) {
            row_in_batch_[row] = 0;
        }
        batch_rows_.clear();
    }

    TrainConfig config_;
    FactorizedModel model_;
    FtrlState state_;
    LossKind loss_kind_;

    std::vector<std::vector<double>> v_grad_;
    std::vector<std::vector<double>> beta_grad_;
    std::vector<double> bias_grad_;
    std::vector<std::uint8_t> row_in_batch_;
    std::vector<std::size_t> batch_rows_;
    FactorDots dots_;
    std::vector<double> outputs_;
    std::vector<double> dloss_;
};

struct TrainResult {
    FactorizedModel model;
    FtrlState state;
    std::vector<TraceRow> trace;
};

inline void check_compatible(const Dataset &train_set, const Dataset &test_set) {
    if (train_set.task() != test_set.task()) {
        throw config_error("train and test tasks differ");
    }
    if (train_set.dim() != test_set.dim()) {
        throw config_error("train dimension " + std::to_string(train_set.dim()) + " differs from test dimension " + std::to_string(test_set.dim()));
    }
    if (train_set.num_classes() != test_set.num_classes()) {
        throw config_error("train and test class counts differ");
    }
}

/// Train for config.epochs epochs, evaluating on `test_set` at the configured cadence.
[[nodiscard]] inline TrainResult train(const Dataset &train_set, const Dataset &test_set, const TrainConfig &config, const EvalOptions &eval_options = {}) {
    config.validate();
    check_compatible(train_set, test_set);
    Trainer trainer(train_set.task(), train_set.num_classes(), train_set.dim(), config);
    std::vector<TraceRow> trace;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        const double train_loss = trainer.epoch(train_set, epoch);
        const bool evaluate_now = epoch % config.eval_every == 0 || epoch == config.epochs;
        EvalReport report;
        if (evaluate_now) {
            report = evaluate(trainer.model(), test_set, eval_options);
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (evaluate_now) {
            trace.push_back({ epoch, train_loss, std::move(report), seconds });
        }
    }
    FtrlState state = trainer.state();
    return { std::move(trainer).release_model(), std::move(state), std::move(trace) };
}

/// CSV with columns epoch, train_loss, metric columns, sparsity, seconds.
[[nodiscard]] inline std::string trace_csv(const std::vector<TraceRow> &trace, Task task, bool include_seconds = true) {
    std::string out = "epoch,train_loss,test_loss,";
    out += task == Task::classification ? "micro_f1,macro_f1" : "rmse,mae";
    out += ",sparsity";
    out += include_seconds ? ",seconds\n" : "\n";
    for (const auto &row : trace) {
        out += std::to_string(row.epoch) + ',' + detail::format_double(row.train_loss) + ',' + detail::format_double(row.test.loss) + ',';
        if (task == Task::classification) {
            out += detail::format_double(row.test.micro_f1) + ',' + detail::format_double(row.test.macro_f1);
        } else {
            out += detail::format_double(row.test.rmse) + ',' + detail::format_double(row.test.mae);
        }
        out += ',' + detail::format_double(row.test.sparsity.elements);
        if (include_seconds) {
            out += ',' + detail::format_double(row.seconds);
        }
        out += '\n';
    }
    return out;
}

}  // namespace shfm
