#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/losses.hpp"
#include "shfm/metrics.hpp"
#include "shfm/model.hpp"
#include "shfm/text.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace shfm {

/// Worker cap from SHFM_THREADS; 1 when unset or invalid.
[[nodiscard]] inline std::size_t thread_limit() {
    if (const char *env = std::getenv("SHFM_THREADS")) {
        if (const auto n = detail::parse_number<unsigned>(env); n && *n > 0) {
            return *n;
        }
    }
    return 1;
}

/**
 * Run `body(begin, end)` over [0, count) split into contiguous chunks on up to
 * `threads` workers. The first exception thrown by any chunk is rethrown.
 */
template <typename F>
void parallel_chunks(std::size_t count, std::size_t threads, F &&body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        body(std::size_t{ 0 }, count);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        workers.emplace_back([&, t, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto &worker : workers) {
        worker.join();
    }
    for (const auto &error : errors) {
        if (error) {
            std::rethrow_exception(error);
        }
    }
}

/// Head outputs for every sample, sample-major (n * c).
[[nodiscard]] inline std::vector<double> predict_dataset(const FactorizedModel &model, const Dataset &data, std::size_t threads = thread_limit()) {
    if (data.dim() != model.dim()) {
        throw shape_error("data dimension " + std::to_string(data.dim()) + " does not match model dimension " + std::to_string(model.dim()));
    }
    const std::size_t c = model.num_heads();
    std::vector<double> outputs(data.size() * c);
    parallel_chunks(data.size(), threads, [&](std::size_t begin, std::size_t end) {
        FactorDots dots;
        for (std::size_t s = begin; s < end; ++s) {
            compute_factor_dots(model, data.sample(s), dots);
            predict_from_dots(model, data.sample(s), dots, std::span<double>(outputs).subspan(s * c, c), s);
        }
    });
    return outputs;
}

[[nodiscard]] inline std::size_t argmax(std::span<const double> scores) {
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

struct EvalReport {
    Task task{ Task::regression };
    std::size_t samples{ 0 };
    double loss{ 0.0 };
    // classification
    double micro_f1{ 0.0 };
    double macro_f1{ 0.0 };
    // regression
    double rmse{ 0.0 };
    double mae{ 0.0 };
    SparsityReport sparsity;
    std::optional<HierarchyReport> hierarchy;

    /// Primary validation metric; larger is better (macro-F1, or -RMSE).
    [[nodiscard]] double score() const noexcept { return task == Task::classification ? macro_f1 : -rmse; }

    /// Single line of space-separated key=value records.
    [[nodiscard]] std::string to_key_values() const {
        std::ostringstream out;
        out << "task=" << to_string(task) << " samples=" << samples << " loss=" << detail::format_double(loss);
        if (task == Task::classification) {
            out << " micro_f1=" << detail::format_double(micro_f1) << " macro_f1=" << detail::format_double(macro_f1);
        } else {
            out << " rmse=" << detail::format_double(rmse) << " mae=" << detail::format_double(mae);
        }
        out << " sparsity=" << detail::format_double(sparsity.elements) << " row_sparsity=" << detail::format_double(sparsity.rows);
        if (hierarchy) {
            out << " zero_rows=" << hierarchy->zero_rows << " orthogonal_nonzero_rows=" << hierarchy->orthogonal_nonzero_rows
                << " context_is_zero=" << (hierarchy->context_is_zero ? 1 : 0);
            if (hierarchy->violating_pairs) {
                out << " violating_pairs=" << *hierarchy->violating_pairs << " nonzero_pairs=" << *hierarchy->nonzero_pairs;
            }
        }
        return out.str();
    }

    [[nodiscard]] std::string to_table() const {
        std::vector<std::pair<std::string, std::string>> rows;
        std::istringstream fields(to_key_values());
        std::string field;
        std::size_t width = 0;
        while (fields >> field) {
            const auto eq = field.find('=');
            rows.emplace_back(field.substr(0, eq), field.substr(eq + 1));
            width = std::max(width, eq);
        }
        std::string out;
        for (const auto &[key, value] : rows) {
            out += key + std::string(width - key.size() + 2, ' ') + value + '\n';
        }
        return out;
    }
};

struct EvalOptions {
    double audit_tol{ 1e-8 };
    bool exhaustive_audit{ false };
    std::size_t threads{ thread_limit() };
};

/// Loss, task metrics, sparsity, and (hierarchical kinds) the hierarchy audit.
[[nodiscard]] inline EvalReport evaluate(const FactorizedModel &model, const Dataset &data, const EvalOptions &options = {}) {
    if (data.task() != model.task()) {
        throw shape_error("data task does not match model task");
    }
    if (data.task() == Task::classification && data.num_classes() > model.num_heads()) {
        throw shape_error("data has " + std::to_string(data.num_classes()) + " classes, model has " + std::to_string(model.num_heads()) + " heads");
    }
    EvalReport report;
    report.task = model.task();
    report.samples = data.size();
    report.sparsity = sparsity(model);
    if (is_hierarchical(model.kind())) {
        report.hierarchy = hierarchy_audit(model, options.audit_tol, options.exhaustive_audit);
    }
    if (data.empty()) {
        return report;
    }
    const auto outputs = predict_dataset(model, data, options.threads);
    const std::size_t c = model.num_heads();
    const LossKind kind = loss_for(model.task());
    std::vector<double> gradient(c);
    double total = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        total += sample_loss(kind, data.label(s), std::span<const double>(outputs).subspan(s * c, c), gradient);
    }
    report.loss = total / static_cast<double>(data.size());

    if (model.task() == Task::classification) {
        std::vector<std::size_t> predicted(data.size()), labels(data.size());
        for (std::size_t s = 0; s < data.size(); ++s) {
            predicted[s] = argmax(std::span<const double>(outputs).subspan(s * c, c));
            labels[s] = data.class_label(s);
        }
        const auto f1 = f1_scores(predicted, labels, c);
        report.micro_f1 = f1.micro;
        report.macro_f1 = f1.macro;
    } else {
        const auto errors = regression_errors(outputs, data.labels());
        report.rmse = errors.rmse;
        report.mae = errors.mae;
    }
    return report;
}

}  // namespace shfm
