#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/evaluation.hpp"
#include "shfm/text.hpp"
#include "shfm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shfm {

/// Ordered hyperparameter axes, each a list of candidate values.
using Grid = std::vector<std::pair<std::string, std::vector<double>>>;

inline constexpr std::string_view grid_keys[] = { "l1", "l2", "alpha", "mu", "gamma", "init_sigma", "k", "batch_size", "epochs", "seed" };

/// lambda1 in {1e-5, 1e-4, 1e-3, 1e-2} crossed with k in {5, 10, 20, 50}.
[[nodiscard]] inline Grid default_grid() { return { { "l1", { 1e-5, 1e-4, 1e-3, 1e-2 } }, { "k", { 5, 10, 20, 50 } } }; }

inline void apply_setting(TrainConfig &config, std::string_view key, double value) {
    auto whole = [&](const char *name) {
        if (value < 0.0 || value != std::floor(value)) {
            throw config_error(std::string{ name } + " must be a nonnegative integer");
        }
        return static_cast<std::size_t>(value);
    };
    if (key == "l1") {
        config.hp.lambda1 = value;
    } else if (key == "l2") {
        config.hp.lambda2 = value;
    } else if (key == "alpha") {
        config.hp.alpha = value;
    } else if (key == "mu") {
        config.hp.mu = value;
    } else if (key == "gamma") {
        config.hp.gamma = value;
    } else if (key == "init_sigma") {
        config.hp.init_sigma = value;
    } else if (key == "k") {
        config.rank = whole("k");
    } else if (key == "batch_size") {
        config.batch_size = whole("batch_size");
    } else if (key == "epochs") {
        config.epochs = whole("epochs");
    } else if (key == "seed") {
        config.hp.seed = whole("seed");
    } else {
        throw config_error("unknown grid key '" + std::string{ key } + "'");
    }
}

/**
 * Flat "key=v1,v2,..." lines; '#' starts a comment. A key may appear once.
 */
[[nodiscard]] inline Grid parse_grid_config(std::string_view text) {
    Grid grid;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_number) {
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            return;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw config_error("grid config line " + std::to_string(line_number) + ": expected key=value list");
        }
        const std::string key{ detail::trim(line.substr(0, eq)) };
        if (std::find(std::begin(grid_keys), std::end(grid_keys), key) == std::end(grid_keys)) {
            throw config_error("grid config line " + std::to_string(line_number) + ": unknown key '" + key + "'");
        }
        for (const auto &axis : grid) {
            if (axis.first == key) {
                throw config_error("grid config line " + std::to_string(line_number) + ": duplicate key '" + key + "'");
            }
        }
        std::vector<double> values;
        for (const auto part : detail::split(line.substr(eq + 1), ',')) {
            const auto value = detail::parse_number<double>(detail::trim(part));
            if (!value) {
                throw config_error("grid config line " + std::to_string(line_number) + ": invalid value '" + std::string{ part } + "'");
            }
            try {
                TrainConfig probe;
                apply_setting(probe, key, *value);
                probe.validate();
            } catch (const config_error &e) {
                throw config_error("grid config line " + std::to_string(line_number) + ": " + e.what());
            }
            values.push_back(*value);
        }
        grid.emplace_back(key, std::move(values));
    });
    return grid;
}

struct GridResult {
    /// (key, value) in axis order.
    std::vector<std::pair<std::string, double>> point;
    TrainConfig config;
    EvalReport validation;
    std::vector<TraceRow> trace;

    [[nodiscard]] std::string label() const {
        std::string out;
        for (const auto &[key, value] : point) {
            out += (out.empty() ? "" : "_") + key + "=" + detail::format_short(value);
        }
        return out;
    }
};

/// Cartesian product of the grid in row-major axis order.
[[nodiscard]] inline std::vector<std::vector<std::pair<std::string, double>>> expand_grid(const Grid &grid) {
    if (grid.empty()) {
        throw argument_error("grid search needs at least one axis");
    }
    std::vector<std::vector<std::pair<std::string, double>>> points{ {} };
    for (const auto &[key, values] : grid) {
        if (values.empty()) {
            throw argument_error("grid axis '" + key + "' has no values");
        }
        std::vector<std::vector<std::pair<std::string, double>>> next;
        next.reserve(points.size() * values.size());
        for (const auto &point : points) {
            for (const double value : values) {
                auto extended = point;
                extended.emplace_back(key, value);
                next.push_back(std::move(extended));
            }
        }
        points = std::move(next);
    }
    return points;
}

/**
 * Train every grid point and rank by the final validation metric (macro-F1
 * or RMSE); ties go to higher sparsity, then to the lexicographically
 * smaller hyperparameter tuple.
 */
[[nodiscard]] inline std::vector<GridResult> grid_search(const Dataset &train_set, const Dataset &validation_set, const Grid &grid, const TrainConfig &base,
                                                         const EvalOptions &eval_options = {}) {
    std::vector<GridResult> results;
    for (auto &point : expand_grid(grid)) {
        TrainConfig config = base;
        for (const auto &[key, value] : point) {
            apply_setting(config, key, value);
        }
        auto trained = train(train_set, validation_set, config, eval_options);
        GridResult result;
        result.point = std::move(point);
        result.config = config;
        result.validation = trained.trace.back().test;
        result.trace = std::move(trained.trace);
        results.push_back(std::move(result));
    }
    std::stable_sort(results.begin(), results.end(), [](const GridResult &a, const GridResult &b) {
        if (a.validation.score() != b.validation.score()) {
            return a.validation.score() > b.validation.score();
        }
        if (a.validation.sparsity.elements != b.validation.sparsity.elements) {
            return a.validation.sparsity.elements > b.validation.sparsity.elements;
        }
        for (std::size_t i = 0; i < a.point.size(); ++i) {
            if (a.point[i].second != b.point[i].second) {
                return a.point[i].second < b.point[i].second;
            }
        }
        return false;
    });
    return results;
}

/// rank, one column per axis, metric, sparsity.
[[nodiscard]] inline std::string grid_results_csv(const std::vector<GridResult> &results) {
    if (results.empty()) {
        return {};
    }
    const Task task = results.front().validation.task;
    std::string out = "rank";
    for (const auto &[key, value] : results.front().point) {
        out += ',' + key;
    }
    out += task == Task::classification ? ",micro_f1,macro_f1" : ",rmse,mae";
    out += ",sparsity\n";
    for (std::size_t r = 0; r < results.size(); ++r) {
        const auto &result = results[r];
        out += std::to_string(r + 1);
        for (const auto &[key, value] : result.point) {
            out += ',' + detail::format_double(value);
        }
        if (task == Task::classification) {
            out += ',' + detail::format_double(result.validation.micro_f1) + ',' + detail::format_double(result.validation.macro_f1);
        } else {
            out += ',' + detail::format_double(result.validation.rmse) + ',' + detail::format_double(result.validation.mae);
        }
        out += ',' + detail::format_double(result.validation.sparsity.elements) + '\n';
    }
    return out;
}

}  // namespace shfm
