#pragma once

#include "shfm/errors.hpp"
#include "shfm/evaluation.hpp"
#include "shfm/grid_search.hpp"
#include "shfm/libsvm.hpp"
#include "shfm/model_io.hpp"
#include "shfm/trainer.hpp"

#include <CLI11.hpp>

#include <cstddef>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace shfm::cli {

enum exit_code : int { ok = 0, usage = 1, data = 2, numeric = 3 };

namespace detail {

struct TrainFlags {
    std::string train_path;
    std::string test_path;
    std::string task{ "regression" };
    std::string model{ "shfm" };
    TrainConfig config;
    std::uint64_t seed{ 1 };
};

inline void add_train_flags(CLI::App &cmd, TrainFlags &flags) {
    cmd.add_option("--task", flags.task, "regression or classification")->check(CLI::IsMember({ "regression", "classification" }))->capture_default_str();
    cmd.add_option("--model", flags.model, "linear, fm, anova2, shfm, or sha2")->check(CLI::IsMember({ "linear", "fm", "anova2", "shfm", "sha2" }))->capture_default_str();
    cmd.add_option("--k", flags.config.rank, "latent dimension count")->capture_default_str();
    cmd.add_option("--epochs", flags.config.epochs)->capture_default_str();
    cmd.add_option("--batch-size", flags.config.batch_size)->capture_default_str();
    cmd.add_option("--alpha", flags.config.hp.alpha)->capture_default_str();
    cmd.add_option("--mu", flags.config.hp.mu)->capture_default_str();
    cmd.add_option("--gamma", flags.config.hp.gamma)->capture_default_str();
    cmd.add_option("--l1", flags.config.hp.lambda1)->capture_default_str();
    cmd.add_option("--l2", flags.config.hp.lambda2)->capture_default_str();
    cmd.add_option("--init-sigma", flags.config.hp.init_sigma)->capture_default_str();
    cmd.add_option("--seed", flags.seed)->capture_default_str();
}

inline TrainConfig finish_config(const TrainFlags &flags) {
    TrainConfig config = flags.config;
    config.kind = parse_model_kind(flags.model);
    config.hp.seed = flags.seed;
    config.validate();
    return config;
}

/// Training data plus an optional evaluation set sharing its shape.
inline std::pair<Dataset, Dataset> load_pair(const std::string &train_path, const std::string &test_path, Task task) {
    if (test_path.empty()) {
        auto train_set = read_libsvm_file(train_path, task);
        Dataset empty(task, train_set.dim(), train_set.num_classes());
        return { std::move(train_set), std::move(empty) };
    }
    return read_libsvm_pair(train_path, test_path, task);
}

/// Data file shaped to an existing model; indices beyond the model's d are a shape error.
inline Dataset load_for_model(const std::string &path, const FactorizedModel &model) {
    auto data = read_libsvm_file(path, model.task());
    if (data.dim() > model.dim()) {
        throw shape_error("data dimension " + std::to_string(data.dim()) + " exceeds model dimension " + std::to_string(model.dim()));
    }
    if (model.task() == Task::classification && data.num_classes() > model.num_heads()) {
        throw shape_error("data has " + std::to_string(data.num_classes()) + " classes, model has " + std::to_string(model.num_heads()));
    }
    data.widen(model.dim(), model.num_heads());
    return data;
}

inline LoadedModel load_model_file(const std::string &path) { return load_model(read_text_file(path)); }

}  // namespace detail

/**
 * Entry point for the shfm command line. Returns the process exit code:
 * 0 success, 1 usage error, 2 data/model error, 3 numeric failure.
 * Every error prints one diagnostic line to `err`.
 */
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{ "Sparse factorization machines with strong hierarchy, trained by FTRL-Proximal", "shfm" };
    app.require_subcommand(1);
    app.fallthrough(false);

    // train
    detail::TrainFlags train_flags;
    std::string train_out, train_trace;
    bool save_state = false;
    auto *train_cmd = app.add_subcommand("train", "train a model");
    train_cmd->add_option("--train", train_flags.train_path, "training data (libsvm)")->required();
    train_cmd->add_option("--test", train_flags.test_path, "test data evaluated after each epoch (libsvm)");
    detail::add_train_flags(*train_cmd, train_flags);
    train_cmd->add_option("--out", train_out, "model file")->required();
    train_cmd->add_option("--trace", train_trace, "per-epoch trace CSV");
    train_cmd->add_flag("--save-state", save_state, "append optimizer state to the model file");

    // predict
    std::string predict_model, predict_data, predict_out;
    auto *predict_cmd = app.add_subcommand("predict", "write one prediction per sample");
    predict_cmd->add_option("--model", predict_model)->required();
    predict_cmd->add_option("--data", predict_data)->required();
    predict_cmd->add_option("--out", predict_out, "predictions file (default: stdout)");

    // evaluate
    std::string eval_model, eval_data, eval_out;
    double eval_tol = 1e-8;
    bool eval_exhaustive = false;
    auto *evaluate_cmd = app.add_subcommand("evaluate", "loss, task metrics, sparsity, hierarchy audit");
    evaluate_cmd->add_option("--model", eval_model)->required();
    evaluate_cmd->add_option("--data", eval_data)->required();
    evaluate_cmd->add_option("--out", eval_out, "write the key=value report here too");
    evaluate_cmd->add_option("--tol", eval_tol)->capture_default_str();
    evaluate_cmd->add_flag("--exhaustive", eval_exhaustive, "count violating feature pairs");

    // grid-search
    detail::TrainFlags grid_flags;
    std::string grid_config, grid_out, grid_trace_dir;
    auto *grid_cmd = app.add_subcommand("grid-search", "train every point of a hyperparameter grid");
    grid_cmd->add_option("--config", grid_config, "key=v1,v2,... lines (default: l1 x k grid)");
    grid_cmd->add_option("--train", grid_flags.train_path)->required();
    grid_cmd->add_option("--validation,--test", grid_flags.test_path)->required();
    detail::add_train_flags(*grid_cmd, grid_flags);
    grid_cmd->add_option("--out", grid_out, "ranked results CSV");
    grid_cmd->add_option("--trace-dir", grid_trace_dir, "directory for one trace CSV per grid point");

    // audit
    std::string audit_model;
    double audit_tol = 1e-8;
    bool audit_exhaustive = false;
    auto *audit_cmd = app.add_subcommand("audit", "strong-hierarchy audit of a hierarchical model");
    audit_cmd->add_option("--model", audit_model)->required();
    audit_cmd->add_option("--tol", audit_tol)->capture_default_str();
    audit_cmd->add_flag("--exhaustive", audit_exhaustive, "count violating feature pairs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    } catch (const CLI::ParseError &e) {
        err << "shfm: " << e.what() << '\n';
        return exit_code::usage;
    }

    try {
        if (train_cmd->parsed()) {
            const TrainConfig config = detail::finish_config(train_flags);
            const Task task = parse_task(train_flags.task);
            auto [train_set, test_set] = detail::load_pair(train_flags.train_path, train_flags.test_path, task);
            if (task == Task::regression && train_set.num_classes() != 1) {
                throw argument_error("regression data must have one output");
            }
            const bool has_test = !test_set.empty();
            auto result = train(train_set, has_test ? test_set : train_set, config);
            write_text_file(train_out, save_model(result.model, save_state ? &result.state : nullptr));
            if (!train_trace.empty()) {
                write_text_file(train_trace, trace_csv(result.trace, task));
            }
            out << result.trace.back().test.to_key_values() << '\n';
        } else if (predict_cmd->parsed()) {
            const auto loaded = detail::load_model_file(predict_model);
            const auto data = detail::load_for_model(predict_data, loaded.model);
            const auto outputs = predict_dataset(loaded.model, data);
            const std::size_t c = loaded.model.num_heads();
            std::string text;
            for (std::size_t s = 0; s < data.size(); ++s) {
                const auto scores = std::span<const double>(outputs).subspan(s * c, c);
                if (loaded.model.task() == Task::classification) {
                    text += std::to_string(argmax(scores));
                    for (const double score : scores) {
                        text += ' ' + shfm::detail::format_double(score);
                    }
                } else {
                    text += shfm::detail::format_double(scores[0]);
                }
                text += '\n';
            }
            if (predict_out.empty()) {
                out << text;
            } else {
                write_text_file(predict_out, text);
            }
        } else if (evaluate_cmd->parsed()) {
            const auto loaded = detail::load_model_file(eval_model);
            const auto data = detail::load_for_model(eval_data, loaded.model);
            EvalOptions options;
            options.audit_tol = eval_tol;
            options.exhaustive_audit = eval_exhaustive;
            const auto report = evaluate(loaded.model, data, options);
            out << report.to_key_values() << '\n' << report.to_table();
            if (!eval_out.empty()) {
                write_text_file(eval_out, report.to_key_values() + '\n');
            }
        } else if (grid_cmd->parsed()) {
            const TrainConfig base = detail::finish_config(grid_flags);
            const Task task = parse_task(grid_flags.task);
            const Grid grid = grid_config.empty() ? default_grid() : parse_grid_config(read_text_file(grid_config));
            auto [train_set, validation_set] = detail::load_pair(grid_flags.train_path, grid_flags.test_path, task);
            const auto results = grid_search(train_set, validation_set, grid, base);
            const std::string table = grid_results_csv(results);
            out << table;
            if (!grid_out.empty()) {
                write_text_file(grid_out, table);
            }
            if (!grid_trace_dir.empty()) {
                std::filesystem::create_directories(grid_trace_dir);
                for (const auto &result : results) {
                    write_text_file((std::filesystem::path(grid_trace_dir) / (result.label() + ".csv")).string(), trace_csv(result.trace, task));
                }
            }
        } else if (audit_cmd->parsed()) {
            const auto loaded = detail::load_model_file(audit_model);
            const auto report = hierarchy_audit(loaded.model, audit_tol, audit_exhaustive);
            out << "zero_rows=" << report.zero_rows << " orthogonal_nonzero_rows=" << report.orthogonal_nonzero_rows
                << " context_is_zero=" << (report.context_is_zero ? 1 : 0);
            if (report.violating_pairs) {
                out << " violating_pairs=" << *report.violating_pairs << " nonzero_pairs=" << *report.nonzero_pairs;
            }
            out << " assumptions_hold=" << (report.assumptions_hold() ? 1 : 0) << '\n';
        }
    } catch (const argument_error &e) {
        err << "shfm: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const numeric_error &e) {
        err << "shfm: numeric failure: " << e.what() << '\n';
        return exit_code::numeric;
    } catch (const data_error &e) {
        err << "shfm: " << e.what() << '\n';
        return exit_code::data;
    } catch (const std::exception &e) {
        err << "shfm: " << e.what() << '\n';
        return exit_code::data;
    }
    return exit_code::ok;
}

}  // namespace shfm::cli
