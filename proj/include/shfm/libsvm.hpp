#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/sparse_vector.hpp"
#include "shfm/text.hpp"

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shfm {

struct LibsvmOptions {
    /// Fixed dimension; indices above it are rejected. Defaults to the max index seen.
    std::optional<std::size_t> dim;
    /// Fixed class count for classification. Defaults to max label + 1 (at least 2).
    std::optional<std::size_t> num_classes;
};

/**
 * Parse libsvm/svmlight text: one sample per line, "<label> <idx>:<val> ...".
 *
 * '#' starts a comment running to end of line and blank lines are skipped.
 * Feature indices are 1-based and strictly ascending; explicit zero values
 * are dropped. Errors carry the 1-based line number.
 */
[[nodiscard]] inline Dataset parse_libsvm(std::string_view text, Task task, const LibsvmOptions &options = {}) {
    std::vector<SparseVector> samples;
    std::vector<double> labels;
    std::size_t max_index = 0;
    std::size_t max_class = 0;

    struct Row {
        std::vector<feature_index> indices;
        std::vector<double> values;
    };
    std::vector<Row> rows;

    detail::for_each_line(text, [&](std::string_view line, std::size_t line_number) {
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tokens = detail::split_whitespace(line);
        if (tokens.empty()) {
            return;
        }

        double label = 0.0;
        if (task == Task::classification) {
            const auto id = detail::parse_number<unsigned long long>(tokens[0]);
            if (!id) {
                throw label_error("line " + std::to_string(line_number) + ": class label '" + std::string{ tokens[0] } + "' is not a nonnegative integer");
            }
            label = static_cast<double>(*id);
            max_class = std::max<std::size_t>(max_class, *id);
        } else {
            const auto value = detail::parse_number<double>(tokens[0]);
            if (!value) {
                throw parse_error("malformed label '" + std::string{ tokens[0] } + "'", line_number);
            }
            label = *value;
        }

        Row row;
        row.indices.reserve(tokens.size() - 1);
        row.values.reserve(tokens.size() - 1);
        feature_index previous = 0;
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            const auto token = tokens[t];
            const auto colon = token.find(':');
            if (colon == std::string_view::npos) {
                throw parse_error("malformed feature token '" + std::string{ token } + "'", line_number);
            }
            const auto idx = detail::parse_number<feature_index>(token.substr(0, colon));
            const auto value = detail::parse_number<double>(token.substr(colon + 1));
            if (!idx || !value) {
                throw parse_error("malformed feature token '" + std::string{ token } + "'", line_number);
            }
            if (*idx == 0) {
                throw format_error("feature index 0 is reserved", line_number);
            }
            if (*idx <= previous) {
                throw format_error("feature indices must be strictly ascending (" + std::to_string(*idx) + " after " + std::to_string(previous) + ")", line_number);
            }
            if (options.dim && *idx > *options.dim) {
                throw format_error("feature index " + std::to_string(*idx) + " exceeds dimension " + std::to_string(*options.dim), line_number);
            }
            previous = *idx;
            max_index = std::max<std::size_t>(max_index, *idx);
            if (*value != 0.0) {
                row.indices.push_back(*idx);
                row.values.push_back(*value);
            }
        }
        rows.push_back(std::move(row));
        labels.push_back(label);
    });

    const std::size_t dim = options.dim.value_or(max_index);
    std::size_t num_classes = 1;
    if (task == Task::classification) {
        num_classes = options.num_classes.value_or(std::max<std::size_t>(2, labels.empty() ? 2 : max_class + 1));
    }
    Dataset dataset(task, dim, num_classes);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        dataset.push_back(SparseVector(std::move(rows[s].indices), std::move(rows[s].values), dim), labels[s]);
    }
    return dataset;
}

/// Inverse of parse_libsvm; values are written with 17 significant digits.
[[nodiscard]] inline std::string write_libsvm(const Dataset &dataset) {
    std::string out;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
        if (dataset.task() == Task::classification) {
            out += std::to_string(dataset.class_label(s));
        } else {
            out += detail::format_double(dataset.label(s));
        }
        const auto &x = dataset.sample(s);
        for (std::size_t p = 0; p < x.nnz(); ++p) {
            out += ' ';
            out += std::to_string(x.index(p));
            out += ':';
            out += detail::format_double(x.value(p));
        }
        out += '\n';
    }
    return out;
}

[[nodiscard]] inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw data_error("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

[[nodiscard]] inline Dataset read_libsvm_file(const std::string &path, Task task, const LibsvmOptions &options = {}) {
    return parse_libsvm(read_text_file(path), task, options);
}

/// Train/test pair sharing one dimension and class count (max over both files).
[[nodiscard]] inline std::pair<Dataset, Dataset> read_libsvm_pair(const std::string &train_path, const std::string &test_path, Task task) {
    auto train = read_libsvm_file(train_path, task);
    auto test = read_libsvm_file(test_path, task);
    const std::size_t dim = std::max(train.dim(), test.dim());
    const std::size_t classes = std::max(train.num_classes(), test.num_classes());
    train.widen(dim, classes);
    test.widen(dim, classes);
    return { std::move(train), std::move(test) };
}

}  // namespace shfm
