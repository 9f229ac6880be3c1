#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/sparse_vector.hpp"
#include "shfm/text.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace shfm {

/// One record as field name -> raw value.
using FieldRecord = std::map<std::string, std::string>;

enum class FieldKind { categorical, numeric };

/**
 * Ordered one-hot layout for categorical fields plus pass-through numeric
 * fields. Each categorical field owns a contiguous block of indices sized to
 * its vocabulary; each numeric field owns a single index. Indices are 1-based.
 */
class FieldSchema {
  public:
    struct Field {
        std::string name;
        FieldKind kind{ FieldKind::categorical };
        feature_index offset{ 0 };  // index of the first slot minus one
        std::vector<std::string> vocabulary;
        std::unordered_map<std::string, feature_index> slots;  // value -> 1-based slot within the field

        [[nodiscard]] std::size_t width() const { return kind == FieldKind::numeric ? 1 : vocabulary.size(); }
    };

    void add_categorical(std::string name, const std::vector<std::string> &vocabulary) {
        Field field;
        field.name = std::move(name);
        field.kind = FieldKind::categorical;
        for (const auto &value : vocabulary) {
            if (field.slots.emplace(value, static_cast<feature_index>(field.vocabulary.size() + 1)).second) {
                field.vocabulary.push_back(value);
            }
        }
        append(std::move(field));
    }

    void add_numeric(std::string name) {
        Field field;
        field.name = std::move(name);
        field.kind = FieldKind::numeric;
        append(std::move(field));
    }

    /**
     * Build from training records. Fields appear in the order given; categorical
     * vocabularies list values in order of first appearance.
     */
    [[nodiscard]] static FieldSchema fit(const std::vector<FieldRecord> &records, const std::vector<std::pair<std::string, FieldKind>> &fields) {
        FieldSchema schema;
        for (const auto &[name, kind] : fields) {
            if (kind == FieldKind::numeric) {
                schema.add_numeric(name);
                continue;
            }
            std::vector<std::string> vocabulary;
            for (const auto &record : records) {
                if (const auto it = record.find(name); it != record.end() && !it->second.empty()) {
                    vocabulary.push_back(it->second);
                }
            }
            schema.add_categorical(name, vocabulary);
        }
        return schema;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<Field> &fields() const noexcept { return fields_; }

    [[nodiscard]] bool contains(const std::string &name) const { return by_name_.contains(name); }

    /// Unseen categorical values and empty cells encode to nothing.
    [[nodiscard]] SparseVector encode(const FieldRecord &record, std::string_view skip_field = {}) const {
        std::vector<std::pair<feature_index, double>> entries;
        for (const auto &[name, raw] : record) {
            if (!skip_field.empty() && name == skip_field) {
                continue;
            }
            const auto it = by_name_.find(name);
            if (it == by_name_.end()) {
                throw schema_error("field '" + name + "' is not in the schema");
            }
            if (raw.empty()) {
                continue;
            }
            const Field &field = fields_[it->second];
            if (field.kind == FieldKind::numeric) {
                const auto value = detail::parse_number<double>(detail::trim(raw));
                if (!value) {
                    throw schema_error("numeric field '" + name + "' has value '" + raw + "'");
                }
                entries.emplace_back(field.offset + 1, *value);
            } else if (const auto slot = field.slots.find(raw); slot != field.slots.end()) {
                entries.emplace_back(field.offset + slot->second, 1.0);
            }
        }
        std::sort(entries.begin(), entries.end());
        std::vector<feature_index> indices;
        std::vector<double> values;
        indices.reserve(entries.size());
        values.reserve(entries.size());
        for (const auto &[idx, value] : entries) {
            indices.push_back(idx);
            values.push_back(value);
        }
        return SparseVector(std::move(indices), std::move(values), dim_);
    }

  private:
    void append(Field field) {
        if (by_name_.contains(field.name)) {
            throw schema_error("duplicate field '" + field.name + "'");
        }
        field.offset = static_cast<feature_index>(dim_);
        dim_ += field.width();
        by_name_.emplace(field.name, fields_.size());
        fields_.push_back(std::move(field));
    }

    std::vector<Field> fields_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::size_t dim_{ 0 };
};

/**
 * Encode records into a Dataset. When label_field is nonempty its value is the
 * label; otherwise every label is 0.
 */
[[nodiscard]] inline Dataset encode_fields(const std::vector<FieldRecord> &records, const FieldSchema &schema, const std::string &label_field = {},
                                           Task task = Task::regression, std::size_t num_classes = 1) {
    Dataset dataset(task, schema.dim(), num_classes);
    for (const auto &record : records) {
        double label = 0.0;
        if (!label_field.empty()) {
            const auto it = record.find(label_field);
            const auto value = it == record.end() ? std::nullopt : detail::parse_number<double>(detail::trim(it->second));
            if (!value) {
                throw label_error("record has no numeric '" + label_field + "' label");
            }
            label = *value;
        }
        dataset.push_back(schema.encode(record, label_field), label);
    }
    return dataset;
}

/// Header-bearing CSV; double-quoted cells may contain commas and "" escapes.
[[nodiscard]] inline std::vector<FieldRecord> parse_csv_records(std::string_view text) {
    auto split_row = [](std::string_view line, std::size_t line_number) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (std::size_t p = 0; p < line.size(); ++p) {
            const char ch = line[p];
            if (quoted) {
                if (ch == '"' && p + 1 < line.size() && line[p + 1] == '"') {
                    cell += '"';
                    ++p;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    cell += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                cells.push_back(std::move(cell));
                cell.clear();
            } else if (ch != '\r') {
                cell += ch;
            }
        }
        if (quoted) {
            throw parse_error("unterminated quoted cell", line_number);
        }
        cells.push_back(std::move(cell));
        return cells;
    };

    std::vector<std::string> header;
    std::vector<FieldRecord> records;
    detail::for_each_line(text, [&](std::string_view line, std::size_t line_number) {
        if (detail::trim(line).empty()) {
            return;
        }
        auto cells = split_row(line, line_number);
        if (header.empty()) {
            header = std::move(cells);
            return;
        }
        if (cells.size() != header.size()) {
            throw parse_error("expected " + std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()), line_number);
        }
        FieldRecord record;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            record.emplace(header[c], std::move(cells[c]));
        }
        records.push_back(std::move(record));
    });
    return records;
}

}  // namespace shfm
