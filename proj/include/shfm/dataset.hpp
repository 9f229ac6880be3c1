#pragma once

#include "shfm/errors.hpp"
#include "shfm/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shfm {

enum class Task { regression, classification };

[[nodiscard]] inline std::string_view to_string(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

[[nodiscard]] inline Task parse_task(std::string_view name) {
    if (name == "regression") {
        return Task::regression;
    }
    if (name == "classification") {
        return Task::classification;
    }
    throw argument_error("unknown task '" + std::string{ name } + "'");
}

/**
 * Labeled sample collection.
 *
 * Regression labels are arbitrary reals and c == 1. Classification labels
 * are integral class ids stored as doubles in [0, c).
 */
class Dataset {
  public:
    Dataset() = default;

    Dataset(Task task, std::size_t dim, std::size_t num_classes)
        : task_{ task }, dim_{ dim }, num_classes_{ task == Task::regression ? 1 : num_classes } {}

    Dataset(Task task, std::size_t dim, std::size_t num_classes, std::vector<SparseVector> samples, std::vector<double> labels)
        : Dataset(task, dim, num_classes) {
        if (samples.size() != labels.size()) {
            throw argument_error("dataset: sample and label counts differ");
        }
        samples_.reserve(samples.size());
        labels_.reserve(labels.size());
        for (std::size_t s = 0; s < samples.size(); ++s) {
            push_back(std::move(samples[s]), labels[s]);
        }
    }

    void push_back(SparseVector sample, double label) {
        if (sample.dim() != dim_) {
            throw shape_error("dataset: sample has dim " + std::to_string(sample.dim()) + ", expected " + std::to_string(dim_));
        }
        check_label(label);
        samples_.push_back(std::move(sample));
        labels_.push_back(label);
    }

    [[nodiscard]] Task task() const noexcept { return task_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t num_classes() const noexcept { return num_classes_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }

    [[nodiscard]] const SparseVector &sample(std::size_t s) const { return samples_[s]; }
    [[nodiscard]] double label(std::size_t s) const { return labels_[s]; }
    [[nodiscard]] std::size_t class_label(std::size_t s) const { return static_cast<std::size_t>(labels_[s]); }

    [[nodiscard]] const std::vector<SparseVector> &samples() const noexcept { return samples_; }
    [[nodiscard]] const std::vector<double> &labels() const noexcept { return labels_; }

    /// Raise d and/or c so that two datasets can share one model shape.
    void widen(std::size_t dim, std::size_t num_classes) {
        if (dim < dim_) {
            throw shape_error("dataset: cannot shrink dimension from " + std::to_string(dim_) + " to " + std::to_string(dim));
        }
        dim_ = dim;
        for (auto &sample : samples_) {
            sample.widen(dim);
        }
        if (task_ == Task::classification) {
            num_classes_ = std::max(num_classes_, num_classes);
        }
    }

    /// Copy of the samples at the given positions, in that order.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> positions) const {
        Dataset out(task_, dim_, num_classes_);
        out.samples_.reserve(positions.size());
        out.labels_.reserve(positions.size());
        for (const std::size_t s : positions) {
            out.samples_.push_back(samples_[s]);
            out.labels_.push_back(labels_[s]);
        }
        return out;
    }

    friend bool operator==(const Dataset &, const Dataset &) = default;

  private:
    void check_label(double label) const {
        if (!std::isfinite(label)) {
            throw label_error("dataset: non-finite label");
        }
        if (task_ == Task::classification) {
            if (label < 0.0 || label != std::floor(label) || label >= static_cast<double>(num_classes_)) {
                throw label_error("dataset: class label " + std::to_string(label) + " outside [0, " + std::to_string(num_classes_) + ")");
            }
        }
    }

    Task task_{ Task::regression };
    std::size_t dim_{ 0 };
    std::size_t num_classes_{ 1 };
    std::vector<SparseVector> samples_;
    std::vector<double> labels_;
};

}  // namespace shfm
