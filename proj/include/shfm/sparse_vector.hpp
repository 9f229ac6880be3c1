#pragma once

#include "shfm/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace shfm {

/// Feature id. External ids are 1-based; id 0 is the context feature.
using feature_index = std::uint32_t;

/// Constant value of the context feature x0.
inline constexpr double context_value = 1.0;

/**
 * One sample in d dimensions stored as ascending (index, value) pairs.
 *
 * Indices are in [1, d], strictly ascending, and no stored value is zero.
 * Zero values passed to the constructor are dropped.
 */
class SparseVector {
  public:
    SparseVector() = default;

    explicit SparseVector(std::size_t dim) : dim_{ dim } {}

    SparseVector(std::vector<feature_index> indices, std::vector<double> values, std::size_t dim)
        : dim_{ dim } {
        if (indices.size() != values.size()) {
            throw argument_error("sparse vector: " + std::to_string(indices.size()) + " indices but " + std::to_string(values.size()) + " values");
        }
        indices_.reserve(indices.size());
        values_.reserve(values.size());
        feature_index previous = 0;
        for (std::size_t p = 0; p < indices.size(); ++p) {
            const feature_index idx = indices[p];
            if (idx == 0 || idx > dim) {
                throw argument_error("sparse vector: index " + std::to_string(idx) + " outside [1, " + std::to_string(dim) + "]");
            }
            if (p > 0 && idx <= previous) {
                throw argument_error("sparse vector: indices must be strictly ascending");
            }
            previous = idx;
            if (values[p] != 0.0) {
                indices_.push_back(idx);
                values_.push_back(values[p]);
            }
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t nnz() const noexcept { return indices_.size(); }
    [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }

    [[nodiscard]] std::span<const feature_index> indices() const noexcept { return indices_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    [[nodiscard]] feature_index index(std::size_t p) const { return indices_[p]; }
    [[nodiscard]] double value(std::size_t p) const { return values_[p]; }

    // Only grows the dimension; shrinking could strand stored indices.
    void widen(std::size_t dim) {
        if (dim < dim_) {
            throw shape_error("cannot shrink sparse vector from " + std::to_string(dim_) + " to " + std::to_string(dim));
        }
        dim_ = dim;
    }

    friend bool operator==(const SparseVector &, const SparseVector &) = default;

  private:
    std::vector<feature_index> indices_;
    std::vector<double> values_;
    std::size_t dim_{ 0 };
};

}  // namespace shfm
