#pragma once

#include "shfm/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace shfm {

/**
 * Consecutive mini-batches over an (optionally seeded-shuffled) sample order.
 * The last batch may be short. Equal seeds give equal orders.
 */
class Batches {
  public:
    Batches(std::size_t num_samples, std::size_t batch_size, std::optional<std::uint64_t> shuffle_seed = std::nullopt)
        : order_(num_samples), batch_size_{ batch_size } {
        if (batch_size == 0) {
            throw argument_error("batch size must be positive");
        }
        std::iota(order_.begin(), order_.end(), std::size_t{ 0 });
        if (shuffle_seed) {
            std::mt19937_64 rng(*shuffle_seed);
            std::shuffle(order_.begin(), order_.end(), rng);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return (order_.size() + batch_size_ - 1) / batch_size_; }

    [[nodiscard]] std::span<const std::size_t> operator[](std::size_t batch) const {
        const std::size_t begin = batch * batch_size_;
        const std::size_t end = std::min(order_.size(), begin + batch_size_);
        return std::span<const std::size_t>(order_).subspan(begin, end - begin);
    }

    [[nodiscard]] const std::vector<std::size_t> &order() const noexcept { return order_; }

    class iterator {
      public:
        using value_type = std::span<const std::size_t>;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        iterator(const Batches *owner, std::size_t batch) : owner_{ owner }, batch_{ batch } {}

        value_type operator*() const { return (*owner_)[batch_]; }
        iterator &operator++() {
            ++batch_;
            return *this;
        }
        iterator operator++(int) {
            auto copy = *this;
            ++batch_;
            return copy;
        }
        bool operator==(const iterator &other) const { return batch_ == other.batch_; }

      private:
        const Batches *owner_{ nullptr };
        std::size_t batch_{ 0 };
    };

    [[nodiscard]] iterator begin() const { return { this, 0 }; }
    [[nodiscard]] iterator end() const { return { this, size() }; }

  private:
    std::vector<std::size_t> order_;
    std::size_t batch_size_;
};

}  // namespace shfm
