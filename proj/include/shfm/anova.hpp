#pragma once

#include "shfm/errors.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace shfm {

/**
 * ANOVA kernel of order m over the positions in `support`:
 * the sum over strictly increasing m-tuples of prod(a[i] * b[i]).
 *
 * Evaluated with the multi-linearity recursion
 *   A^m(a, b) = a_i b_i A^{m-1}(a_-i, b_-i) + A^m(a_-i, b_-i)
 * as a dynamic program over the support, O(m * |support|).
 * Returns 0 when m exceeds the support size.
 */
[[nodiscard]] inline double anova_kernel(int order, std::span<const double> a, std::span<const double> b, std::span<const std::size_t> support) {
    if (order < 1) {
        throw argument_error("anova kernel order must be >= 1, got " + std::to_string(order));
    }
    const auto m = static_cast<std::size_t>(order);
    // table[j] holds A^j over the prefix of the support processed so far
    std::vector<double> table(m + 1, 0.0);
    table[0] = 1.0;
    for (const std::size_t i : support) {
        const double product = a[i] * b[i];
        for (std::size_t j = m; j >= 1; --j) {
            table[j] += product * table[j - 1];
        }
    }
    return table[m];
}

/// Kernel over every position of the (equal-length) vectors.
[[nodiscard]] inline double anova_kernel(int order, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw shape_error("anova kernel: vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    std::vector<std::size_t> support(a.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        support[i] = i;
    }
    return anova_kernel(order, a, b, support);
}

}  // namespace shfm
