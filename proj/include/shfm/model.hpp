#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/sparse_vector.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shfm {

enum class ModelKind { linear, fm, anova2, shfm, sha2 };

inline constexpr ModelKind all_model_kinds[] = { ModelKind::linear, ModelKind::fm, ModelKind::anova2, ModelKind::shfm, ModelKind::sha2 };

[[nodiscard]] inline std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::linear: return "linear";
        case ModelKind::fm: return "fm";
        case ModelKind::anova2: return "anova2";
        case ModelKind::shfm: return "shfm";
        case ModelKind::sha2: return "sha2";
    }
    return "unknown";
}

[[nodiscard]] inline ModelKind parse_model_kind(std::string_view name) {
    for (const ModelKind kind : all_model_kinds) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw argument_error("unknown model kind '" + std::string{ name } + "'");
}

/// Kinds that append the context feature x0 = 1 and learn the row v0.
[[nodiscard]] constexpr bool is_hierarchical(ModelKind kind) noexcept { return kind == ModelKind::shfm || kind == ModelKind::sha2; }

/// Kinds whose per-factor weights beta are learned (otherwise fixed at 1).
[[nodiscard]] constexpr bool learns_beta(ModelKind kind) noexcept { return kind == ModelKind::anova2 || kind == ModelKind::sha2; }

[[nodiscard]] constexpr bool is_factorized(ModelKind kind) noexcept { return kind != ModelKind::linear; }

/**
 * Parameters of every supported model kind, one head per output.
 *
 * Factorized kinds store V' as (d+1) x k, row-major, with row 0 the context
 * latent factor v0; row 0 stays zero for fm/anova2. The linear kind stores
 * weights indexed by feature id (slot 0 unused) and has k == 0.
 */
class FactorizedModel {
  public:
    struct Head {
        double bias{ 0.0 };
        std::vector<double> beta;
        std::vector<double> factors;
        std::vector<double> weights;

        friend bool operator==(const Head &, const Head &) = default;
    };

    FactorizedModel() = default;

    FactorizedModel(ModelKind kind, Task task, std::size_t num_heads, std::size_t dim, std::size_t rank)
        : kind_{ kind }, task_{ task }, dim_{ dim }, rank_{ is_factorized(kind) ? rank : 0 } {
        if (num_heads == 0) {
            throw argument_error("model needs at least one head");
        }
        if (task == Task::regression && num_heads != 1) {
            throw argument_error("regression models have exactly one head");
        }
        if (task == Task::classification && num_heads < 2) {
            throw argument_error("classification models need at least two heads");
        }
        if (is_factorized(kind) && rank == 0) {
            throw argument_error("factorized models need k >= 1");
        }
        heads_.resize(num_heads);
        for (auto &head : heads_) {
            if (is_factorized(kind)) {
                head.beta.assign(rank_, 1.0);
                head.factors.assign((dim + 1) * rank_, 0.0);
            } else {
                head.weights.assign(dim + 1, 0.0);
            }
        }
    }

    [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
    [[nodiscard]] Task task() const noexcept { return task_; }
    [[nodiscard]] std::size_t num_heads() const noexcept { return heads_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t rank() const noexcept { return rank_; }
    /// Rows of V' (d + 1) or of the linear weight vector (d + 1, slot 0 unused).
    [[nodiscard]] std::size_t rows() const noexcept { return dim_ + 1; }

    [[nodiscard]] Head &head(std::size_t h) { return heads_[h]; }
    [[nodiscard]] const Head &head(std::size_t h) const { return heads_[h]; }

    [[nodiscard]] double &factor(std::size_t h, std::size_t row, std::size_t f) { return heads_[h].factors[row * rank_ + f]; }
    [[nodiscard]] double factor(std::size_t h, std::size_t row, std::size_t f) const { return heads_[h].factors[row * rank_ + f]; }

    [[nodiscard]] std::span<double> factor_row(std::size_t h, std::size_t row) { return std::span<double>(heads_[h].factors).subspan(row * rank_, rank_); }
    [[nodiscard]] std::span<const double> factor_row(std::size_t h, std::size_t row) const {
        return std::span<const double>(heads_[h].factors).subspan(row * rank_, rank_);
    }

    friend bool operator==(const FactorizedModel &, const FactorizedModel &) = default;

  private:
    ModelKind kind_{ ModelKind::shfm };
    Task task_{ Task::regression };
    std::size_t dim_{ 0 };
    std::size_t rank_{ 0 };
    std::vector<Head> heads_;
};

/**
 * Visit the support set I of x for this model: (0, x0) first for hierarchical
 * kinds, then every stored (index, value) of x.
 */
template <typename F>
void for_each_support(const FactorizedModel &model, const SparseVector &x, F &&visit) {
    if (is_hierarchical(model.kind())) {
        visit(std::size_t{ 0 }, context_value);
    }
    for (std::size_t p = 0; p < x.nnz(); ++p) {
        visit(static_cast<std::size_t>(x.index(p)), x.value(p));
    }
}

/**
 * Per head and factor: sums[f] = <V'_{:,f}, x'> over I and squares[f] = sum over I of (V_{i,f} x_i)^2.
 * Layout is head-major, c * k entries each.
 */
struct FactorDots {
    std::size_t rank{ 0 };
    std::vector<double> sums;
    std::vector<double> squares;

    [[nodiscard]] std::span<const double> head_sums(std::size_t h) const { return std::span<const double>(sums).subspan(h * rank, rank); }
    [[nodiscard]] std::span<const double> head_squares(std::size_t h) const { return std::span<const double>(squares).subspan(h * rank, rank); }

    /// Second-order ANOVA kernel A^2(V'_{:,f}, x') from the cached dots.
    [[nodiscard]] double kernel(std::size_t h, std::size_t f) const {
        const double s = sums[h * rank + f];
        return 0.5 * (s * s - squares[h * rank + f]);
    }
};

inline void check_input(const FactorizedModel &model, const SparseVector &x) {
    if (x.dim() != model.dim()) {
        throw shape_error("sample dimension " + std::to_string(x.dim()) + " does not match model dimension " + std::to_string(model.dim()));
    }
}

/// Fill `dots` for x in one pass over the support, O(c * k * card(I)).
inline void compute_factor_dots(const FactorizedModel &model, const SparseVector &x, FactorDots &dots) {
    check_input(model, x);
    const std::size_t k = model.rank();
    dots.rank = k;
    dots.sums.assign(model.num_heads() * k, 0.0);
    dots.squares.assign(model.num_heads() * k, 0.0);
    if (k == 0) {
        return;
    }
    for (std::size_t h = 0; h < model.num_heads(); ++h) {
        double *sums = dots.sums.data() + h * k;
        double *squares = dots.squares.data() + h * k;
        for_each_support(model, x, [&](std::size_t row, double value) {
            const auto v = model.factor_row(h, row);
            for (std::size_t f = 0; f < k; ++f) {
                const double term = v[f] * value;
                sums[f] += term;
                squares[f] += term * term;
            }
        });
    }
}

[[nodiscard]] inline FactorDots cached_factor_dots(const FactorizedModel &model, const SparseVector &x) {
    FactorDots dots;
    compute_factor_dots(model, x, dots);
    return dots;
}

/// Head outputs given precomputed dots. `sample_id` only labels error messages.
inline void predict_from_dots(const FactorizedModel &model, const SparseVector &x, const FactorDots &dots, std::span<double> out,
                              std::size_t sample_id = static_cast<std::size_t>(-1)) {
    for (std::size_t h = 0; h < model.num_heads(); ++h) {
        const auto &head = model.head(h);
        double y = head.bias;
        if (is_factorized(model.kind())) {
            for (std::size_t f = 0; f < model.rank(); ++f) {
                y += head.beta[f] * dots.kernel(h, f);
            }
        } else {
            for (std::size_t p = 0; p < x.nnz(); ++p) {
                y += head.weights[x.index(p)] * x.value(p);
            }
        }
        if (!std::isfinite(y)) {
            std::string where = "head " + std::to_string(h);
            if (sample_id != static_cast<std::size_t>(-1)) {
                where += ", sample " + std::to_string(sample_id);
            }
            throw numeric_error("non-finite prediction (" + where + ")");
        }
        out[h] = y;
    }
}

/// One output per head.
[[nodiscard]] inline std::vector<double> predict(const FactorizedModel &model, const SparseVector &x, std::size_t sample_id = static_cast<std::size_t>(-1)) {
    FactorDots dots;
    compute_factor_dots(model, x, dots);
    std::vector<double> out(model.num_heads());
    predict_from_dots(model, x, dots, out, sample_id);
    return out;
}

}  // namespace shfm
