#pragma once

#include "shfm/errors.hpp"
#include "shfm/model.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace shfm {

/// FTRL-Proximal hyperparameters; eta(n) = alpha / (mu + n)^gamma.
struct HyperParams {
    double alpha{ 0.1 };
    double mu{ 0.1 };
    double gamma{ 0.5 };
    double lambda1{ 0.001 };
    double lambda2{ 0.1 };
    double init_sigma{ 0.01 };
    std::uint64_t seed{ 1 };

    void validate() const {
        auto require = [](bool ok, const char *what) {
            if (!ok) {
                throw config_error(what);
            }
        };
        require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
        require(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
        require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
        require(std::isfinite(lambda1) && lambda1 >= 0.0, "lambda1 must be >= 0");
        require(std::isfinite(lambda2) && lambda2 >= 0.0, "lambda2 must be >= 0");
        require(std::isfinite(init_sigma) && init_sigma >= 0.0, "init_sigma must be >= 0");
    }

    friend bool operator==(const HyperParams &, const HyperParams &) = default;
};

/// 1 / eta(n).
[[nodiscard]] inline double inverse_learning_rate(double n, const HyperParams &hp) { return std::pow(hp.mu + n, hp.gamma) / hp.alpha; }

[[nodiscard]] inline double learning_rate(double n, const HyperParams &hp) { return hp.alpha / std::pow(hp.mu + n, hp.gamma); }

/**
 * Closed-form minimizer of (1/eta(n) + l2)/2 v^2 + z v + l1 |v|:
 * exactly 0 when |z| <= l1, else (l1 sgn(z) - z) / (1/eta(n) + l2), sgn(0) = +1.
 */
[[nodiscard]] inline double solve_coordinate(double z, double n, const HyperParams &hp, double lambda1, double lambda2) {
    if (std::abs(z) <= lambda1) {
        return 0.0;
    }
    const double sign = z >= 0.0 ? 1.0 : -1.0;
    return (lambda1 * sign - z) / (inverse_learning_rate(n, hp) + lambda2);
}

[[nodiscard]] inline double solve_coordinate(double z, double n, const HyperParams &hp) { return solve_coordinate(z, n, hp, hp.lambda1, hp.lambda2); }

/**
 * dL/dV_{i,f} = dL/dyhat * beta_f * x_i * <V'_{-i,f}, x'_{-i}>, where the
 * exclusion of row i comes from subtracting its term from the cached sum.
 */
[[nodiscard]] constexpr double grad_v(double dloss, double beta_f, double x_i, double s_f, double v_if) noexcept {
    return dloss * beta_f * x_i * (s_f - v_if * x_i);
}

[[nodiscard]] constexpr double grad_beta(double dloss, double kernel_f) noexcept { return dloss * kernel_f; }

[[nodiscard]] constexpr double grad_b(double dloss) noexcept { return dloss; }

struct Accumulator {
    double z{ 0.0 };
    double n{ 0.0 };

    friend bool operator==(const Accumulator &, const Accumulator &) = default;
};

/// sigma = 1/eta(n + g^2) - 1/eta(n); z += g - sigma v; n += g^2.
[[nodiscard]] inline Accumulator accumulate(double z, double n, double g, double v_current, const HyperParams &hp) {
    if (g == 0.0) {
        return { z, n };
    }
    const double n_next = n + g * g;
    const double sigma = (std::pow(hp.mu + n_next, hp.gamma) - std::pow(hp.mu + n, hp.gamma)) / hp.alpha;
    return { z + g - sigma * v_current, n_next };
}

/**
 * Optimizer accumulators for one model. Per head: Z and N shaped like V'
 * (or like the linear weights), scalars for the bias, k-vectors for beta,
 * and a first-touch flag per row.
 */
struct FtrlState {
    struct Head {
        std::vector<double> z;
        std::vector<double> n;
        std::vector<double> beta_z;
        std::vector<double> beta_n;
        double bias_z{ 0.0 };
        double bias_n{ 0.0 };
        std::vector<std::uint8_t> touched;

        friend bool operator==(const Head &, const Head &) = default;
    };

    std::size_t rows{ 0 };
    std::size_t width{ 0 };
    std::vector<Head> heads;

    FtrlState() = default;

    explicit FtrlState(const FactorizedModel &model) : rows{ model.rows() }, width{ is_factorized(model.kind()) ? model.rank() : 1 } {
        heads.resize(model.num_heads());
        for (auto &head : heads) {
            head.z.assign(rows * width, 0.0);
            head.n.assign(rows * width, 0.0);
            if (is_factorized(model.kind())) {
                head.beta_z.assign(model.rank(), 0.0);
                head.beta_n.assign(model.rank(), 0.0);
            }
            head.touched.assign(rows, 0);
        }
    }

    friend bool operator==(const FtrlState &, const FtrlState &) = default;
};

}  // namespace shfm
