#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace shfm {

/**
 * Regression task with a planted strongly-hierarchical model. A set S of
 * active features carries main effects w_i = <u_i, u_0> and pairwise effects
 * W_ij = <u_i, u_j> for i, j in S only, with latent vectors u of size `rank`.
 * Every sample draws each active feature with probability `active_rate` plus
 * `noise_features` uniformly chosen inactive features; values are U(0.5, 1.5).
 * Labels are `bias` + (planted score - its expectation) + N(0, noise_sd^2),
 * so `bias` is the label mean.
 */
struct PlantedConfig {
    std::size_t dim{ 2000 };
    std::size_t samples{ 10000 };
    std::size_t active{ 20 };
    std::size_t rank{ 3 };
    double active_rate{ 0.2 };
    std::size_t noise_features{ 3 };
    double bias{ 0.0 };
    double noise_sd{ 0.1 };
    std::uint64_t seed{ 42 };
};

struct PlantedTask {
    Dataset data;
    /// Sorted 1-based ids of S.
    std::vector<feature_index> active;
    /// Row 0 is u_0, row r + 1 is the latent vector of active[r].
    std::vector<std::vector<double>> latent;

    /// Planted pairs (i, j), i < j, both in S.
    [[nodiscard]] std::vector<std::pair<feature_index, feature_index>> interaction_support() const {
        std::vector<std::pair<feature_index, feature_index>> pairs;
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                pairs.emplace_back(active[a], active[b]);
            }
        }
        return pairs;
    }
};

[[nodiscard]] inline PlantedTask generate_planted(const PlantedConfig &config) {
    if (config.active == 0 || config.active > config.dim) {
        throw argument_error("planted task: active feature count must be in [1, d]");
    }
    if (config.noise_features > config.dim - config.active) {
        throw argument_error("planted task: not enough inactive features for the noise draw");
    }
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    PlantedTask task;
    std::vector<feature_index> ids(config.dim);
    for (std::size_t i = 0; i < config.dim; ++i) {
        ids[i] = static_cast<feature_index>(i + 1);
    }
    std::shuffle(ids.begin(), ids.end(), rng);
    task.active.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(config.active));
    std::vector<feature_index> inactive(ids.begin() + static_cast<std::ptrdiff_t>(config.active), ids.end());
    std::sort(task.active.begin(), task.active.end());

    const double scale = 1.0 / std::sqrt(static_cast<double>(config.rank));
    task.latent.assign(config.active + 1, std::vector<double>(config.rank));
    for (auto &u : task.latent) {
        for (auto &value : u) {
            value = normal(rng) * scale;
        }
    }
    auto dot = [&](std::size_t a, std::size_t b) {
        double sum = 0.0;
        for (std::size_t f = 0; f < config.rank; ++f) {
            sum += task.latent[a][f] * task.latent[b][f];
        }
        return sum;
    };

    // E[x] = p and E[x_i x_j] = p^2 for distinct active features
    double expected_score = 0.0;
    for (std::size_t a = 1; a <= config.active; ++a) {
        expected_score += config.active_rate * dot(a, 0);
        for (std::size_t b = a + 1; b <= config.active; ++b) {
            expected_score += config.active_rate * config.active_rate * dot(a, b);
        }
    }

    task.data = Dataset(Task::regression, config.dim, 1);
    std::vector<std::pair<feature_index, double>> entries;
    std::vector<std::pair<std::size_t, double>> present;  // (latent row, value)
    std::uniform_int_distribution<std::size_t> pick(0, inactive.size() - 1);
    for (std::size_t s = 0; s < config.samples; ++s) {
        entries.clear();
        present.clear();
        for (std::size_t a = 0; a < config.active; ++a) {
            if (uniform(rng) < config.active_rate) {
                const double value = 0.5 + uniform(rng);
                entries.emplace_back(task.active[a], value);
                present.emplace_back(a + 1, value);
            }
        }
        std::vector<feature_index> noise;
        while (noise.size() < config.noise_features) {
            const feature_index id = inactive[pick(rng)];
            if (std::find(noise.begin(), noise.end(), id) == noise.end()) {
                noise.push_back(id);
            }
        }
        for (const feature_index id : noise) {
            entries.emplace_back(id, 0.5 + uniform(rng));
        }
        std::sort(entries.begin(), entries.end());

        double y = config.bias - expected_score;
        for (std::size_t a = 0; a < present.size(); ++a) {
            y += dot(present[a].first, 0) * present[a].second;
            for (std::size_t b = a + 1; b < present.size(); ++b) {
                y += dot(present[a].first, present[b].first) * present[a].second * present[b].second;
            }
        }
        y += config.noise_sd * normal(rng);

        std::vector<feature_index> indices;
        std::vector<double> values;
        for (const auto &[id, value] : entries) {
            indices.push_back(id);
            values.push_back(value);
        }
        task.data.push_back(SparseVector(std::move(indices), std::move(values), config.dim), y);
    }
    return task;
}

/// First `train_count` samples and the remainder.
[[nodiscard]] inline std::pair<Dataset, Dataset> split_head(const Dataset &data, std::size_t train_count) {
    train_count = std::min(train_count, data.size());
    std::vector<std::size_t> first(train_count), rest(data.size() - train_count);
    for (std::size_t s = 0; s < data.size(); ++s) {
        (s < train_count ? first[s] : rest[s - train_count]) = s;
    }
    return { data.subset(first), data.subset(rest) };
}

}  // namespace shfm
