#pragma once

#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/ftrl.hpp"
#include "shfm/model.hpp"
#include "shfm/text.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shfm {

inline constexpr std::string_view model_magic = "SHFM-KIT-MODEL v1";

/**
 * Line-oriented model text:
 *
 *   SHFM-KIT-MODEL v1
 *   kind <kind> task <task> c <c> d <d> k <k>
 *   b <h> <value>
 *   beta <h> <k values>            (factorized kinds)
 *   v <h> <row> <col> <value>      (nonzero V' entries)
 *   w <h> <feature> <value>        (nonzero linear weights)
 *
 * With optimizer state, per head: "z"/"n" lines for nonzero coordinate
 * accumulators (col 0 for linear), "zb"/"nb" for the bias, "zbeta"/"nbeta"
 * per factor, and "touched <h> <row>" for initialized rows.
 */
[[nodiscard]] inline std::string save_model(const FactorizedModel &model, const FtrlState *state = nullptr) {
    using detail::format_double;
    std::string out{ model_magic };
    out += '\n';
    out += "kind " + std::string{ to_string(model.kind()) } + " task " + std::string{ to_string(model.task()) } + " c " + std::to_string(model.num_heads()) +
           " d " + std::to_string(model.dim()) + " k " + std::to_string(model.rank()) + '\n';
    const std::size_t k = model.rank();
    for (std::size_t h = 0; h < model.num_heads(); ++h) {
        const auto &head = model.head(h);
        const std::string hs = std::to_string(h);
        out += "b " + hs + ' ' + format_double(head.bias) + '\n';
        if (is_factorized(model.kind())) {
            out += "beta " + hs;
            for (const double b : head.beta) {
                out += ' ' + format_double(b);
            }
            out += '\n';
            for (std::size_t i = 0; i < model.rows(); ++i) {
                for (std::size_t f = 0; f < k; ++f) {
                    if (const double v = model.factor(h, i, f); v != 0.0) {
                        out += "v " + hs + ' ' + std::to_string(i) + ' ' + std::to_string(f) + ' ' + format_double(v) + '\n';
                    }
                }
            }
        } else {
            for (std::size_t i = 1; i < model.rows(); ++i) {
                if (const double w = head.weights[i]; w != 0.0) {
                    out += "w " + hs + ' ' + std::to_string(i) + ' ' + format_double(w) + '\n';
                }
            }
        }
    }
    if (state == nullptr) {
        return out;
    }
    const std::size_t width = state->width;
    for (std::size_t h = 0; h < state->heads.size(); ++h) {
        const auto &hst = state->heads[h];
        const std::string hs = std::to_string(h);
        for (const char *name : { "z", "n" }) {
            const auto &values = name[0] == 'z' ? hst.z : hst.n;
            for (std::size_t at = 0; at < values.size(); ++at) {
                if (values[at] != 0.0) {
                    out += std::string{ name } + ' ' + hs + ' ' + std::to_string(at / width) + ' ' + std::to_string(at % width) + ' ' + format_double(values[at]) + '\n';
                }
            }
        }
        out += "zb " + hs + ' ' + format_double(hst.bias_z) + '\n';
        out += "nb " + hs + ' ' + format_double(hst.bias_n) + '\n';
        for (std::size_t f = 0; f < hst.beta_z.size(); ++f) {
            out += "zbeta " + hs + ' ' + std::to_string(f) + ' ' + format_double(hst.beta_z[f]) + '\n';
            out += "nbeta " + hs + ' ' + std::to_string(f) + ' ' + format_double(hst.beta_n[f]) + '\n';
        }
        for (std::size_t i = 0; i < hst.touched.size(); ++i) {
            if (hst.touched[i]) {
                out += "touched " + hs + ' ' + std::to_string(i) + '\n';
            }
        }
    }
    return out;
}

struct LoadedModel {
    FactorizedModel model;
    /// Present when the file carries optimizer sections.
    std::optional<FtrlState> state;
};

[[nodiscard]] inline LoadedModel load_model(std::string_view text) {
    LoadedModel loaded;
    bool have_header = false;
    bool have_magic = false;
    std::size_t k = 0;

    auto bad = [](std::size_t line, const std::string &what) { return format_error("model: " + what, line); };

    detail::for_each_line(text, [&](std::string_view raw, std::size_t line) {
        const auto tokens = detail::split_whitespace(raw);
        if (tokens.empty()) {
            return;
        }
        if (!have_magic) {
            if (detail::trim(raw) != model_magic) {
                throw bad(line, "missing '" + std::string{ model_magic } + "' header");
            }
            have_magic = true;
            return;
        }
        auto number = [&](std::size_t t) {
            if (t >= tokens.size()) {
                throw bad(line, "truncated record");
            }
            const auto value = detail::parse_number<double>(tokens[t]);
            if (!value || !std::isfinite(*value)) {
                throw bad(line, "invalid number '" + std::string{ tokens[t] } + "'");
            }
            return *value;
        };
        auto count = [&](std::size_t t, std::size_t limit, const char *what) {
            if (t >= tokens.size()) {
                throw bad(line, "truncated record");
            }
            const auto value = detail::parse_number<std::size_t>(tokens[t]);
            if (!value || *value >= limit) {
                throw bad(line, std::string{ what } + " '" + std::string{ tokens[t] } + "' out of range");
            }
            return *value;
        };
        const std::string_view tag = tokens[0];
        if (!have_header) {
            if (tag != "kind" || tokens.size() != 10 || tokens[2] != "task" || tokens[4] != "c" || tokens[6] != "d" || tokens[8] != "k") {
                throw bad(line, "malformed shape line");
            }
            const auto c = detail::parse_number<std::size_t>(tokens[5]);
            const auto d = detail::parse_number<std::size_t>(tokens[7]);
            const auto rank = detail::parse_number<std::size_t>(tokens[9]);
            if (!c || !d || !rank) {
                throw bad(line, "malformed shape line");
            }
            try {
                loaded.model = FactorizedModel(parse_model_kind(tokens[1]), parse_task(tokens[3]), *c, *d, *rank);
            } catch (const argument_error &e) {
                throw bad(line, e.what());
            }
            k = loaded.model.rank();
            have_header = true;
            return;
        }
        FactorizedModel &model = loaded.model;
        const std::size_t h = count(1, model.num_heads(), "head");
        auto &head = model.head(h);
        const bool factorized = is_factorized(model.kind());
        auto state = [&]() -> FtrlState::Head & {
            if (!loaded.state) {
                loaded.state.emplace(model);
            }
            return loaded.state->heads[h];
        };
        const std::size_t width = factorized ? k : 1;

        if (tag == "b") {
            head.bias = number(2);
        } else if (tag == "beta" && factorized) {
            if (tokens.size() != 2 + k) {
                throw bad(line, "beta needs " + std::to_string(k) + " values");
            }
            for (std::size_t f = 0; f < k; ++f) {
                head.beta[f] = number(2 + f);
            }
        } else if (tag == "v" && factorized) {
            const std::size_t row = count(2, model.rows(), "row");
            model.factor(h, row, count(3, k, "column")) = number(4);
        } else if (tag == "w" && !factorized) {
            const std::size_t row = count(2, model.rows(), "feature");
            if (row == 0) {
                throw bad(line, "feature 0 has no linear weight");
            }
            head.weights[row] = number(3);
        } else if (tag == "z" || tag == "n") {
            const std::size_t row = count(2, model.rows(), "row");
            const std::size_t col = count(3, width, "column");
            auto &values = tag == "z" ? state().z : state().n;
            values[row * width + col] = number(4);
        } else if (tag == "zb") {
            state().bias_z = number(2);
        } else if (tag == "nb") {
            state().bias_n = number(2);
        } else if ((tag == "zbeta" || tag == "nbeta") && factorized) {
            const std::size_t f = count(2, k, "factor");
            (tag == "zbeta" ? state().beta_z : state().beta_n)[f] = number(3);
        } else if (tag == "touched") {
            state().touched[count(2, model.rows(), "row")] = 1;
        } else {
            throw bad(line, "unexpected record '" + std::string{ tag } + "'");
        }
    });
    if (!have_header) {
        throw format_error("model: missing shape line", 1);
    }
    const FactorizedModel &model = loaded.model;
    for (std::size_t h = 0; h < model.num_heads(); ++h) {
        const auto &head = model.head(h);
        if (is_factorized(model.kind()) && !learns_beta(model.kind())) {
            for (const double b : head.beta) {
                if (b != 1.0) {
                    throw format_error("model: beta must be 1 for kind " + std::string{ to_string(model.kind()) }, 1);
                }
            }
        }
        if (is_factorized(model.kind()) && !is_hierarchical(model.kind())) {
            for (const double v : model.factor_row(h, 0)) {
                if (v != 0.0) {
                    throw format_error("model: context row must be zero for kind " + std::string{ to_string(model.kind()) }, 1);
                }
            }
        }
    }
    return loaded;
}

inline void write_text_file(const std::string &path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw data_error("cannot write '" + path + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw data_error("failed writing '" + path + "'");
    }
}

}  // namespace shfm
