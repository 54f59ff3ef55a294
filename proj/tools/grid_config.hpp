#pragma once

// Sweep grid files: TOML-style key/value pairs, read with CLI11's config
// parser. Recognised keys:
//
//   metrics          = ["pearson", "spearman", "theils_u"]
//   coef_thresholds  = [0.8, 0.9, 0.95, 0.99]
//   test_ratios      = [0.2, 0.8]
//   split_modes      = ["by_pair", "by_dataset"]
//   predictors       = ["baseline", "builtin", "adapter"]
//   p_threshold      = 0.05        # or "none"
//   breakdowns       = ["char_len", "token_count", "word_ratio"]
//   seed, epochs, batch, learning_rate, l2, adapter_cmd, adapter_timeout_s

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrlens/eval.hpp"

namespace corrlens::tools {

struct GridFile {
    SweepGrid grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch;
    std::optional<double> learning_rate;
    std::optional<double> l2;
    std::optional<std::string> adapter_cmd;
    std::optional<double> adapter_timeout_s;
    std::optional<std::vector<Feature>> breakdowns;
};

namespace detail {

inline double to_double(const CLI::ConfigItem& item, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("grid key '" + item.fullname() + "': not a number: " + s);
    }
}

inline std::uint64_t to_unsigned(const CLI::ConfigItem& item, const std::string& s) {
    try {
        if (s.empty() || s.front() == '-') throw std::invalid_argument(s);
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("grid key '" + item.fullname() + "': not a non-negative integer: " + s);
    }
}

inline const std::string& single(const CLI::ConfigItem& item) {
    if (item.inputs.size() != 1) throw DataError("grid key '" + item.fullname() + "' takes one value");
    return item.inputs.front();
}

}  // namespace detail

inline GridFile parse_grid(std::istream& in) {
    GridFile g;
    const auto items = CLI::ConfigTOML().from_config(in);
    for (const auto& item : items) {
        const std::string key = item.fullname();
        try {
            if (key == "metrics") {
                g.grid.metrics.clear();
                for (const auto& v : item.inputs) g.grid.metrics.push_back(parse_metric(v));
            } else if (key == "coef_thresholds") {
                g.grid.coef_thresholds.clear();
                for (const auto& v : item.inputs) g.grid.coef_thresholds.push_back(detail::to_double(item, v));
            } else if (key == "test_ratios") {
                g.grid.test_ratios.clear();
                for (const auto& v : item.inputs) g.grid.test_ratios.push_back(detail::to_double(item, v));
            } else if (key == "split_modes") {
                g.grid.split_modes.clear();
                for (const auto& v : item.inputs) g.grid.split_modes.push_back(parse_split_mode(v));
            } else if (key == "predictors") {
                g.grid.predictors.clear();
                for (const auto& v : item.inputs) g.grid.predictors.push_back(parse_predictor(v));
            } else if (key == "p_threshold") {
                const auto& v = detail::single(item);
                if (v == "none") g.grid.p_threshold.reset();
                else g.grid.p_threshold = detail::to_double(item, v);
            } else if (key == "breakdowns") {
                std::vector<Feature> fs;
                for (const auto& v : item.inputs) fs.push_back(parse_feature(v));
                g.breakdowns = std::move(fs);
            } else if (key == "seed") {
                g.seed = detail::to_unsigned(item, detail::single(item));
            } else if (key == "epochs") {
                g.epochs = detail::to_unsigned(item, detail::single(item));
            } else if (key == "batch") {
                g.batch = detail::to_unsigned(item, detail::single(item));
            } else if (key == "learning_rate") {
                g.learning_rate = detail::to_double(item, detail::single(item));
            } else if (key == "l2") {
                g.l2 = detail::to_double(item, detail::single(item));
            } else if (key == "adapter_cmd") {
                g.adapter_cmd = detail::single(item);
            } else if (key == "adapter_timeout_s") {
                g.adapter_timeout_s = detail::to_double(item, detail::single(item));
            } else {
                throw DataError("unknown grid key '" + key + "'");
            }
        } catch (const ArgumentError& e) {
            throw DataError("grid key '" + key + "': " + e.what());
        }
    }
    for (double t : g.grid.coef_thresholds)
        if (!(t >= 0.0 && t <= 1.0)) throw DataError("coef_thresholds must lie in [0, 1]");
    for (double r : g.grid.test_ratios)
        if (!(r > 0.0 && r < 1.0)) throw DataError("test_ratios must lie in (0, 1)");
    return g;
}

inline GridFile load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open grid file " + path.string());
    return parse_grid(in);
}

}  // namespace corrlens::tools
