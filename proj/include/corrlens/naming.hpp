#pragma once

// Column-name features: normalization, tokenization, length, English-word
// ratio and quantile bucketing.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "corrlens/error.hpp"

namespace corrlens {

struct NameFeatures {
    std::size_t char_len = 0;     // combined code-point count of both names
    std::size_t token_count = 0;  // combined token count of both names
    double word_ratio = 0.0;      // dictionary tokens / all tokens

    friend bool operator==(const NameFeatures&, const NameFeatures&) = default;
};

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Number of UTF-8 code points (continuation bytes are not counted).
inline std::size_t utf8_length(std::string_view s) noexcept {
    return static_cast<std::size_t>(std::count_if(
        s.begin(), s.end(), [](unsigned char c) { return (c & 0xC0) != 0x80; }));
}

// Model-input form of a name: underscores become spaces, nothing else changes.
inline std::string normalize(std::string_view name) {
    std::string out(name);
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

// Splits on runs of spaces and underscores; case is preserved.
inline std::vector<std::string> tokenize(std::string_view name) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < name.size()) {
        while (i < name.size() && (name[i] == ' ' || name[i] == '_')) ++i;
        std::size_t j = i;
        while (j < name.size() && name[j] != ' ' && name[j] != '_') ++j;
        if (j > i) tokens.emplace_back(name.substr(i, j - i));
        i = j;
    }
    return tokens;
}

// Lowercase word list; lookups lowercase their argument.
class Dictionary {
public:
    Dictionary() = default;

    template <typename Range>
    explicit Dictionary(const Range& words) {
        for (const auto& w : words) add(w);
    }

    static Dictionary load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open dictionary: " + path.string());
        Dictionary dict;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t");
            dict.add(line.substr(first, last - first + 1));
        }
        return dict;
    }

    void add(std::string_view word) { words_.insert(ascii_lower(word)); }

    bool contains(std::string_view token) const { return words_.contains(ascii_lower(token)); }

    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }

private:
    std::unordered_set<std::string> words_;
};

inline double word_ratio(std::span<const std::string> tokens_a, std::span<const std::string> tokens_b,
                         const Dictionary& dict) {
    const std::size_t total = tokens_a.size() + tokens_b.size();
    if (total == 0) return 0.0;
    std::size_t hits = 0;
    for (const auto& t : tokens_a) hits += dict.contains(t) ? 1 : 0;
    for (const auto& t : tokens_b) hits += dict.contains(t) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(total);
}

inline NameFeatures name_features(std::string_view name_a, std::string_view name_b,
                                  const Dictionary& dict) {
    const auto ta = tokenize(name_a);
    const auto tb = tokenize(name_b);
    return NameFeatures{utf8_length(name_a) + utf8_length(name_b), ta.size() + tb.size(),
                        word_ratio(ta, tb, dict)};
}

// ---------------------------------------------------------------------------
// Quantile buckets

enum class Bucket { q0_25, q25_50, q50_100 };

inline constexpr Bucket kAllBuckets[] = {Bucket::q0_25, Bucket::q25_50, Bucket::q50_100};

inline std::string_view to_string(Bucket b) noexcept {
    switch (b) {
        case Bucket::q0_25: return "Q0-25";
        case Bucket::q25_50: return "Q25-50";
        case Bucket::q50_100: return "Q50-100";
    }
    return "?";
}

// Nearest-rank percentile: the smallest value with at least pct% of the
// sample at or below it.
inline double nearest_rank_percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw ArgumentError("percentile of empty sample");
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(pct / 100.0 * static_cast<double>(values.size()));
    const auto index = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
    return values[std::min(index, values.size() - 1)];
}

struct QuantileBoundaries {
    double q25 = 0.0;
    double q50 = 0.0;

    Bucket classify(double v) const noexcept {
        if (v >= q50) return Bucket::q50_100;
        if (v >= q25) return Bucket::q25_50;
        return Bucket::q0_25;
    }
};

inline QuantileBoundaries quantile_boundaries(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    return {nearest_rank_percentile(v, 25.0), nearest_rank_percentile(v, 50.0)};
}

inline std::vector<Bucket> quantile_buckets(std::span<const double> values) {
    if (values.empty()) throw ArgumentError("quantile_buckets: empty input");
    const auto bounds = quantile_boundaries(values);
    std::vector<Bucket> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(bounds.classify(v));
    return out;
}

}  // namespace corrlens
