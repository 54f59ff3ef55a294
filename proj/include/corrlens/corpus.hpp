#pragma once

// Labeled column-pair corpus: construction from a dataset catalog, labeling,
// train/test splits, descriptive statistics and JSON-lines persistence.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrlens/error.hpp"
#include "corrlens/ingest.hpp"
#include "corrlens/naming.hpp"
#include "corrlens/parallel.hpp"
#include "corrlens/random.hpp"
#include "corrlens/stats.hpp"

namespace corrlens {

struct ColumnPairRecord {
    std::string dataset_id;
    std::string name_a;
    std::string name_b;
    bool both_numeric = false;
    std::optional<CorrelationResult> pearson;
    std::optional<CorrelationResult> spearman;
    std::optional<CorrelationResult> theils_u;
    NameFeatures features;

    const std::optional<CorrelationResult>& result(Metric m) const noexcept {
        switch (m) {
            case Metric::pearson: return pearson;
            case Metric::spearman: return spearman;
            case Metric::theils_u: break;
        }
        return theils_u;
    }

    friend bool operator==(const ColumnPairRecord&, const ColumnPairRecord&) = default;
};

struct LabelConfig {
    Metric metric = Metric::pearson;
    double coef_threshold = 0.9;
    std::optional<double> p_threshold = 0.05;

    static LabelConfig defaults_for(Metric m) {
        if (m == Metric::theils_u) return {m, 0.9, std::nullopt};
        return {m, 0.9, 0.05};
    }
};

enum class SplitMode { by_pair, by_dataset };

inline std::string_view to_string(SplitMode m) noexcept {
    return m == SplitMode::by_pair ? "by_pair" : "by_dataset";
}

inline SplitMode parse_split_mode(std::string_view s) {
    if (s == "by_pair" || s == "pair") return SplitMode::by_pair;
    if (s == "by_dataset" || s == "dataset") return SplitMode::by_dataset;
    throw ArgumentError("unknown split mode: " + std::string(s));
}

struct SplitSpec {
    SplitMode mode = SplitMode::by_pair;
    double test_ratio = 0.2;
    std::uint64_t seed = 0;
};

// Index-based partition of a record list; indices ascend on each side.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    double achieved_test_ratio() const noexcept {
        const auto total = train.size() + test.size();
        return total == 0 ? 0.0 : static_cast<double>(test.size()) / static_cast<double>(total);
    }
};

struct CorpusStats {
    std::size_t dataset_count = 0;
    std::size_t pair_count = 0;
    std::size_t numeric_pair_count = 0;
    double avg_rows = 0.0;
    double avg_distinct_per_column = 0.0;

    friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct BuildOptions {
    // Unset: use the values recorded in each catalog entry.
    std::optional<std::size_t> pair_cap;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    CsvOptions csv;
    const Dictionary* dictionary = nullptr;
    std::ostream* log = &std::clog;
};

// ---------------------------------------------------------------------------
// Construction

// Computes every applicable metric for the given pairs of one parsed dataset.
inline std::vector<ColumnPairRecord> records_for_dataset(const std::vector<ColumnData>& columns,
                                                         const std::vector<ColumnPair>& pairs,
                                                         const Dictionary& dict) {
    std::unordered_map<std::string, const ColumnData*> by_name;
    for (const auto& c : columns) by_name.emplace(c.name, &c);

    std::vector<ColumnPairRecord> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        const ColumnData& a = *by_name.at(pair.name_a);
        const ColumnData& b = *by_name.at(pair.name_b);
        ColumnPairRecord rec;
        rec.dataset_id = pair.dataset_id;
        rec.name_a = pair.name_a;
        rec.name_b = pair.name_b;
        rec.both_numeric = pair.both_numeric;

        const auto [xa, xb] = pairwise_complete(a.values, b.values);
        rec.theils_u = theils_u(xa, xb);
        if (pair.both_numeric) {
            std::vector<double> na, nb;
            na.reserve(xa.size());
            nb.reserve(xb.size());
            for (std::size_t i = 0; i < xa.size(); ++i) {
                na.push_back(*parse_number(xa[i]));
                nb.push_back(*parse_number(xb[i]));
            }
            rec.pearson = pearson(na, nb);
            rec.spearman = spearman(na, nb);
        }
        rec.features = name_features(rec.name_a, rec.name_b, dict);
        out.push_back(std::move(rec));
    }
    return out;
}

// One record per enumerated pair across the catalog, in catalog order.
// Datasets that fail to parse are logged and skipped.
inline std::vector<ColumnPairRecord> build_corpus(const std::vector<DatasetDescriptor>& catalog,
                                                  const BuildOptions& options = {}) {
    static const Dictionary kEmpty;
    const Dictionary& dict = options.dictionary ? *options.dictionary : kEmpty;
    std::vector<std::vector<ColumnPairRecord>> per_dataset(catalog.size());
    std::vector<std::string> failures(catalog.size());

    parallel_for(catalog.size(), options.jobs, [&](std::size_t i) {
        const auto& d = catalog[i];
        try {
            const auto columns = parse_csv(d.path, options.csv);
            const auto cap = options.pair_cap.value_or(d.pair_cap);
            const auto seed = options.seed.value_or(d.pair_seed);
            const auto pairs = enumerate_pairs(columns, d.id, cap, derive_seed(seed, d.id));
            per_dataset[i] = records_for_dataset(columns, pairs, dict);
        } catch (const DataError& e) {
            failures[i] = e.what();
        }
    });

    std::vector<ColumnPairRecord> records;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (!failures[i].empty()) {
            if (options.log) *options.log << "skip dataset " << catalog[i].id << ": " << failures[i] << '\n';
            continue;
        }
        std::move(per_dataset[i].begin(), per_dataset[i].end(), std::back_inserter(records));
    }
    return records;
}

inline void featurize(std::span<ColumnPairRecord> records, const Dictionary& dict) {
    for (auto& r : records) r.features = name_features(r.name_a, r.name_b, dict);
}

// ---------------------------------------------------------------------------
// Labels

// A record is eligible for a metric when that metric was computed for it.
inline bool eligible(const ColumnPairRecord& r, Metric m) noexcept { return r.result(m).has_value(); }

#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"  // spurious for optional<double> members
#endif
inline bool label(const ColumnPairRecord& record, const LabelConfig& cfg) {
    const auto& res = record.result(cfg.metric);
    if (!res || !res->coefficient) return false;
    if (std::fabs(*res->coefficient) < cfg.coef_threshold) return false;
    if (!cfg.p_threshold) return true;
    return res->p_value && *res->p_value <= *cfg.p_threshold;
}
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

// ---------------------------------------------------------------------------
// Splits

inline Split split_by_pair(std::size_t record_count, const SplitSpec& spec) {
    if (record_count < 2) throw ArgumentError("split_by_pair: need at least 2 records");
    if (!(spec.test_ratio > 0.0 && spec.test_ratio < 1.0))
        throw ArgumentError("split: test_ratio must lie in (0, 1)");
    const auto test_count = static_cast<std::size_t>(
        std::llround(spec.test_ratio * static_cast<double>(record_count)));
    std::vector<std::size_t> order(record_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(spec.seed);
    shuffle(std::span(order), rng);
    Split split;
    split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_count));
    split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_count), order.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

inline Split split_by_pair(std::span<const ColumnPairRecord> records, const SplitSpec& spec) {
    return split_by_pair(records.size(), spec);
}

// Greedy whole-dataset assignment: datasets in `dataset_order` go to test
// until the test side first holds at least test_ratio * N records.
inline Split split_by_dataset_ordered(std::span<const ColumnPairRecord> records,
                                      std::span<const std::string> dataset_order, double test_ratio) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) ++counts[r.dataset_id];
    const double target = test_ratio * static_cast<double>(records.size());
    std::set<std::string> test_ids;
    std::size_t taken = 0;
    for (const auto& id : dataset_order) {
        if (static_cast<double>(taken) >= target) break;
        if (!test_ids.insert(id).second) continue;
        taken += counts[id];
    }
    Split split;
    for (std::size_t i = 0; i < records.size(); ++i)
        (test_ids.contains(records[i].dataset_id) ? split.test : split.train).push_back(i);
    return split;
}

inline std::vector<std::string> dataset_ids(std::span<const ColumnPairRecord> records) {
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.dataset_id);
    return {ids.begin(), ids.end()};
}

inline Split split_by_dataset(std::span<const ColumnPairRecord> records, const SplitSpec& spec) {
    if (!(spec.test_ratio > 0.0 && spec.test_ratio < 1.0))
        throw ArgumentError("split: test_ratio must lie in (0, 1)");
    auto ids = dataset_ids(records);
    if (ids.size() < 2) throw ArgumentError("split_by_dataset: need at least 2 distinct datasets");
    Rng rng(spec.seed);
    shuffle(std::span(ids), rng);
    return split_by_dataset_ordered(records, ids, spec.test_ratio);
}

inline Split make_split(std::span<const ColumnPairRecord> records, const SplitSpec& spec) {
    return spec.mode == SplitMode::by_pair ? split_by_pair(records, spec)
                                           : split_by_dataset(records, spec);
}

template <typename T>
std::vector<T> select(std::span<const T> items, std::span<const std::size_t> indices) {
    std::vector<T> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(items[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Descriptive statistics

inline CorpusStats corpus_stats(std::span<const ColumnPairRecord> records,
                                std::span<const DatasetDescriptor> catalog = {}) {
    CorpusStats s;
    std::set<std::string> ids;
    for (const auto& r : records) {
        ids.insert(r.dataset_id);
        ++s.pair_count;
        if (r.both_numeric) ++s.numeric_pair_count;
    }
    std::size_t rows = 0, columns = 0, distinct = 0;
    for (const auto& d : catalog) {
        ids.insert(d.id);
        rows += d.row_count;
        columns += d.column_count;
        distinct += d.distinct_sum;
    }
    s.dataset_count = ids.size();
    if (!catalog.empty()) s.avg_rows = static_cast<double>(rows) / static_cast<double>(catalog.size());
    if (columns > 0) s.avg_distinct_per_column = static_cast<double>(distinct) / static_cast<double>(columns);
    return s;
}

enum class LengthUnit { chars, tokens };

// Bucket b counts pairs whose combined length L has floor(log2 L) = b.
inline std::vector<std::size_t> name_length_histogram(std::span<const ColumnPairRecord> records,
                                                      LengthUnit unit) {
    std::vector<std::size_t> hist;
    for (const auto& r : records) {
        const std::size_t len = unit == LengthUnit::chars ? r.features.char_len : r.features.token_count;
        if (len == 0) continue;
        const auto bucket = static_cast<std::size_t>(std::bit_width(len) - 1);
        if (hist.size() <= bucket) hist.resize(bucket + 1, 0);
        ++hist[bucket];
    }
    return hist;
}

inline std::size_t coefficient_bucket(double value) noexcept {
    const double v = std::clamp(std::fabs(value), 0.0, 1.0);
    return std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(10.0 * v)));
}

inline std::array<std::size_t, 10> coefficient_histogram(std::span<const ColumnPairRecord> records,
                                                         Metric metric) {
    std::array<std::size_t, 10> hist{};
    for (const auto& r : records) {
        const auto& res = r.result(metric);
        if (res && res->coefficient) ++hist[coefficient_bucket(*res->coefficient)];
    }
    return hist;
}

// ---------------------------------------------------------------------------
// JSON-lines persistence

namespace detail {

inline nlohmann::json result_to_json(const std::optional<CorrelationResult>& res, const char* coef_key) {
    if (!res) return nullptr;
    nlohmann::json j;
    j[coef_key] = res->coefficient ? nlohmann::json(*res->coefficient) : nlohmann::json(nullptr);
    if (res->metric != Metric::theils_u)
        j["p"] = res->p_value ? nlohmann::json(*res->p_value) : nlohmann::json(nullptr);
    j["n"] = res->n;
    return j;
}

inline std::optional<CorrelationResult> result_from_json(const nlohmann::json& j, Metric metric,
                                                         const char* coef_key) {
    if (j.is_null()) return std::nullopt;
    CorrelationResult res;
    res.metric = metric;
    if (const auto& c = j.at(coef_key); !c.is_null()) res.coefficient = c.get<double>();
    if (metric != Metric::theils_u)
        if (const auto& p = j.at("p"); !p.is_null()) res.p_value = p.get<double>();
    res.n = j.at("n").get<std::size_t>();
    return res;
}

}  // namespace detail

inline nlohmann::json to_json(const ColumnPairRecord& r) {
    nlohmann::json j;
    j["dataset_id"] = r.dataset_id;
    j["name_a"] = r.name_a;
    j["name_b"] = r.name_b;
    j["both_numeric"] = r.both_numeric;
    j["pearson"] = detail::result_to_json(r.pearson, "r");
    j["spearman"] = detail::result_to_json(r.spearman, "rho");
    j["theils_u"] = detail::result_to_json(r.theils_u, "u");
    j["features"] = {{"char_len", r.features.char_len},
                     {"token_count", r.features.token_count},
                     {"word_ratio", r.features.word_ratio}};
    return j;
}

inline ColumnPairRecord record_from_json(const nlohmann::json& j) {
    try {
        ColumnPairRecord r;
        r.dataset_id = j.at("dataset_id").get<std::string>();
        r.name_a = j.at("name_a").get<std::string>();
        r.name_b = j.at("name_b").get<std::string>();
        r.both_numeric = j.at("both_numeric").get<bool>();
        r.pearson = detail::result_from_json(j.at("pearson"), Metric::pearson, "r");
        r.spearman = detail::result_from_json(j.at("spearman"), Metric::spearman, "rho");
        r.theils_u = detail::result_from_json(j.at("theils_u"), Metric::theils_u, "u");
        if (j.contains("features") && !j["features"].is_null()) {
            const auto& f = j["features"];
            r.features.char_len = f.at("char_len").get<std::size_t>();
            r.features.token_count = f.at("token_count").get<std::size_t>();
            r.features.word_ratio = f.at("word_ratio").get<double>();
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad corpus record: ") + e.what());
    }
}

inline void write_corpus(std::ostream& out, std::span<const ColumnPairRecord> records) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

inline std::vector<ColumnPairRecord> read_corpus(const std::filesystem::path& path) {
    std::vector<ColumnPairRecord> out;
    for_each_jsonl(path, [&](const nlohmann::json& j) { out.push_back(record_from_json(j)); });
    return out;
}

}  // namespace corrlens
