#pragma once

// Confusion-based quality metrics, per-bucket breakdowns and the
// threshold x test-ratio experiment sweep.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corrlens/adapter.hpp"
#include "corrlens/corpus.hpp"
#include "corrlens/error.hpp"
#include "corrlens/naming.hpp"
#include "corrlens/parallel.hpp"
#include "corrlens/predict.hpp"

namespace corrlens {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricReport {
    double f1 = 0.0;
    double recall = 0.0;
    double precision = 0.0;
    double mcc = 0.0;
    double accuracy = 0.0;
    ConfusionCounts counts;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

inline ConfusionCounts confusion(const std::vector<bool>& truth, const std::vector<bool>& preds) {
    if (truth.size() != preds.size()) throw ArgumentError("confusion: length mismatch");
    if (truth.empty()) throw ArgumentError("confusion: empty input");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i]) (preds[i] ? c.tp : c.fn)++;
        else (preds[i] ? c.fp : c.tn)++;
    }
    return c;
}

namespace detail {

inline double ratio_or_zero(double num, double den) noexcept { return den == 0.0 ? 0.0 : num / den; }

}  // namespace detail

// Any 0/0 ratio is reported as 0.
inline MetricReport metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw ArgumentError("metrics: empty confusion matrix");
    const auto tp = static_cast<double>(c.tp);
    const auto fp = static_cast<double>(c.fp);
    const auto tn = static_cast<double>(c.tn);
    const auto fn = static_cast<double>(c.fn);
    MetricReport m;
    m.counts = c;
    m.precision = detail::ratio_or_zero(tp, tp + fp);
    m.recall = detail::ratio_or_zero(tp, tp + fn);
    m.f1 = detail::ratio_or_zero(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.accuracy = (tp + tn) / static_cast<double>(c.total());
    const double denom = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    m.mcc = detail::ratio_or_zero(tp * tn - fp * fn, denom);
    return m;
}

// ---------------------------------------------------------------------------
// Breakdowns

enum class Feature { char_len, token_count, word_ratio };

inline std::string_view to_string(Feature f) noexcept {
    switch (f) {
        case Feature::char_len: return "char_len";
        case Feature::token_count: return "token_count";
        case Feature::word_ratio: return "word_ratio";
    }
    return "?";
}

inline Feature parse_feature(std::string_view s) {
    for (Feature f : {Feature::char_len, Feature::token_count, Feature::word_ratio})
        if (to_string(f) == s) return f;
    throw ArgumentError("unknown breakdown feature: " + std::string(s));
}

inline double feature_value(const NameFeatures& f, Feature which) noexcept {
    switch (which) {
        case Feature::char_len: return static_cast<double>(f.char_len);
        case Feature::token_count: return static_cast<double>(f.token_count);
        case Feature::word_ratio: break;
    }
    return f.word_ratio;
}

struct BucketReport {
    Bucket bucket = Bucket::q0_25;
    ConfusionCounts counts;
    std::optional<MetricReport> report;  // absent for an empty bucket
};

// Quantile boundaries come from the evaluated records themselves.
inline std::vector<BucketReport> breakdown(std::span<const ColumnPairRecord> records, const std::vector<bool>& truth,
                                           const std::vector<bool>& preds, Feature feature) {
    if (records.size() != truth.size() || records.size() != preds.size())
        throw ArgumentError("breakdown: length mismatch");
    std::vector<BucketReport> out;
    for (Bucket b : kAllBuckets) out.push_back({b, {}, std::nullopt});
    if (records.empty()) return out;

    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) values.push_back(feature_value(r.features, feature));
    const auto buckets = quantile_buckets(values);
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& c = out[static_cast<std::size_t>(buckets[i])].counts;
        if (truth[i]) (preds[i] ? c.tp : c.fn)++;
        else (preds[i] ? c.fp : c.tn)++;
    }
    for (auto& b : out)
        if (b.counts.total() > 0) b.report = metrics(b.counts);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

enum class PredictorKind { baseline, builtin, adapter };

inline std::string_view to_string(PredictorKind p) noexcept {
    switch (p) {
        case PredictorKind::baseline: return "baseline";
        case PredictorKind::builtin: return "builtin";
        case PredictorKind::adapter: return "adapter";
    }
    return "?";
}

inline PredictorKind parse_predictor(std::string_view s) {
    for (PredictorKind p : {PredictorKind::baseline, PredictorKind::builtin, PredictorKind::adapter})
        if (to_string(p) == s) return p;
    throw ArgumentError("unknown predictor: " + std::string(s));
}

struct SweepGrid {
    std::vector<Metric> metrics{Metric::pearson};
    std::vector<double> coef_thresholds{0.8, 0.9, 0.95, 0.99};
    std::vector<double> test_ratios{0.2, 0.8};
    std::vector<SplitMode> split_modes{SplitMode::by_pair};
    std::vector<PredictorKind> predictors{PredictorKind::baseline};
    // Applied to pearson/spearman; theils_u never has a p gate.
    std::optional<double> p_threshold = 0.05;

    std::size_t cell_count() const noexcept {
        return metrics.size() * coef_thresholds.size() * test_ratios.size() * split_modes.size() *
               predictors.size();
    }
};

struct SweepOptions {
    std::uint64_t seed = 0;
    Hyperparams hyperparams;
    FeatureConfig features;
    AdapterConfig adapter;
    std::size_t jobs = 1;
    // Features for which per-bucket breakdowns are computed in every cell.
    std::vector<Feature> breakdowns{Feature::char_len, Feature::token_count, Feature::word_ratio};
};

struct SweepResultRow {
    Metric metric = Metric::pearson;
    double coef_threshold = 0.0;
    double test_ratio = 0.0;
    SplitMode split_mode = SplitMode::by_pair;
    PredictorKind predictor = PredictorKind::baseline;
    std::optional<MetricReport> report;  // absent when the cell failed
    std::string error;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double achieved_test_ratio = 0.0;
    std::map<Feature, std::vector<BucketReport>> breakdowns;
};

// Predictor choice plus its settings; shared by the sweep and the predict command.
struct PredictorRun {
    PredictorKind kind = PredictorKind::baseline;
    Hyperparams hyperparams;
    FeatureConfig features;
    AdapterConfig adapter;
};

inline std::vector<Prediction> run_predictor(const PredictorRun& run, std::span<const ColumnPairRecord> train,
                                             const std::vector<bool>& train_labels,
                                             std::span<const ColumnPairRecord> test) {
    std::vector<Prediction> out;
    out.reserve(test.size());
    if (run.kind == PredictorKind::baseline) {
        for (const auto& r : test) out.push_back(jaccard_baseline(r.name_a, r.name_b));
        return out;
    }
    const std::string& sep = run.kind == PredictorKind::adapter ? run.adapter.separator : run.features.separator;
    std::vector<LabeledText> train_texts;
    train_texts.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        train_texts.push_back({encode_pair(train[i].name_a, train[i].name_b, sep), train_labels[i]});
    std::vector<std::string> test_texts;
    test_texts.reserve(test.size());
    for (const auto& r : test) test_texts.push_back(encode_pair(r.name_a, r.name_b, sep));

    if (run.kind == PredictorKind::builtin) {
        const auto model = train_builtin(train_texts, run.hyperparams, run.features);
        return predict_builtin(model, test_texts);
    }
    return adapter_train_predict(run.adapter, train_texts, test_texts);
}

inline std::vector<bool> labels_for(std::span<const ColumnPairRecord> records, const LabelConfig& cfg) {
    std::vector<bool> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(label(r, cfg));
    return out;
}

inline std::vector<bool> labels_of(std::span<const Prediction> preds) {
    std::vector<bool> out;
    out.reserve(preds.size());
    for (const auto& p : preds) out.push_back(p.label);
    return out;
}

// Evaluates every grid cell. Rows come back in grid order:
// metric, split mode, predictor, threshold, test ratio (innermost). A failing
// cell yields a row with an error message instead of a report.
inline std::vector<SweepResultRow> run_sweep(std::span<const ColumnPairRecord> corpus, const SweepGrid& grid,
                                             const SweepOptions& options = {}) {
    std::vector<SweepResultRow> rows;
    rows.reserve(grid.cell_count());
    for (Metric m : grid.metrics)
        for (SplitMode mode : grid.split_modes)
            for (PredictorKind p : grid.predictors)
                for (double t : grid.coef_thresholds)
                    for (double ratio : grid.test_ratios) {
                        SweepResultRow row;
                        row.metric = m;
                        row.split_mode = mode;
                        row.predictor = p;
                        row.coef_threshold = t;
                        row.test_ratio = ratio;
                        rows.push_back(std::move(row));
                    }

    // Eligible records per metric, computed once.
    std::map<Metric, std::vector<ColumnPairRecord>> eligible_by_metric;
    for (Metric m : grid.metrics) {
        auto& bucket = eligible_by_metric[m];
        for (const auto& r : corpus)
            if (eligible(r, m)) bucket.push_back(r);
    }

    parallel_for(rows.size(), options.jobs, [&](std::size_t i) {
        auto& row = rows[i];
        try {
            const auto& records = eligible_by_metric.at(row.metric);
            LabelConfig cfg{row.metric, row.coef_threshold,
                            row.metric == Metric::theils_u ? std::nullopt : grid.p_threshold};
            const auto split = make_split(records, SplitSpec{row.split_mode, row.test_ratio, options.seed});
            const auto train = select<ColumnPairRecord>(records, split.train);
            const auto test = select<ColumnPairRecord>(records, split.test);
            row.train_size = train.size();
            row.test_size = test.size();
            row.achieved_test_ratio = split.achieved_test_ratio();
            if (test.empty()) throw ArgumentError("empty test set");

            const auto train_labels = labels_for(train, cfg);
            const auto truth = labels_for(test, cfg);
            PredictorRun run{row.predictor, options.hyperparams, options.features, options.adapter};
            const auto predicted = labels_of(run_predictor(run, train, train_labels, test));

            row.report = metrics(confusion(truth, predicted));
            for (Feature f : options.breakdowns) row.breakdowns[f] = breakdown(test, truth, predicted, f);
        } catch (const Error& e) {
            row.report.reset();
            row.error = e.what();
        }
    });
    return rows;
}

}  // namespace corrlens
