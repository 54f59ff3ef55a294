// corrlens: build column-pair correlation corpora from CSV collections and
// benchmark name-only correlation predictors.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "corrlens/corrlens.hpp"
#include "corrlens/fetch.hpp"
#include "grid_config.hpp"

#ifndef CORRLENS_VERSION
#define CORRLENS_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace corrlens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

// Settings shared by every subcommand plus the union of per-command options.
struct Options {
    std::size_t jobs = default_jobs();

    std::string manifest, dest, root, catalog, corpus, dict, out, out_prefix, grid;
    std::string train, test, truth, preds, breakdown, adapter_cmd, adapter_dir;
    std::string mode = "pair", method = "baseline", metric = "pearson";
    std::uint64_t max_bytes = kDefaultMaxBytes;
    std::optional<std::size_t> cap;
    std::optional<std::uint64_t> seed;
    double test_ratio = 0.2;
    std::optional<double> threshold;
    std::string p_threshold;
    std::size_t epochs = 5;
    std::size_t batch = 100;
    double learning_rate = Hyperparams{}.learning_rate;
    double l2 = Hyperparams{}.l2;
    double adapter_timeout_s = 1800.0;
};

LabelConfig label_config(const Options& o) {
    auto cfg = LabelConfig::defaults_for(parse_metric(o.metric));
    if (o.threshold) cfg.coef_threshold = *o.threshold;
    if (o.p_threshold == "none") cfg.p_threshold.reset();
    else if (!o.p_threshold.empty()) cfg.p_threshold = std::stod(o.p_threshold);
    return cfg;
}

json label_json(const LabelConfig& c) {
    return {{"metric", to_string(c.metric)},
            {"coef_threshold", c.coef_threshold},
            {"p_threshold", c.p_threshold ? json(*c.p_threshold) : json(nullptr)}};
}

void write_run_meta(const fs::path& dir, const std::string& command, const json& config,
                    std::optional<std::uint64_t> seed, const std::string& started) {
    json meta{{"command", command},
              {"config", config},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"version", CORRLENS_VERSION},
              {"started_at", started},
              {"finished_at", utc_now()}};
    fs::create_directories(dir.empty() ? fs::path(".") : dir);
    std::ofstream out((dir.empty() ? fs::path(".") : dir) / "run_meta.json");
    out << meta.dump(2) << '\n';
}

fs::path parent_of(const std::string& file) {
    const auto p = fs::path(file).parent_path();
    return p.empty() ? fs::path(".") : p;
}

std::ofstream open_output(const std::string& path) {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

json report_json(const MetricReport& m) {
    return {{"tp", m.counts.tp}, {"fp", m.counts.fp}, {"tn", m.counts.tn}, {"fn", m.counts.fn},
            {"f1", m.f1},        {"rec", m.recall},   {"pre", m.precision}, {"mcc", m.mcc},
            {"acc", m.accuracy}};
}

void print_report(std::ostream& out, const MetricReport& m) {
    out << std::fixed << std::setprecision(4) << "tp=" << m.counts.tp << " fp=" << m.counts.fp
        << " tn=" << m.counts.tn << " fn=" << m.counts.fn << "  f1=" << m.f1 << " rec=" << m.recall
        << " pre=" << m.precision << " mcc=" << m.mcc << " acc=" << m.accuracy << '\n';
    out.unsetf(std::ios::floatfield);
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_fetch(const Options& o) {
    const auto started = utc_now();
    FetchOptions fo;
    fo.max_bytes = o.max_bytes;
    const auto result = fetch_manifest(o.manifest, o.dest, fo);
    const auto catalog_path = o.out.empty() ? (fs::path(o.dest) / "catalog.jsonl").string() : o.out;
    {
        auto out = open_output(catalog_path);
        write_catalog(out, result.datasets);
    }
    {
        std::ofstream report(fs::path(o.dest) / "fetch_report.jsonl");
        for (const auto& r : result.report) report << to_json(r).dump() << '\n';
    }
    for (const auto& r : result.report)
        if (r.status != FetchStatus::admitted)
            std::clog << to_string(r.status) << ' ' << r.source << ": " << r.reason << '\n';
    std::cout << result.datasets.size() << " admitted, " << result.report.size() - result.datasets.size()
              << " not admitted\n";
    write_run_meta(o.dest, "fetch",
                   {{"manifest", o.manifest}, {"dest", o.dest}, {"max_bytes", o.max_bytes}, {"catalog", catalog_path}},
                   std::nullopt, started);
    return kExitOk;
}

int cmd_ingest(const Options& o) {
    const auto started = utc_now();
    IngestOptions io;
    io.max_bytes = o.max_bytes;
    io.pair_cap = o.cap.value_or(kDefaultPairCap);
    io.pair_seed = o.seed.value_or(0);
    if (io.pair_cap < 1) throw ArgumentError("--cap must be at least 1");
    const auto catalog = scan_directory(o.root, io);
    auto out = open_output(o.out);
    write_catalog(out, catalog);
    std::cout << catalog.size() << " datasets admitted\n";
    write_run_meta(parent_of(o.out), "ingest",
                   {{"root", o.root}, {"max_bytes", o.max_bytes}, {"cap", io.pair_cap}, {"output", o.out}},
                   io.pair_seed, started);
    return kExitOk;
}

int cmd_build(const Options& o) {
    const auto started = utc_now();
    const auto catalog = read_catalog(o.catalog);
    std::optional<Dictionary> dict;
    if (!o.dict.empty()) dict = Dictionary::load(o.dict);
    BuildOptions bo;
    bo.pair_cap = o.cap;
    bo.seed = o.seed;
    bo.jobs = o.jobs;
    bo.dictionary = dict ? &*dict : nullptr;
    const auto records = build_corpus(catalog, bo);
    auto out = open_output(o.out);
    write_corpus(out, records);
    std::cout << records.size() << " column pairs from " << catalog.size() << " datasets\n";
    write_run_meta(parent_of(o.out), "build",
                   {{"catalog", o.catalog},
                    {"cap", o.cap ? json(*o.cap) : json("from catalog")},
                    {"dict", o.dict},
                    {"output", o.out}},
                   o.seed, started);
    return kExitOk;
}

int cmd_featurize(const Options& o) {
    const auto started = utc_now();
    auto records = read_corpus(o.corpus);
    featurize(records, Dictionary::load(o.dict));
    auto out = open_output(o.out);
    write_corpus(out, records);
    write_run_meta(parent_of(o.out), "featurize", {{"corpus", o.corpus}, {"dict", o.dict}, {"output", o.out}},
                   std::nullopt, started);
    return kExitOk;
}

int cmd_stats(const Options& o) {
    const auto started = utc_now();
    const auto records = read_corpus(o.corpus);
    std::vector<DatasetDescriptor> catalog;
    if (!o.catalog.empty()) catalog = read_catalog(o.catalog);
    const auto s = corpus_stats(records, catalog);

    json j{{"dataset_count", s.dataset_count},
           {"pair_count", s.pair_count},
           {"numeric_pair_count", s.numeric_pair_count},
           {"avg_rows", s.avg_rows},
           {"avg_distinct_per_column", s.avg_distinct_per_column},
           {"name_length_chars", name_length_histogram(records, LengthUnit::chars)},
           {"name_length_tokens", name_length_histogram(records, LengthUnit::tokens)}};
    for (Metric m : kAllMetrics) j["coefficient_histogram"][std::string(to_string(m))] = coefficient_histogram(records, m);

    std::cout << "datasets:               " << s.dataset_count << '\n'
              << "column pairs:           " << s.pair_count << '\n'
              << "numeric column pairs:   " << s.numeric_pair_count << '\n'
              << "avg rows per dataset:   " << s.avg_rows << '\n'
              << "avg distinct per column: " << s.avg_distinct_per_column << '\n';
    if (!o.out.empty()) {
        auto out = open_output(o.out);
        out << j.dump(2) << '\n';
    } else {
        std::cout << j.dump() << '\n';
    }
    write_run_meta(o.out.empty() ? fs::path(".") : parent_of(o.out), "stats",
                   {{"corpus", o.corpus}, {"catalog", o.catalog}, {"output", o.out}}, std::nullopt, started);
    return kExitOk;
}

int cmd_split(const Options& o) {
    const auto started = utc_now();
    const auto records = read_corpus(o.corpus);
    const SplitSpec spec{parse_split_mode(o.mode), o.test_ratio, o.seed.value_or(0)};
    const auto split = make_split(records, spec);
    const auto train = select<ColumnPairRecord>(records, split.train);
    const auto test = select<ColumnPairRecord>(records, split.test);
    const std::string train_path = o.out_prefix + ".train.jsonl";
    const std::string test_path = o.out_prefix + ".test.jsonl";
    {
        auto out = open_output(train_path);
        write_corpus(out, train);
    }
    {
        auto out = open_output(test_path);
        write_corpus(out, test);
    }
    std::cout << "train " << train.size() << ", test " << test.size() << " (achieved test ratio "
              << split.achieved_test_ratio() << ")\n";
    write_run_meta(parent_of(train_path), "split",
                   {{"corpus", o.corpus},
                    {"mode", to_string(spec.mode)},
                    {"test_ratio", o.test_ratio},
                    {"achieved_test_ratio", split.achieved_test_ratio()},
                    {"train", train_path},
                    {"test", test_path}},
                   spec.seed, started);
    return kExitOk;
}

int cmd_predict(const Options& o) {
    const auto started = utc_now();
    const auto cfg = label_config(o);
    const auto test = read_corpus(o.test);
    std::vector<ColumnPairRecord> train;
    std::vector<bool> train_labels;
    PredictorRun run;
    run.kind = parse_predictor(o.method);
    if (run.kind != PredictorKind::baseline) {
        for (auto& r : read_corpus(o.train)) {
            if (!eligible(r, cfg.metric)) continue;
            train_labels.push_back(label(r, cfg));
            train.push_back(std::move(r));
        }
    }
    run.hyperparams.epochs = o.epochs;
    run.hyperparams.learning_rate = o.learning_rate;
    run.hyperparams.l2 = o.l2;
    run.hyperparams.seed = o.seed.value_or(0);
    run.adapter.command = o.adapter_cmd;
    run.adapter.epochs = o.epochs;
    run.adapter.batch_size = o.batch;
    run.adapter.work_dir = o.adapter_dir.empty() ? parent_of(o.out) / "adapter-runs" : fs::path(o.adapter_dir);
    run.adapter.timeout = std::chrono::milliseconds(static_cast<long long>(o.adapter_timeout_s * 1000.0));
    if (run.kind == PredictorKind::adapter && o.adapter_cmd.empty())
        throw ArgumentError("--adapter-cmd is required for --method adapter");

    const auto preds = run_predictor(run, train, train_labels, test);
    auto out = open_output(o.out);
    for (std::size_t i = 0; i < test.size(); ++i) {
        out << json{{"dataset_id", test[i].dataset_id},
                    {"name_a", test[i].name_a},
                    {"name_b", test[i].name_b},
                    {"score", preds[i].score},
                    {"label", preds[i].label}}
                   .dump()
            << '\n';
    }
    std::cout << preds.size() << " predictions written\n";
    write_run_meta(parent_of(o.out), "predict",
                   {{"method", o.method},
                    {"train", o.train},
                    {"test", o.test},
                    {"label", label_json(cfg)},
                    {"epochs", o.epochs},
                    {"batch", o.batch},
                    {"adapter_cmd", o.adapter_cmd},
                    {"output", o.out}},
                   run.hyperparams.seed, started);
    return kExitOk;
}

int cmd_evaluate(const Options& o) {
    const auto started = utc_now();
    const auto cfg = label_config(o);
    const auto truth_records = read_corpus(o.truth);
    std::vector<json> pred_rows;
    for_each_jsonl(o.preds, [&](const json& j) { pred_rows.push_back(j); });
    if (pred_rows.size() != truth_records.size())
        throw DataError("predictions have " + std::to_string(pred_rows.size()) + " rows, truth has " +
                        std::to_string(truth_records.size()));

    std::vector<ColumnPairRecord> evaluated;
    std::vector<bool> truth, predicted;
    for (std::size_t i = 0; i < truth_records.size(); ++i) {
        const auto& r = truth_records[i];
        const auto& p = pred_rows[i];
        if (p.value("name_a", r.name_a) != r.name_a || p.value("name_b", r.name_b) != r.name_b)
            throw DataError("prediction row " + std::to_string(i + 1) + " does not match truth row");
        if (!eligible(r, cfg.metric)) continue;
        evaluated.push_back(r);
        truth.push_back(label(r, cfg));
        predicted.push_back(p.contains("label") ? p["label"].get<bool>()
                                                : p.at("score").get<double>() >= kDecisionThreshold);
    }
    if (evaluated.empty()) throw DataError("no records eligible for metric " + o.metric);
    const auto report = metrics(confusion(truth, predicted));
    json j{{"label", label_json(cfg)}, {"evaluated", evaluated.size()}, {"overall", report_json(report)}};
    std::cout << "overall  ";
    print_report(std::cout, report);
    if (!o.breakdown.empty()) {
        const auto feature = parse_feature(o.breakdown);
        for (const auto& b : breakdown(evaluated, truth, predicted, feature)) {
            std::cout << std::left << std::setw(9) << to_string(b.bucket) << std::right;
            if (b.report) print_report(std::cout, *b.report);
            else std::cout << "(empty)\n";
            j["breakdown"][std::string(to_string(feature))][std::string(to_string(b.bucket))] =
                b.report ? report_json(*b.report) : json(nullptr);
        }
    }
    if (!o.out.empty()) {
        auto out = open_output(o.out);
        out << j.dump(2) << '\n';
    }
    write_run_meta(o.out.empty() ? fs::path(".") : parent_of(o.out), "evaluate",
                   {{"truth", o.truth}, {"preds", o.preds}, {"label", label_json(cfg)}, {"breakdown", o.breakdown}},
                   std::nullopt, started);
    return kExitOk;
}

int cmd_sweep(const Options& o, const CLI::App& sub) {
    const auto started = utc_now();
    const auto records = read_corpus(o.corpus);
    const auto file = tools::load_grid(o.grid);

    SweepOptions so;
    so.jobs = o.jobs;
    so.seed = o.seed.value_or(file.seed.value_or(0));
    so.hyperparams.seed = so.seed;
    so.hyperparams.epochs = sub.count("--epochs") ? o.epochs : file.epochs.value_or(o.epochs);
    so.hyperparams.learning_rate = sub.count("--learning-rate") ? o.learning_rate : file.learning_rate.value_or(o.learning_rate);
    so.hyperparams.l2 = sub.count("--l2") ? o.l2 : file.l2.value_or(o.l2);
    so.adapter.command = sub.count("--adapter-cmd") ? o.adapter_cmd : file.adapter_cmd.value_or(o.adapter_cmd);
    so.adapter.epochs = so.hyperparams.epochs;
    so.adapter.batch_size = sub.count("--batch") ? o.batch : file.batch.value_or(o.batch);
    const double timeout_s = file.adapter_timeout_s.value_or(o.adapter_timeout_s);
    so.adapter.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0));
    so.adapter.work_dir = fs::path(o.out) / "adapter-runs";
    if (file.breakdowns) so.breakdowns = *file.breakdowns;

    const auto rows = run_sweep(records, file.grid, so);
    const auto written = render_report(rows, o.out);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.report ? 0 : 1;
    std::cout << rows.size() << " cells evaluated (" << failed << " failed); wrote " << written.size()
              << " files to " << o.out << '\n';

    json grid_json{{"metrics", json::array()},
                   {"coef_thresholds", file.grid.coef_thresholds},
                   {"test_ratios", file.grid.test_ratios},
                   {"split_modes", json::array()},
                   {"predictors", json::array()},
                   {"p_threshold", file.grid.p_threshold ? json(*file.grid.p_threshold) : json(nullptr)}};
    for (Metric m : file.grid.metrics) grid_json["metrics"].push_back(to_string(m));
    for (SplitMode m : file.grid.split_modes) grid_json["split_modes"].push_back(to_string(m));
    for (PredictorKind p : file.grid.predictors) grid_json["predictors"].push_back(to_string(p));
    write_run_meta(o.out, "sweep",
                   {{"corpus", o.corpus},
                    {"grid_file", o.grid},
                    {"grid", grid_json},
                    {"epochs", so.hyperparams.epochs},
                    {"learning_rate", so.hyperparams.learning_rate},
                    {"l2", so.hyperparams.l2},
                    {"batch", so.adapter.batch_size},
                    {"adapter_cmd", so.adapter.command}},
                   so.seed, started);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    // Accept the single-dash spelling "-o-prefix" used in docs.
    std::vector<std::string> args(argv, argv + argc);
    for (auto& a : args)
        if (a == "-o-prefix") a = "--o-prefix";
    std::vector<char*> argp;
    for (auto& a : args) argp.push_back(a.data());

    CLI::App app{"corrlens: column-pair correlation corpora and name-only correlation predictors"};
    app.set_version_flag("--version", CORRLENS_VERSION);
    app.set_config("--config", "", "TOML-style key = value file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    Options o;
    app.add_option("-j,--jobs", o.jobs, "Worker threads for parallel stages")->capture_default_str()->check(CLI::PositiveNumber);

    auto* fetch = app.add_subcommand("fetch", "Copy/download datasets listed in a manifest");
    fetch->add_option("--manifest", o.manifest, "One URL or path per line, '#' comments")->required()->check(CLI::ExistingFile);
    fetch->add_option("--dest", o.dest, "Destination directory")->required();
    fetch->add_option("--max-bytes", o.max_bytes, "Per-file byte cap")->capture_default_str();
    fetch->add_option("-o,--output", o.out, "Catalog output (default DEST/catalog.jsonl)");

    auto* ingest = app.add_subcommand("ingest", "Scan a directory tree of CSV files into a catalog");
    ingest->add_option("--root", o.root, "Directory to scan")->required()->check(CLI::ExistingDirectory);
    ingest->add_option("--max-bytes", o.max_bytes, "Per-file byte cap")->capture_default_str();
    ingest->add_option("--cap", o.cap, "Maximum column pairs per dataset (default 100)");
    ingest->add_option("--seed", o.seed, "Seed for pair subsampling (default 0)");
    ingest->add_option("-o,--output", o.out, "Catalog JSON-lines output")->required();

    auto* build = app.add_subcommand("build", "Compute correlations for every column pair in a catalog");
    build->add_option("--catalog", o.catalog, "Catalog JSON-lines file")->required()->check(CLI::ExistingFile);
    build->add_option("--cap", o.cap, "Override the catalog's pair cap");
    build->add_option("--seed", o.seed, "Override the catalog's pair seed");
    build->add_option("--dict", o.dict, "Word list for the word-ratio feature")->check(CLI::ExistingFile);
    build->add_option("-o,--output", o.out, "Corpus JSON-lines output")->required();

    auto* feat = app.add_subcommand("featurize", "Recompute name features with a dictionary");
    feat->add_option("--corpus", o.corpus, "Corpus JSON-lines file")->required()->check(CLI::ExistingFile);
    feat->add_option("--dict", o.dict, "Word list, one word per line")->required()->check(CLI::ExistingFile);
    feat->add_option("-o,--output", o.out, "Corpus JSON-lines output")->required();

    auto* stats = app.add_subcommand("stats", "Corpus statistics and histograms");
    stats->add_option("--corpus", o.corpus, "Corpus JSON-lines file")->required()->check(CLI::ExistingFile);
    stats->add_option("--catalog", o.catalog, "Catalog for row/distinct-value averages")->check(CLI::ExistingFile);
    stats->add_option("-o,--output", o.out, "Write statistics JSON here instead of stdout");

    auto* split = app.add_subcommand("split", "Partition a corpus into train and test files");
    split->add_option("--corpus", o.corpus, "Corpus JSON-lines file")->required()->check(CLI::ExistingFile);
    split->add_option("--mode", o.mode, "pair or dataset")->capture_default_str()
        ->check(CLI::IsMember({"pair", "dataset", "by_pair", "by_dataset"}));
    split->add_option("--test-ratio", o.test_ratio, "Fraction of pairs for the test side")->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    split->add_option("--seed", o.seed, "Shuffle seed (default 0)");
    split->add_option("--o-prefix,--out-prefix", o.out_prefix, "Writes PREFIX.train.jsonl and PREFIX.test.jsonl")->required();

    auto add_label_options = [&](CLI::App* sub) {
        sub->add_option("--metric", o.metric, "pearson, spearman or theils_u")->capture_default_str()
            ->check(CLI::IsMember({"pearson", "spearman", "theils_u"}));
        sub->add_option("--threshold", o.threshold, "Coefficient threshold (default 0.9)")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--p-threshold", o.p_threshold, "p-value threshold or 'none' (default 0.05; none for theils_u)");
    };

    auto* predict = app.add_subcommand("predict", "Predict correlation labels from column names");
    predict->add_option("--method", o.method, "baseline, builtin or adapter")->capture_default_str()
        ->check(CLI::IsMember({"baseline", "builtin", "adapter"}));
    predict->add_option("--train", o.train, "Training corpus")->required()->check(CLI::ExistingFile);
    predict->add_option("--test", o.test, "Test corpus")->required()->check(CLI::ExistingFile);
    predict->add_option("--adapter-cmd", o.adapter_cmd, "External model command (adapter method)");
    predict->add_option("--adapter-dir", o.adapter_dir, "Parent of adapter run directories");
    predict->add_option("--adapter-timeout", o.adapter_timeout_s, "Adapter timeout in seconds")->capture_default_str();
    predict->add_option("--epochs", o.epochs, "Training epochs")->capture_default_str();
    predict->add_option("--batch", o.batch, "Adapter batch size")->capture_default_str();
    predict->add_option("--learning-rate", o.learning_rate, "Built-in model step size")->capture_default_str();
    predict->add_option("--l2", o.l2, "Built-in model L2 penalty")->capture_default_str();
    predict->add_option("--seed", o.seed, "Training seed (default 0)");
    predict->add_option("-o,--output", o.out, "Predictions JSON-lines output")->required();
    add_label_options(predict);

    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against corpus labels");
    evaluate->add_option("--truth", o.truth, "Corpus holding the true correlations")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--preds", o.preds, "Predictions from `predict`")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--breakdown", o.breakdown, "char_len, token_count or word_ratio")
        ->check(CLI::IsMember({"char_len", "token_count", "word_ratio"}));
    evaluate->add_option("-o,--output", o.out, "Also write the report as JSON");
    add_label_options(evaluate);

    auto* sweep = app.add_subcommand("sweep", "Run the threshold x test-ratio experiment grid");
    sweep->add_option("--corpus", o.corpus, "Corpus JSON-lines file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--grid", o.grid, "Grid definition (TOML-style)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--seed", o.seed, "Overrides the grid file's seed");
    sweep->add_option("--epochs", o.epochs, "Overrides the grid file's epochs");
    sweep->add_option("--batch", o.batch, "Overrides the grid file's adapter batch size");
    sweep->add_option("--learning-rate", o.learning_rate, "Overrides the grid file's learning rate");
    sweep->add_option("--l2", o.l2, "Overrides the grid file's L2 penalty");
    sweep->add_option("--adapter-cmd", o.adapter_cmd, "Overrides the grid file's adapter command");
    sweep->add_option("-o,--output", o.out, "Report directory")->required();

    try {
        app.parse(static_cast<int>(argp.size()), argp.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*fetch) return cmd_fetch(o);
        if (*ingest) return cmd_ingest(o);
        if (*build) return cmd_build(o);
        if (*feat) return cmd_featurize(o);
        if (*stats) return cmd_stats(o);
        if (*split) return cmd_split(o);
        if (*predict) return cmd_predict(o);
        if (*evaluate) return cmd_evaluate(o);
        if (*sweep) return cmd_sweep(o, *sweep);
    } catch (const AdapterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (!e.diagnostics().empty()) std::cerr << "adapter stderr:\n" << e.diagnostics() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
