// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrlens/corrlens.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace corrlens;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

nlohmann::json load_oracle() {
    std::ifstream in(std::string(CORRLENS_TEST_FIXTURES) + "/stats_oracle.json");
    return nlohmann::json::parse(in);
}

Outcome statistics_oracle() {
    const auto start = Clock::now();
    const auto oracle = load_oracle();
    double worst_coef = 0, worst_p = 0;
    std::size_t cases = 0;
    for (const auto& c : oracle["cases"]) {
        const auto x = c["x"].get<std::vector<double>>();
        const auto y = c["y"].get<std::vector<double>>();
        const auto pr = pearson(x, y);
        const auto sr = spearman(x, y);
        if (!pr.coefficient || !sr.coefficient || !pr.p_value || !sr.p_value) return {false, "undefined result"};
        worst_coef = std::max({worst_coef, std::fabs(*pr.coefficient - c["pearson_r"].get<double>()),
                               std::fabs(*sr.coefficient - c["spearman_rho"].get<double>())});
        worst_p = std::max({worst_p, std::fabs(*pr.p_value - c["pearson_p"].get<double>()),
                            std::fabs(*sr.p_value - c["spearman_p"].get<double>())});
        ++cases;
    }

    std::mt19937_64 rng(20240611);
    double worst_u = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 4 + rng() % 197;
        const std::size_t kx = 1 + rng() % 8, ky = 1 + rng() % 8;
        std::vector<std::string> x(n), y(n);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = "x" + std::to_string(rng() % kx);
            y[k] = rng() % 3 == 0 ? x[k] : "y" + std::to_string(rng() % ky);
        }
        worst_u = std::max(worst_u, std::fabs(*theils_u(x, y).coefficient - oracle::theils_u_brute_force(x, y)));
    }
    const double elapsed = seconds_since(start);
    const bool pass = cases == 1000 && worst_coef <= 1e-9 && worst_p <= 1e-8 && worst_u <= 1e-12 && elapsed < 30;
    return {pass, fmt("%zu cases, max |dcoef| %.2e, max |dp| %.2e, max |dU| %.2e, %.1f s", cases, worst_coef, worst_p,
                      worst_u, elapsed)};
}

Outcome special_functions() {
    double worst = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k) {
                const double a = 0.1 + 2.0 * i, b = 0.15 + 1.7 * j, x = 0.05 + 0.1 * k;
                const double lhs = regularized_incomplete_beta(a, b, x);
                const double rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
                worst = std::max(worst, std::fabs(lhs - rhs));
            }
    const double p = t_two_sided_p(2.3094, 3);
    const bool pass = worst <= 1e-10 && std::fabs(p - 0.1041) <= 1e-4;
    return {pass, fmt("symmetry max error %.2e on 1000 points; t_two_sided_p(2.3094, 3) = %.6f", worst, p)};
}

Outcome metric_suite() {
    std::mt19937_64 rng(7);
    double worst = 0;
    bool counts_ok = true;
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t n = 1 + rng() % 100;
        std::vector<bool> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = rng() % 2;
            pred[i] = rng() % 3 == 0 ? !truth[i] : static_cast<bool>(rng() % 2);
        }
        const auto m = metrics(confusion(truth, pred));
        const auto c = oracle::recount(truth, pred);
        counts_ok &= m.counts.tp == c.tp && m.counts.fp == c.fp && m.counts.tn == c.tn && m.counts.fn == c.fn;
        const double tp = c.tp, fp = c.fp, tn = c.tn, fn = c.fn;
        const double pre = tp + fp > 0 ? tp / (tp + fp) : 0, rec = tp + fn > 0 ? tp / (tp + fn) : 0;
        const double f1 = pre + rec > 0 ? 2 * pre * rec / (pre + rec) : 0;
        const double den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
        const double mcc = den > 0 ? (tp * tn - fp * fn) / den : 0;
        worst = std::max({worst, std::fabs(m.precision - pre), std::fabs(m.recall - rec), std::fabs(m.f1 - f1),
                          std::fabs(m.mcc - mcc), std::fabs(m.accuracy - (tp + tn) / n)});
    }
    // Counts with precision 0.61 and recall 0.87 exactly.
    const double f1 = metrics({5307, 3393, 1000, 793}).f1;
    const bool pass = counts_ok && worst <= 1e-12 && std::fabs(f1 - 0.717) < 5e-4 && std::lround(f1 * 100) >= 71 &&
                      std::lround(f1 * 100) <= 72;
    return {pass, fmt("1000 lists, counts exact: %s, max ratio error %.2e; F1(p=0.61, r=0.87) = %.4f",
                      counts_ok ? "yes" : "no", worst, f1)};
}

std::string corpus_bytes(const std::vector<ColumnPairRecord>& records) {
    std::ostringstream out;
    write_corpus(out, records);
    return out.str();
}

Outcome pipeline_invariants() {
    const auto start = Clock::now();
    test_support::TempDir dir;
    synthetic::write_csv_fixture(dir.path() / "data", 50, 2024);
    IngestOptions ingest;
    ingest.pair_seed = 5;
    const auto catalog = scan_directory(dir.path() / "data", ingest, nullptr);
    BuildOptions build;
    build.log = nullptr;
    const auto records = build_corpus(catalog, build);

    std::vector<std::string> problems;
    if (catalog.size() != 50) problems.push_back("catalog size " + std::to_string(catalog.size()));
    std::map<std::string, std::size_t> per_dataset;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    std::size_t capped = 0;
    for (const auto& r : records) {
        ++per_dataset[r.dataset_id];
        if (!(r.name_a < r.name_b)) problems.push_back("non-canonical pair");
        if (!seen.insert({r.dataset_id, r.name_a, r.name_b}).second) problems.push_back("duplicate pair");
    }
    for (const auto& [id, n] : per_dataset) {
        if (n > kDefaultPairCap) problems.push_back("cap exceeded in " + id);
        capped += n == kDefaultPairCap;
    }

    for (std::uint64_t seed = 0; seed < 5; ++seed)
        for (double ratio : {0.2, 0.5, 0.8})
            for (SplitMode mode : {SplitMode::by_pair, SplitMode::by_dataset}) {
                const auto s = make_split(records, {mode, ratio, seed});
                std::vector<std::size_t> all = s.train;
                all.insert(all.end(), s.test.begin(), s.test.end());
                std::sort(all.begin(), all.end());
                for (std::size_t i = 0; i < all.size(); ++i)
                    if (all[i] != i) {
                        problems.push_back("split not a partition");
                        break;
                    }
                if (all.size() != records.size()) problems.push_back("split lost records");
                if (mode == SplitMode::by_dataset) {
                    std::set<std::string> train_ids;
                    for (auto i : s.train) train_ids.insert(records[i].dataset_id);
                    for (auto i : s.test)
                        if (train_ids.contains(records[i].dataset_id)) {
                            problems.push_back("dataset on both sides");
                            break;
                        }
                }
            }

    // Re-run everything under the same seeds, with more workers.
    BuildOptions parallel = build;
    parallel.jobs = std::max<std::size_t>(4, default_jobs());
    const auto again = build_corpus(scan_directory(dir.path() / "data", ingest, nullptr), parallel);
    if (corpus_bytes(records) != corpus_bytes(again)) problems.push_back("corpus bytes differ");
    SweepGrid grid;
    grid.predictors = {PredictorKind::baseline, PredictorKind::builtin};
    grid.split_modes = {SplitMode::by_pair, SplitMode::by_dataset};
    SweepOptions sweep_opts;
    sweep_opts.seed = 3;
    std::ostringstream first, second;
    write_report_csv(first, run_sweep(records, grid, sweep_opts));
    sweep_opts.jobs = parallel.jobs;
    write_report_csv(second, run_sweep(again, grid, sweep_opts));
    if (first.str() != second.str()) problems.push_back("sweep bytes differ");

    const double elapsed = seconds_since(start);
    if (elapsed >= 60) problems.push_back("too slow");
    std::string detail = fmt("50 datasets, %zu pairs, %zu datasets at the cap, %.1f s", records.size(), capped, elapsed);
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty() && capped > 0, detail};
}

struct Evaluation {
    MetricReport builtin;
    MetricReport baseline;
    std::vector<BucketReport> buckets;
};

Evaluation evaluate_by_pair(const std::vector<ColumnPairRecord>& corpus, std::uint64_t seed) {
    const auto split = split_by_pair(corpus.size(), {SplitMode::by_pair, 0.2, seed});
    const auto train = select<ColumnPairRecord>(corpus, split.train);
    const auto test = select<ColumnPairRecord>(corpus, split.test);
    const LabelConfig cfg;
    const auto train_labels = labels_for(train, cfg);
    const auto truth = labels_for(test, cfg);
    PredictorRun run;
    run.hyperparams.seed = seed;
    run.kind = PredictorKind::builtin;
    const auto builtin = labels_of(run_predictor(run, train, train_labels, test));
    run.kind = PredictorKind::baseline;
    const auto baseline = labels_of(run_predictor(run, train, train_labels, test));
    return {metrics(confusion(truth, builtin)), metrics(confusion(truth, baseline)),
            breakdown(test, truth, builtin, Feature::char_len)};
}

Outcome hypothesis_better_than_baseline() {
    const auto start = Clock::now();
    const auto corpus = synthetic::latent_concept_corpus(2000, 11);
    const auto e = evaluate_by_pair(corpus, 1);
    const double elapsed = seconds_since(start);
    const bool pass = e.builtin.f1 >= 0.90 && e.baseline.recall <= 0.10 && e.baseline.recall < e.builtin.recall &&
                      elapsed < 120;
    return {pass, fmt("built-in F1 %.3f recall %.3f; baseline recall %.3f; %.1f s", e.builtin.f1, e.builtin.recall,
                      e.baseline.recall, elapsed)};
}

Outcome hypothesis_longer_names() {
    const auto corpus = synthetic::length_signal_corpus(2000, 0.6, 13);
    const auto e = evaluate_by_pair(corpus, 2);
    const auto& low = e.buckets[0];
    const auto& high = e.buckets[2];
    if (!low.report || !high.report) return {false, "empty bucket"};
    const double gap = high.report->accuracy - low.report->accuracy;
    return {gap >= 0.10, fmt("Q50-100 accuracy %.3f (n=%zu), Q0-25 accuracy %.3f (n=%zu), gap %.3f",
                             high.report->accuracy, high.counts.total(), low.report->accuracy, low.counts.total(), gap)};
}

Outcome gradient_check() {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal;
    double worst = 0;
    for (int instance = 0; instance < 20; ++instance) {
        const std::size_t dim = 8 + rng() % 57;
        const std::size_t count = 2 + rng() % 9;
        std::vector<TrainingSample> samples(count);
        for (auto& s : samples) {
            std::set<std::uint32_t> idx;
            for (std::size_t k = 1 + rng() % 6; k > 0; --k) idx.insert(static_cast<std::uint32_t>(rng() % dim));
            for (auto i : idx) s.features.emplace_back(i, normal(rng));
            s.target = rng() % 2;
        }
        std::vector<double> w(dim);
        for (auto& x : w) x = 0.5 * normal(rng);
        const double b = normal(rng);
        const double l2 = instance % 2 ? 0.0 : 1e-2;
        const auto g = log_loss_gradient(w, b, samples, l2);

        const double h = 1e-5;
        double diff2 = 0, analytic2 = 0, numeric2 = 0;
        for (std::size_t i = 0; i <= dim; ++i) {
            double numeric;
            if (i < dim) {
                auto wp = w, wm = w;
                wp[i] += h;
                wm[i] -= h;
                numeric = (log_loss(wp, b, samples, l2) - log_loss(wm, b, samples, l2)) / (2 * h);
            } else {
                numeric = (log_loss(w, b + h, samples, l2) - log_loss(w, b - h, samples, l2)) / (2 * h);
            }
            const double analytic = i < dim ? g.weights[i] : g.bias;
            diff2 += (analytic - numeric) * (analytic - numeric);
            analytic2 += analytic * analytic;
            numeric2 += numeric * numeric;
        }
        const double rel = std::sqrt(diff2) / std::max({std::sqrt(analytic2), std::sqrt(numeric2), 1e-12});
        worst = std::max(worst, rel);
    }
    return {worst <= 1e-6, fmt("20 instances, max relative error %.2e", worst)};
}

Outcome sweep_shape() {
    const auto corpus = synthetic::latent_concept_corpus(400, 5);
    SweepGrid grid;
    grid.coef_thresholds = {0.8, 0.9, 0.95, 0.99};
    grid.test_ratios = {0.2, 0.8};
    const auto rows = run_sweep(corpus, grid);
    std::ostringstream csv;
    write_report_csv(csv, rows);
    const std::string text = csv.str();
    const auto lines = std::count(text.begin(), text.end(), '\n');
    bool ordered = rows.size() == 8;
    for (std::size_t i = 0; ordered && i < rows.size(); ++i)
        ordered = rows[i].coef_threshold == grid.coef_thresholds[i / 2] && rows[i].test_ratio == grid.test_ratios[i % 2] &&
                  rows[i].report.has_value();
    return {ordered && lines == 9, fmt("%zu rows, %ld CSV lines including header", rows.size(), static_cast<long>(lines))};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"statistics oracle suite", statistics_oracle},
        {"special functions", special_functions},
        {"metric suite", metric_suite},
        {"pipeline invariants", pipeline_invariants},
        {"built-in beats Jaccard baseline", hypothesis_better_than_baseline},
        {"longer names predicted better", hypothesis_longer_names},
        {"built-in gradient check", gradient_check},
        {"sweep table shape", sweep_shape},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
