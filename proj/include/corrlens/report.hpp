#pragma once

// Sweep report rendering: machine CSV, human markdown tables and plot-data
// CSVs (metric columns always f1, rec, pre, mcc, acc).

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "corrlens/error.hpp"
#include "corrlens/eval.hpp"

namespace corrlens {

inline constexpr std::string_view kReportHeader =
    "metric,coef_threshold,test_ratio,split_mode,predictor,tp,fp,tn,fn,f1,rec,pre,mcc,acc";
inline constexpr std::string_view kPlotMetricColumns = "f1,rec,pre,mcc,acc";

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

namespace detail {

inline std::string metric_columns(const MetricReport& m) {
    return format_double(m.f1) + ',' + format_double(m.recall) + ',' + format_double(m.precision) + ',' +
           format_double(m.mcc) + ',' + format_double(m.accuracy);
}

inline std::string count_columns(const ConfusionCounts& c) {
    return std::to_string(c.tp) + ',' + std::to_string(c.fp) + ',' + std::to_string(c.tn) + ',' +
           std::to_string(c.fn);
}

inline std::string cell_key(const SweepResultRow& r) {
    return std::string(to_string(r.metric)) + ',' + format_double(r.coef_threshold) + ',' +
           format_double(r.test_ratio) + ',' + std::string(to_string(r.split_mode)) + ',' +
           std::string(to_string(r.predictor));
}

inline std::string percent(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(0) << v * 100.0;
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace detail

inline void write_report_csv(std::ostream& out, std::span<const SweepResultRow> rows) {
    out << kReportHeader << '\n';
    for (const auto& r : rows) {
        out << detail::cell_key(r) << ',';
        if (r.report)
            out << detail::count_columns(r.report->counts) << ',' << detail::metric_columns(*r.report);
        else
            out << ",,,,,,,,";
        out << '\n';
    }
}

// Human-readable tables, one per (metric, split mode, predictor) group, with
// the quality columns in percent.
inline void write_report_markdown(std::ostream& out, std::span<const SweepResultRow> rows) {
    using Group = std::tuple<Metric, SplitMode, PredictorKind>;
    std::vector<Group> order;
    std::map<Group, std::vector<const SweepResultRow*>> groups;
    for (const auto& r : rows) {
        const Group g{r.metric, r.split_mode, r.predictor};
        if (!groups.contains(g)) order.push_back(g);
        groups[g].push_back(&r);
    }
    for (const auto& g : order) {
        const auto [metric, mode, predictor] = g;
        out << "### " << to_string(metric) << " / " << to_string(mode) << " / " << to_string(predictor) << "\n\n";
        out << "| Threshold | Test | F1 | Rec | Pre | Acc | MCC |\n";
        out << "|----------:|-----:|---:|----:|----:|----:|----:|\n";
        for (const auto* r : groups[g]) {
            out << "| " << format_double(r->coef_threshold) << " | " << format_double(r->test_ratio) << " | ";
            if (r->report) {
                const auto& m = *r->report;
                out << detail::percent(m.f1) << " | " << detail::percent(m.recall) << " | "
                    << detail::percent(m.precision) << " | " << detail::percent(m.accuracy) << " | "
                    << detail::percent(m.mcc) << " |\n";
            } else {
                out << "error | | | | |\n";
            }
        }
        out << '\n';
    }
}

// Writes sweep.csv, sweep.md, one plot_<metric>_<split>_<predictor>.csv per
// group, breakdown_<feature>.csv when breakdowns exist, and failures.csv when
// any cell failed. Returns the files written.
inline std::vector<std::filesystem::path> render_report(std::span<const SweepResultRow> rows,
                                                        const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!fs::is_directory(out_dir)) throw Error("cannot create report directory " + out_dir.string());
    std::vector<fs::path> written;

    {
        std::ostringstream csv;
        write_report_csv(csv, rows);
        detail::write_file(out_dir / "sweep.csv", csv.str());
        written.push_back(out_dir / "sweep.csv");
        std::ostringstream md;
        write_report_markdown(md, rows);
        detail::write_file(out_dir / "sweep.md", md.str());
        written.push_back(out_dir / "sweep.md");
    }

    std::map<std::string, std::ostringstream> plots;
    std::vector<std::string> plot_order;
    for (const auto& r : rows) {
        const std::string name = "plot_" + std::string(to_string(r.metric)) + "_" +
                                 std::string(to_string(r.split_mode)) + "_" +
                                 std::string(to_string(r.predictor)) + ".csv";
        if (!plots.contains(name)) {
            plot_order.push_back(name);
            plots[name] << "coef_threshold,test_ratio," << kPlotMetricColumns << '\n';
        }
        if (!r.report) continue;
        plots[name] << format_double(r.coef_threshold) << ',' << format_double(r.test_ratio) << ','
                    << detail::metric_columns(*r.report) << '\n';
    }
    for (const auto& name : plot_order) {
        detail::write_file(out_dir / name, plots[name].str());
        written.push_back(out_dir / name);
    }

    std::map<Feature, std::ostringstream> breakdowns;
    for (const auto& r : rows) {
        for (const auto& [feature, buckets] : r.breakdowns) {
            auto& out = breakdowns[feature];
            if (out.tellp() == 0)
                out << "metric,coef_threshold,test_ratio,split_mode,predictor,bucket,tp,fp,tn,fn,"
                    << kPlotMetricColumns << '\n';
            for (const auto& b : buckets) {
                out << detail::cell_key(r) << ',' << to_string(b.bucket) << ','
                    << detail::count_columns(b.counts) << ',';
                out << (b.report ? detail::metric_columns(*b.report) : std::string(",,,,")) << '\n';
            }
        }
    }
    for (auto& [feature, out] : breakdowns) {
        const auto path = out_dir / ("breakdown_" + std::string(to_string(feature)) + ".csv");
        detail::write_file(path, out.str());
        written.push_back(path);
    }

    std::ostringstream failures;
    for (const auto& r : rows) {
        if (r.report) continue;
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::replace(msg.begin(), msg.end(), '"', '\'');
        failures << detail::cell_key(r) << ",\"" << msg << "\"\n";
    }
    if (failures.tellp() > 0) {
        detail::write_file(out_dir / "failures.csv",
                           "metric,coef_threshold,test_ratio,split_mode,predictor,error\n" + failures.str());
        written.push_back(out_dir / "failures.csv");
    }
    return written;
}

// ---------------------------------------------------------------------------
// Reading sweep.csv back

namespace detail {

inline std::vector<std::string> split_commas(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double_field(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("bad number in report: " + s);
    return v;
}

inline std::size_t parse_count_field(const std::string& s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("bad count in report: " + s);
    return v;
}

}  // namespace detail

inline std::vector<SweepResultRow> read_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kReportHeader) throw DataError("not a sweep report: bad header");
    std::vector<SweepResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_commas(line);
        if (f.size() != 14) throw DataError("sweep report row has " + std::to_string(f.size()) + " fields");
        SweepResultRow r;
        r.metric = parse_metric(f[0]);
        r.coef_threshold = detail::parse_double_field(f[1]);
        r.test_ratio = detail::parse_double_field(f[2]);
        r.split_mode = parse_split_mode(f[3]);
        r.predictor = parse_predictor(f[4]);
        if (!f[5].empty()) {
            MetricReport m;
            m.counts = {detail::parse_count_field(f[5]), detail::parse_count_field(f[6]),
                        detail::parse_count_field(f[7]), detail::parse_count_field(f[8])};
            m.f1 = detail::parse_double_field(f[9]);
            m.recall = detail::parse_double_field(f[10]);
            m.precision = detail::parse_double_field(f[11]);
            m.mcc = detail::parse_double_field(f[12]);
            m.accuracy = detail::parse_double_field(f[13]);
            r.report = m;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace corrlens
