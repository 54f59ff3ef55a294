#pragma once

// CSV discovery, parsing, column type inference and column-pair enumeration.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "corrlens/error.hpp"
#include "corrlens/naming.hpp"
#include "corrlens/random.hpp"

namespace corrlens {

inline constexpr std::uint64_t kDefaultMaxBytes = 1'048'576;
inline constexpr std::size_t kDefaultPairCap = 100;

struct DatasetDescriptor {
    std::string id;
    std::filesystem::path path;
    std::uint64_t byte_size = 0;
    std::size_t row_count = 0;
    // Column profile recorded at ingest; feeds corpus statistics.
    std::size_t column_count = 0;
    std::size_t distinct_sum = 0;
    // Pair enumeration settings chosen at ingest time.
    std::size_t pair_cap = kDefaultPairCap;
    std::uint64_t pair_seed = 0;

    friend bool operator==(const DatasetDescriptor&, const DatasetDescriptor&) = default;
};

enum class ColumnType { numeric, categorical };

inline std::string_view to_string(ColumnType t) noexcept {
    return t == ColumnType::numeric ? "numeric" : "categorical";
}

struct ColumnData {
    std::string name;
    std::vector<std::optional<std::string>> values;
    ColumnType inferred_type = ColumnType::categorical;
    std::size_t distinct_count = 0;
};

struct ColumnPair {
    std::string dataset_id;
    std::string name_a;
    std::string name_b;
    bool both_numeric = false;

    friend bool operator==(const ColumnPair&, const ColumnPair&) = default;
};

struct CsvOptions {
    char delimiter = ',';
    // Matched case-insensitively after trimming; empty fields are always missing.
    std::vector<std::string> missing_sentinels{"NA", "NaN", "null"};
};

// ---------------------------------------------------------------------------
// Text helpers

inline std::string_view trim(std::string_view s) noexcept {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

// Replaces every invalid UTF-8 sequence with U+FFFD.
inline std::string sanitize_utf8(std::string_view in) {
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const auto c = static_cast<unsigned char>(in[i]);
        std::size_t len = 0;
        std::uint32_t min_cp = 0;
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            min_cp = 0x80;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            min_cp = 0x800;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            min_cp = 0x10000;
        }
        bool ok = len != 0 && i + len <= in.size();
        std::uint32_t cp = ok ? (c & (0xFF >> (len + 1))) : 0;
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto cc = static_cast<unsigned char>(in[i + k]);
            if ((cc & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        ok = ok && cp >= min_cp && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
        if (ok) {
            out.append(in.substr(i, len));
            i += len;
        } else {
            out.append(kReplacement);
            ++i;
        }
    }
    return out;
}

// Locale-free decimal parse: optional sign, digits, fraction, exponent;
// surrounding whitespace allowed; non-finite results rejected.
inline std::optional<double> parse_number(std::string_view raw) noexcept {
    std::string_view s = trim(raw);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    // from_chars also accepts "inf"/"nan"; require a digit or '.' up front.
    const std::size_t lead = (s.front() == '-') ? 1 : 0;
    if (lead >= s.size()) return std::nullopt;
    const char first = s[lead];
    if (!((first >= '0' && first <= '9') || first == '.')) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

inline ColumnType infer_column_type(const std::vector<std::optional<std::string>>& values) {
    bool any = false;
    for (const auto& v : values) {
        if (!v) continue;
        any = true;
        if (!parse_number(*v)) return ColumnType::categorical;
    }
    return any ? ColumnType::numeric : ColumnType::categorical;
}

// ---------------------------------------------------------------------------
// CSV parsing

namespace detail {

inline bool is_missing(std::string_view field, const CsvOptions& options) {
    const auto t = trim(field);
    if (t.empty()) return true;
    const auto lower = ascii_lower(t);
    for (const auto& s : options.missing_sentinels)
        if (lower == ascii_lower(s)) return true;
    return false;
}

// RFC 4180 record splitter. Quoted fields may contain delimiters, doubled
// quotes and line breaks. Records that are entirely blank are skipped.
inline std::vector<std::vector<std::string>> split_records(std::string_view text, char delim) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool field_started = false;  // anything (including quotes) seen in this field
    bool in_quotes = false;
    bool after_quote = false;  // closing quote seen; only delimiter/EOL may follow
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        after_quote = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = record.size() == 1 && record.front().empty();
        if (!blank) records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == delim) {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            ++line;
        } else if (after_quote) {
            throw DataError("unexpected character after closing quote on line " +
                            std::to_string(line));
        } else if (c == '"') {
            if (field_started)
                throw DataError("stray quote inside unquoted field on line " +
                                std::to_string(line));
            in_quotes = true;
            field_started = true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw DataError("unterminated quoted field starting before line " +
                                   std::to_string(line));
    if (field_started || !record.empty()) end_record();
    return records;
}

}  // namespace detail

// Parses CSV text into columns. Header names are made unique by suffixing
// repeats with "__<ordinal>"; short rows are padded with missing values.
inline std::vector<ColumnData> parse_csv_text(std::string_view raw, const CsvOptions& options = {}) {
    const std::string text = sanitize_utf8(raw);
    std::string_view body = text;
    if (body.starts_with("\xEF\xBB\xBF")) body.remove_prefix(3);
    auto records = detail::split_records(body, options.delimiter);
    if (records.empty()) throw DataError("CSV has no header row");

    const auto& header = records.front();
    const std::size_t width = header.size();
    std::vector<ColumnData> columns(width);
    std::set<std::string> seen;
    std::vector<std::string> raw_names(header.begin(), header.end());
    for (std::size_t c = 0; c < width; ++c) {
        std::string name = raw_names[c];
        if (seen.contains(name)) {
            for (std::size_t ordinal = 2;; ++ordinal) {
                std::string candidate = raw_names[c] + "__" + std::to_string(ordinal);
                if (!seen.contains(candidate) &&
                    std::find(raw_names.begin(), raw_names.end(), candidate) == raw_names.end()) {
                    name = std::move(candidate);
                    break;
                }
            }
        }
        seen.insert(name);
        columns[c].name = std::move(name);
        columns[c].values.reserve(records.size() - 1);
    }

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& row = records[r];
        if (row.size() > width)
            throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                            " fields, header has " + std::to_string(width));
        for (std::size_t c = 0; c < width; ++c) {
            if (c < row.size() && !detail::is_missing(row[c], options))
                columns[c].values.emplace_back(row[c]);
            else
                columns[c].values.emplace_back(std::nullopt);
        }
    }

    for (auto& col : columns) {
        col.inferred_type = infer_column_type(col.values);
        std::unordered_set<std::string_view> distinct;
        for (const auto& v : col.values)
            if (v) distinct.insert(*v);
        col.distinct_count = distinct.size();
    }
    return columns;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<ColumnData> parse_csv(const std::filesystem::path& path,
                                         const CsvOptions& options = {}) {
    if (!std::filesystem::exists(path)) throw DataError("no such file: " + path.string());
    try {
        return parse_csv_text(read_file(path), options);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Pair enumeration

// All unordered column pairs in canonical (lexicographic) order. When there
// are more than `cap`, a seeded uniform subset of size `cap` is kept.
inline std::vector<ColumnPair> enumerate_pairs(const std::vector<ColumnData>& columns,
                                               const std::string& dataset_id,
                                               std::size_t cap = kDefaultPairCap,
                                               std::uint64_t seed = 0) {
    if (cap < 1) throw ArgumentError("enumerate_pairs: cap must be at least 1");
    std::vector<ColumnPair> pairs;
    if (columns.size() < 2) return pairs;
    pairs.reserve(columns.size() * (columns.size() - 1) / 2);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t j = i + 1; j < columns.size(); ++j) {
            const auto& a = columns[i];
            const auto& b = columns[j];
            const bool swap = b.name < a.name;
            pairs.push_back(ColumnPair{
                dataset_id, swap ? b.name : a.name, swap ? a.name : b.name,
                a.inferred_type == ColumnType::numeric && b.inferred_type == ColumnType::numeric});
        }
    }
    auto canonical = [](const ColumnPair& l, const ColumnPair& r) {
        return std::tie(l.name_a, l.name_b) < std::tie(r.name_a, r.name_b);
    };
    std::sort(pairs.begin(), pairs.end(), canonical);
    if (pairs.size() > cap) {
        Rng rng(seed);
        shuffle(std::span(pairs), rng);
        pairs.resize(cap);
        std::sort(pairs.begin(), pairs.end(), canonical);
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Catalog

struct IngestOptions {
    std::uint64_t max_bytes = kDefaultMaxBytes;
    std::size_t pair_cap = kDefaultPairCap;
    std::uint64_t pair_seed = 0;
    CsvOptions csv;
};

// Builds a descriptor for one admitted file. Parse failures leave the
// profile fields at zero; the dataset is excluded later at corpus build.
inline DatasetDescriptor describe_dataset(std::string id, const std::filesystem::path& path,
                                          const CsvOptions& csv = {}) {
    DatasetDescriptor d;
    d.id = std::move(id);
    d.path = path;
    d.byte_size = std::filesystem::file_size(path);
    try {
        const auto cols = parse_csv(path, csv);
        d.column_count = cols.size();
        d.row_count = cols.empty() ? 0 : cols.front().values.size();
        for (const auto& c : cols) d.distinct_sum += c.distinct_count;
    } catch (const DataError& e) {
        std::clog << "warning: " << e.what() << '\n';
    }
    return d;
}

// Walks `root` for *.csv files (case-insensitive extension) and returns
// descriptors sorted by id. Files above the byte cap are skipped with a log line.
inline std::vector<DatasetDescriptor> scan_directory(const std::filesystem::path& root,
                                                     const IngestOptions& options = {},
                                                     std::ostream* log = &std::clog) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw DataError("not a directory: " + root.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        if (ascii_lower(entry.path().extension().string()) != ".csv") continue;
        files.push_back(entry.path());
    }
    std::vector<DatasetDescriptor> out;
    for (const auto& file : files) {
        const auto size = fs::file_size(file);
        const std::string id = fs::relative(file, root).generic_string();
        if (size > options.max_bytes) {
            if (log) *log << "skip " << id << ": " << size << " bytes exceeds cap " << options.max_bytes << '\n';
            continue;
        }
        auto d = describe_dataset(id, file, options.csv);
        d.pair_cap = options.pair_cap;
        d.pair_seed = options.pair_seed;
        out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& l, const auto& r) { return l.id < r.id; });
    return out;
}

inline nlohmann::json to_json(const DatasetDescriptor& d) {
    return nlohmann::json{{"id", d.id},
                          {"path", d.path.generic_string()},
                          {"byte_size", d.byte_size},
                          {"row_count", d.row_count},
                          {"column_count", d.column_count},
                          {"distinct_sum", d.distinct_sum},
                          {"pair_cap", d.pair_cap},
                          {"pair_seed", d.pair_seed}};
}

inline DatasetDescriptor descriptor_from_json(const nlohmann::json& j) {
    try {
        DatasetDescriptor d;
        d.id = j.at("id").get<std::string>();
        d.path = j.at("path").get<std::string>();
        d.byte_size = j.at("byte_size").get<std::uint64_t>();
        d.row_count = j.at("row_count").get<std::size_t>();
        d.column_count = j.value("column_count", std::size_t{0});
        d.distinct_sum = j.value("distinct_sum", std::size_t{0});
        d.pair_cap = j.value("pair_cap", kDefaultPairCap);
        d.pair_seed = j.value("pair_seed", std::uint64_t{0});
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad catalog entry: ") + e.what());
    }
}

// Reads a JSON-lines file, skipping blank lines; parse errors name the line.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
        fn(j);
    }
}

inline void write_catalog(std::ostream& out, const std::vector<DatasetDescriptor>& catalog) {
    for (const auto& d : catalog) out << to_json(d).dump() << '\n';
}

inline std::vector<DatasetDescriptor> read_catalog(const std::filesystem::path& path) {
    std::vector<DatasetDescriptor> out;
    for_each_jsonl(path, [&](const nlohmann::json& j) { out.push_back(descriptor_from_json(j)); });
    return out;
}

}  // namespace corrlens
