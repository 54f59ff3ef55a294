#include "corrlens/ingest.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "support/temp_dir.hpp"

using namespace corrlens;

namespace {

std::vector<std::optional<std::string>> vals(std::initializer_list<const char*> in) {
    std::vector<std::optional<std::string>> out;
    for (const char* s : in) out.push_back(s ? std::optional<std::string>(s) : std::nullopt);
    return out;
}

std::vector<ColumnData> make_columns(std::size_t k) {
    std::vector<ColumnData> cols(k);
    for (std::size_t i = 0; i < k; ++i) {
        cols[i].name = "col" + std::to_string(100 + i);
        cols[i].inferred_type = ColumnType::numeric;
    }
    return cols;
}

}  // namespace

TEST(ParseNumber, AcceptsDecimalForms) {
    EXPECT_EQ(parse_number("1"), 1.0);
    EXPECT_EQ(parse_number(" 2.5 "), 2.5);
    EXPECT_EQ(parse_number("-3e2"), -300.0);
    EXPECT_EQ(parse_number("+4"), 4.0);
    EXPECT_EQ(parse_number(".5"), 0.5);
    EXPECT_EQ(parse_number("1E-3"), 0.001);
}

TEST(ParseNumber, RejectsNonNumbers) {
    for (const char* s : {"", " ", "x", "1,000", "$5", "1.2.3", "inf", "-inf", "nan", "NaN", "1e999", "0x10", "12abc", "--1"})
        EXPECT_FALSE(parse_number(s).has_value()) << s;
}

TEST(InferType, Examples) {
    EXPECT_EQ(infer_column_type(vals({"1", "2.5", nullptr})), ColumnType::numeric);
    EXPECT_EQ(infer_column_type(vals({"1", "x"})), ColumnType::categorical);
    EXPECT_EQ(infer_column_type(vals({nullptr, nullptr})), ColumnType::categorical);
    EXPECT_EQ(infer_column_type(vals({})), ColumnType::categorical);
}

TEST(ParseCsv, EmptyFieldIsMissing) {
    const auto cols = parse_csv_text("a,b\n1,2\n3,\n");
    ASSERT_EQ(cols.size(), 2u);
    EXPECT_EQ(cols[0].name, "a");
    EXPECT_EQ(cols[0].values, vals({"1", "3"}));
    EXPECT_EQ(cols[1].values, vals({"2", nullptr}));
    EXPECT_EQ(cols[0].inferred_type, ColumnType::numeric);
    EXPECT_EQ(cols[1].distinct_count, 1u);
}

TEST(ParseCsv, DuplicateHeadersSuffixed) {
    const auto cols = parse_csv_text("a,a\n1,2");
    ASSERT_EQ(cols.size(), 2u);
    EXPECT_EQ(cols[0].name, "a");
    EXPECT_EQ(cols[1].name, "a__2");
    const auto three = parse_csv_text("a,a,a,a__2\n1,2,3,4");
    std::set<std::string> names;
    for (const auto& c : three) names.insert(c.name);
    EXPECT_EQ(names.size(), 4u);
}

TEST(ParseCsv, ShortRowsPaddedLongRowsRejected) {
    const auto cols = parse_csv_text("a,b,c\n1\n1,2,3\n");
    EXPECT_EQ(cols[1].values, vals({nullptr, "2"}));
    EXPECT_EQ(cols[2].values, vals({nullptr, "3"}));
    EXPECT_THROW(parse_csv_text("a,b\n1,2,3\n"), DataError);
}

TEST(ParseCsv, QuotingRules) {
    const auto cols = parse_csv_text("name,note\n\"Smith, J\",\"said \"\"hi\"\"\"\n\"multi\nline\",x\r\n");
    EXPECT_EQ(cols[0].values, vals({"Smith, J", "multi\nline"}));
    EXPECT_EQ(cols[1].values, vals({"said \"hi\"", "x"}));
    EXPECT_THROW(parse_csv_text("a,b\n\"open,2\n"), DataError);
    EXPECT_THROW(parse_csv_text("a,b\n\"x\"y,2\n"), DataError);
    EXPECT_THROW(parse_csv_text("a,b\nx\"y,2\n"), DataError);
}

TEST(ParseCsv, NoHeaderIsError) {
    EXPECT_THROW(parse_csv_text(""), DataError);
    EXPECT_THROW(parse_csv_text("\n\n"), DataError);
}

TEST(ParseCsv, SentinelsAreMissing) {
    const auto cols = parse_csv_text("a\n1\nNA\n nan \nNULL\n2\n");
    EXPECT_EQ(cols[0].values, vals({"1", nullptr, nullptr, nullptr, "2"}));
    EXPECT_EQ(cols[0].inferred_type, ColumnType::numeric);
    CsvOptions custom;
    custom.missing_sentinels = {"?"};
    const auto c2 = parse_csv_text("a\nNA\n?\n", custom);
    EXPECT_EQ(c2[0].values, vals({"NA", nullptr}));
}

TEST(ParseCsv, InvalidUtf8Replaced) {
    const auto cols = parse_csv_text("na\xffme\nx\xc3\n");
    EXPECT_EQ(cols[0].name, "na\xEF\xBF\xBDme");
    EXPECT_EQ(*cols[0].values[0], "x\xEF\xBF\xBD");
}

TEST(ParseCsv, AllColumnsSameLength) {
    const auto cols = parse_csv_text("a,b,c\n1,,\n,,\n4,5,6\n7\n");
    for (const auto& c : cols) EXPECT_EQ(c.values.size(), 4u);
}

TEST(ParseCsv, MissingFileIsDataError) {
    EXPECT_THROW(parse_csv("/nonexistent/file.csv"), DataError);
}

TEST(EnumeratePairs, AllPairsCanonical) {
    auto cols = make_columns(4);
    std::swap(cols[0].name, cols[3].name);
    const auto pairs = enumerate_pairs(cols, "d", 100, 1);
    ASSERT_EQ(pairs.size(), 6u);
    for (const auto& p : pairs) EXPECT_LT(p.name_a, p.name_b);
    EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end(), [](const auto& l, const auto& r) {
        return std::tie(l.name_a, l.name_b) < std::tie(r.name_a, r.name_b);
    }));
}

TEST(EnumeratePairs, CapWithUniqueness) {
    const auto cols = make_columns(20);
    const auto pairs = enumerate_pairs(cols, "d", 100, 42);
    ASSERT_EQ(pairs.size(), 100u);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& p : pairs) {
        EXPECT_TRUE(seen.insert({p.name_a, p.name_b}).second);
        EXPECT_FALSE(seen.contains({p.name_b, p.name_a}));
    }
    EXPECT_EQ(enumerate_pairs(cols, "d", 100, 42), pairs);
    EXPECT_NE(enumerate_pairs(cols, "d", 100, 43), pairs);
}

TEST(EnumeratePairs, CountIsMinOfCapAndChoose) {
    for (std::size_t k = 0; k < 18; ++k) {
        const auto cols = make_columns(k);
        for (std::size_t cap : {1u, 5u, 50u, 100u}) {
            const std::size_t all = k < 2 ? 0 : k * (k - 1) / 2;
            EXPECT_EQ(enumerate_pairs(cols, "d", cap, 9).size(), std::min(cap, all));
        }
    }
}

TEST(EnumeratePairs, BothNumericFlag) {
    std::vector<ColumnData> cols(2);
    cols[0].name = "x";
    cols[0].inferred_type = ColumnType::numeric;
    cols[1].name = "y";
    cols[1].inferred_type = ColumnType::categorical;
    const auto pairs = enumerate_pairs(cols, "d");
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_FALSE(pairs[0].both_numeric);
    EXPECT_THROW(enumerate_pairs(cols, "d", 0), ArgumentError);
    EXPECT_TRUE(enumerate_pairs(std::vector<ColumnData>(1), "d").empty());
}

TEST(Catalog, ScanAppliesByteCapAndSortsIds) {
    test_support::TempDir dir;
    dir.write("b/small.csv", "x,y\n1,2\n3,4\n");
    dir.write("a.CSV", "p,q,r\n1,2,3\n");
    dir.write("notes.txt", "not a csv");
    dir.write("big.csv", "a\n" + std::string(3000, '1') + "\n");
    IngestOptions opts;
    opts.max_bytes = 1000;
    std::ostringstream log;
    const auto catalog = scan_directory(dir.path(), opts, &log);
    ASSERT_EQ(catalog.size(), 2u);
    EXPECT_EQ(catalog[0].id, "a.CSV");
    EXPECT_EQ(catalog[1].id, "b/small.csv");
    EXPECT_EQ(catalog[1].row_count, 2u);
    EXPECT_EQ(catalog[1].column_count, 2u);
    EXPECT_EQ(catalog[1].distinct_sum, 4u);
    for (const auto& d : catalog) EXPECT_LE(d.byte_size, opts.max_bytes);
    EXPECT_NE(log.str().find("big.csv"), std::string::npos);
}

TEST(Catalog, JsonLinesRoundTrip) {
    test_support::TempDir dir;
    dir.write("d.csv", "x,y\n1,2\n");
    IngestOptions opts;
    opts.pair_cap = 7;
    opts.pair_seed = 99;
    const auto catalog = scan_directory(dir.path(), opts, nullptr);
    const auto file = dir.path() / "catalog.jsonl";
    {
        std::ofstream out(file);
        write_catalog(out, catalog);
    }
    EXPECT_EQ(read_catalog(file), catalog);
    EXPECT_EQ(read_catalog(file)[0].pair_cap, 7u);
}
