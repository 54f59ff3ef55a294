#include "grid_config.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace corrlens;
using corrlens::tools::parse_grid;

namespace {
tools::GridFile parse(const std::string& text) {
    std::istringstream in(text);
    return parse_grid(in);
}
}  // namespace

TEST(GridFile, EmptyKeepsDefaults) {
    const auto g = parse("");
    EXPECT_EQ(g.grid.cell_count(), 8u);
    EXPECT_FALSE(g.seed);
}

TEST(GridFile, AllKeys) {
    const auto g = parse(R"(# experiment grid
metrics = ["pearson", "theils_u"]
coef_thresholds = [0.5, 0.7]
test_ratios = [0.1]
split_modes = ["by_pair", "dataset"]
predictors = ["baseline", "builtin", "adapter"]
p_threshold = "none"
breakdowns = ["char_len"]
seed = 42
epochs = 3
batch = 8
learning_rate = 0.5
l2 = 0.001
adapter_cmd = "python3 adapter.py"
adapter_timeout_s = 60
)");
    EXPECT_EQ(g.grid.metrics, (std::vector<Metric>{Metric::pearson, Metric::theils_u}));
    EXPECT_EQ(g.grid.coef_thresholds, (std::vector<double>{0.5, 0.7}));
    EXPECT_EQ(g.grid.test_ratios, (std::vector<double>{0.1}));
    EXPECT_EQ(g.grid.split_modes, (std::vector<SplitMode>{SplitMode::by_pair, SplitMode::by_dataset}));
    EXPECT_EQ(g.grid.predictors.size(), 3u);
    EXPECT_FALSE(g.grid.p_threshold);
    EXPECT_EQ(*g.breakdowns, (std::vector<Feature>{Feature::char_len}));
    EXPECT_EQ(*g.seed, 42u);
    EXPECT_EQ(*g.epochs, 3u);
    EXPECT_EQ(*g.batch, 8u);
    EXPECT_EQ(*g.learning_rate, 0.5);
    EXPECT_EQ(*g.l2, 0.001);
    EXPECT_EQ(*g.adapter_cmd, "python3 adapter.py");
    EXPECT_EQ(*g.adapter_timeout_s, 60.0);
    EXPECT_EQ(g.grid.cell_count(), 2u * 2u * 1u * 2u * 3u);
}

TEST(GridFile, Rejections) {
    EXPECT_THROW(parse("colour = 3\n"), DataError);
    EXPECT_THROW(parse("metrics = [\"kendall\"]\n"), DataError);
    EXPECT_THROW(parse("coef_thresholds = [1.5]\n"), DataError);
    EXPECT_THROW(parse("test_ratios = [0]\n"), DataError);
    EXPECT_THROW(parse("seed = -1\n"), DataError);
    EXPECT_THROW(parse("epochs = many\n"), DataError);
    EXPECT_THROW(parse("seed = [1, 2]\n"), DataError);
}
