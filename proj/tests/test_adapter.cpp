#include "corrlens/adapter.hpp"

#include <gtest/gtest.h>

#include <chrono>

#include "support/temp_dir.hpp"

using namespace corrlens;
using namespace std::chrono_literals;

namespace {

std::string script(const std::string& name) {
    return "sh " + std::string(CORRLENS_TEST_FIXTURES) + "/adapters/" + name;
}

class AdapterTest : public ::testing::Test {
protected:
    AdapterConfig config(const std::string& name) const {
        AdapterConfig cfg;
        cfg.command = script(name);
        cfg.work_dir = dir_.path() / "runs";
        cfg.timeout = 20s;
        return cfg;
    }

    std::vector<LabeledText> train_{{"a [SEP] b", true}, {"c [SEP] d", false}, {"e [SEP] f", false}};
    std::vector<std::string> test_{"g [SEP] h", "i [SEP] j", "k [SEP] l", "m [SEP] n"};
    test_support::TempDir dir_;
};

}  // namespace

TEST_F(AdapterTest, ConstantScoresEveryRow) {
    const auto preds = adapter_train_predict(config("constant.sh"), train_, test_);
    ASSERT_EQ(preds.size(), test_.size());
    for (const auto& p : preds) {
        EXPECT_EQ(p.score, 1.0);
        EXPECT_TRUE(p.label);
    }
}

TEST_F(AdapterTest, MajorityReadsTrainingLabelsAndArguments) {
    auto cfg = config("majority.sh");
    cfg.epochs = 7;
    cfg.batch_size = 9;
    const auto preds = adapter_train_predict(cfg, train_, test_);
    ASSERT_EQ(preds.size(), test_.size());
    for (const auto& p : preds) EXPECT_FALSE(p.label);

    // The run directory keeps the protocol files and captured stderr.
    std::filesystem::path run;
    for (const auto& e : std::filesystem::directory_iterator(cfg.work_dir)) run = e.path();
    EXPECT_EQ(test_support::slurp(run / "adapter.stderr"), "epochs=7 batch=9\n");
    EXPECT_EQ(test_support::slurp(run / "train.jsonl"),
              "{\"label\":1,\"text\":\"a [SEP] b\"}\n{\"label\":0,\"text\":\"c [SEP] d\"}\n"
              "{\"label\":0,\"text\":\"e [SEP] f\"}\n");
    EXPECT_EQ(test_support::slurp(run / "test.jsonl").substr(0, 22), "{\"text\":\"g [SEP] h\"}\n{");
}

TEST_F(AdapterTest, RowCountMismatchIsAnError) {
    try {
        adapter_train_predict(config("short.sh"), train_, test_);
        FAIL() << "expected AdapterError";
    } catch (const AdapterError& e) {
        EXPECT_NE(std::string(e.what()).find("row-count mismatch"), std::string::npos) << e.what();
    }
}

TEST_F(AdapterTest, NonZeroExitCarriesStderr) {
    try {
        adapter_train_predict(config("failing.sh"), train_, test_);
        FAIL() << "expected AdapterError";
    } catch (const AdapterError& e) {
        EXPECT_NE(std::string(e.what()).find("status 3"), std::string::npos) << e.what();
        EXPECT_NE(e.diagnostics().find("model exploded"), std::string::npos);
    }
}

TEST_F(AdapterTest, TimeoutKillsTheProcess) {
    auto cfg = config("sleeper.sh");
    cfg.timeout = 300ms;
    const auto start = std::chrono::steady_clock::now();
    EXPECT_THROW(adapter_train_predict(cfg, train_, test_), AdapterError);
    EXPECT_LT(std::chrono::steady_clock::now() - start, 10s);
}

TEST_F(AdapterTest, ScoresOutsideUnitIntervalRejected) {
    EXPECT_THROW(adapter_train_predict(config("out_of_range.sh"), train_, test_), AdapterError);
}

TEST_F(AdapterTest, MissingPredictionsFile) {
    auto cfg = config("constant.sh");
    cfg.command = "true";
    EXPECT_THROW(adapter_train_predict(cfg, train_, test_), AdapterError);
}

TEST_F(AdapterTest, ConfigurationErrors) {
    auto cfg = config("constant.sh");
    cfg.command.clear();
    EXPECT_THROW(adapter_train_predict(cfg, train_, test_), ArgumentError);
    cfg = config("constant.sh");
    cfg.timeout = 0ms;
    EXPECT_THROW(adapter_train_predict(cfg, train_, test_), ArgumentError);
}

TEST_F(AdapterTest, EachCallGetsItsOwnRunDirectory) {
    const auto cfg = config("constant.sh");
    adapter_train_predict(cfg, train_, test_);
    adapter_train_predict(cfg, train_, test_);
    std::size_t runs = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(cfg.work_dir)) ++runs;
    EXPECT_EQ(runs, 2u);
}
