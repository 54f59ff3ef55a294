#pragma once

// File-based protocol that lets an external process act as a predictor.
//
// The run directory receives train.jsonl ({"text", "label"}) and test.jsonl
// ({"text"}); the command is launched there with the arguments
//   train.jsonl test.jsonl predictions.jsonl <epochs> <batch_size>
// and must write one {"score": x} line per test row, in order, then exit 0.
// POSIX only.

#include <chrono>
#include <csignal>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "corrlens/error.hpp"
#include "corrlens/ingest.hpp"
#include "corrlens/predict.hpp"

namespace corrlens {

struct AdapterConfig {
    std::string command;                  // shell command line
    std::filesystem::path work_dir = ".";  // run directories are created below it
    std::chrono::milliseconds timeout{std::chrono::minutes(30)};
    std::size_t epochs = 5;
    std::size_t batch_size = 100;
    std::string separator{kDefaultSeparator};
};

inline constexpr const char* kAdapterTrainFile = "train.jsonl";
inline constexpr const char* kAdapterTestFile = "test.jsonl";
inline constexpr const char* kAdapterPredictionsFile = "predictions.jsonl";

inline void write_adapter_inputs(const std::filesystem::path& dir, std::span<const LabeledText> train,
                                 std::span<const std::string> test) {
    std::ofstream tr(dir / kAdapterTrainFile, std::ios::binary);
    std::ofstream te(dir / kAdapterTestFile, std::ios::binary);
    if (!tr || !te) throw AdapterError("cannot write adapter inputs in " + dir.string());
    for (const auto& s : train)
        tr << nlohmann::json{{"text", s.text}, {"label", s.label ? 1 : 0}}.dump() << '\n';
    for (const auto& t : test) te << nlohmann::json{{"text", t}}.dump() << '\n';
}

inline std::vector<double> read_adapter_scores(const std::filesystem::path& file) {
    std::vector<double> scores;
    try {
        for_each_jsonl(file, [&](const nlohmann::json& j) {
            const double s = j.at("score").get<double>();
            if (!(s >= 0.0 && s <= 1.0)) throw AdapterError("score outside [0, 1]: " + j.dump());
            scores.push_back(s);
        });
    } catch (const DataError& e) {
        throw AdapterError(std::string("malformed predictions: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw AdapterError(std::string("malformed predictions: ") + e.what());
    }
    return scores;
}

namespace detail {

inline std::filesystem::path make_run_directory(const std::filesystem::path& parent) {
    std::filesystem::create_directories(parent);
    std::string templ = (parent / "adapter-run-XXXXXX").string();
    if (!mkdtemp(templ.data())) throw AdapterError("cannot create run directory under " + parent.string());
    return std::filesystem::absolute(templ);
}

inline std::string tail_of(const std::filesystem::path& file, std::size_t max_bytes = 4096) {
    std::error_code ec;
    if (!std::filesystem::exists(file, ec)) return {};
    std::string all = read_file(file);
    return all.size() > max_bytes ? all.substr(all.size() - max_bytes) : all;
}

// Runs `command` through /bin/sh in `dir` with stdout/stderr captured to
// files there. Returns the exit status; throws on timeout.
inline int run_in_directory(const std::string& command, const std::filesystem::path& dir,
                            std::chrono::milliseconds timeout) {
    const std::string out_path = (dir / "adapter.stdout").string();
    const std::string err_path = (dir / "adapter.stderr").string();
    const std::string dir_str = dir.string();
    const pid_t pid = fork();
    if (pid < 0) throw AdapterError("fork failed");
    if (pid == 0) {
        if (chdir(dir_str.c_str()) != 0) _exit(126);
        const int out = open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        const int err = open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (out >= 0) dup2(out, STDOUT_FILENO);
        if (err >= 0) dup2(err, STDERR_FILENO);
        setpgid(0, 0);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    int status = 0;
    auto delay = std::chrono::milliseconds(1);
    while (true) {
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw AdapterError("waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            throw AdapterError("adapter timed out after " + std::to_string(timeout.count()) + " ms",
                               tail_of(err_path));
        }
        std::this_thread::sleep_for(delay);
        delay = std::min(delay * 2, std::chrono::milliseconds(50));
    }
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace detail

// Trains and predicts through the external command in a fresh run directory.
inline std::vector<Prediction> adapter_train_predict(const AdapterConfig& cfg,
                                                     std::span<const LabeledText> train,
                                                     std::span<const std::string> test) {
    if (cfg.command.empty()) throw ArgumentError("adapter: no command configured");
    if (cfg.timeout.count() <= 0) throw ArgumentError("adapter: timeout must be positive");
    const auto dir = detail::make_run_directory(cfg.work_dir);
    write_adapter_inputs(dir, train, test);

    const std::string command = cfg.command + " " + kAdapterTrainFile + " " + kAdapterTestFile + " " +
                                kAdapterPredictionsFile + " " + std::to_string(cfg.epochs) + " " +
                                std::to_string(cfg.batch_size);
    const int code = detail::run_in_directory(command, dir, cfg.timeout);
    const auto stderr_tail = detail::tail_of(dir / "adapter.stderr");
    if (code != 0)
        throw AdapterError("adapter exited with status " + std::to_string(code) + " (run dir " +
                               dir.string() + ")",
                           stderr_tail);
    if (!std::filesystem::exists(dir / kAdapterPredictionsFile))
        throw AdapterError("adapter wrote no " + std::string(kAdapterPredictionsFile), stderr_tail);

    const auto scores = read_adapter_scores(dir / kAdapterPredictionsFile);
    if (scores.size() != test.size())
        throw AdapterError("adapter row-count mismatch: expected " + std::to_string(test.size()) +
                               " predictions, got " + std::to_string(scores.size()),
                           stderr_tail);
    std::vector<Prediction> out;
    out.reserve(scores.size());
    for (double s : scores) out.push_back(Prediction::from_score(s));
    return out;
}

}  // namespace corrlens
