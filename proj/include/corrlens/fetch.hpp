#pragma once

// Dataset acquisition from a manifest of URLs and local paths.
// Requires linking libcurl (CURL::libcurl).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <curl/curl.h>
#include <nlohmann/json.hpp>

#include "corrlens/error.hpp"
#include "corrlens/ingest.hpp"

namespace corrlens {

enum class FetchStatus { admitted, skipped, failed };

inline std::string_view to_string(FetchStatus s) noexcept {
    switch (s) {
        case FetchStatus::admitted: return "admitted";
        case FetchStatus::skipped: return "skipped";
        case FetchStatus::failed: return "failed";
    }
    return "?";
}

struct FetchRecord {
    std::string source;
    FetchStatus status = FetchStatus::failed;
    std::string reason;
    std::string dataset_id;  // set when admitted
};

struct FetchResult {
    std::vector<DatasetDescriptor> datasets;
    std::vector<FetchRecord> report;
};

struct FetchOptions {
    std::uint64_t max_bytes = kDefaultMaxBytes;
    long timeout_seconds = 60;
    CsvOptions csv;
};

inline nlohmann::json to_json(const FetchRecord& r) {
    nlohmann::json j{{"source", r.source}, {"status", to_string(r.status)}, {"reason", r.reason}};
    if (!r.dataset_id.empty()) j["dataset_id"] = r.dataset_id;
    return j;
}

// Manifest entries: one URL or path per line; '#' starts a comment.
inline std::vector<std::string> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read manifest " + path.string());
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = trim(line);
        if (!t.empty()) entries.emplace_back(t);
    }
    return entries;
}

namespace detail {

inline bool is_remote(std::string_view entry) {
    return entry.starts_with("http://") || entry.starts_with("https://") ||
           entry.starts_with("ftp://");
}

struct DownloadSink {
    std::ofstream* out;
    std::uint64_t written = 0;
    std::uint64_t limit = 0;
    bool over_limit = false;
};

inline std::size_t write_capped(char* data, std::size_t size, std::size_t nmemb, void* user) {
    auto* sink = static_cast<DownloadSink*>(user);
    const std::size_t bytes = size * nmemb;
    sink->written += bytes;
    if (sink->written > sink->limit) {
        sink->over_limit = true;
        return 0;  // aborts the transfer
    }
    sink->out->write(data, static_cast<std::streamsize>(bytes));
    return bytes;
}

inline std::string file_name_for(std::string_view entry) {
    std::string_view s = entry;
    if (const auto q = s.find_first_of("?#"); q != std::string_view::npos) s = s.substr(0, q);
    while (!s.empty() && s.back() == '/') s.remove_suffix(1);
    std::string name(s.substr(s.find_last_of('/') == std::string_view::npos ? 0 : s.find_last_of('/') + 1));
    if (name.empty()) name = "download";
    if (ascii_lower(std::filesystem::path(name).extension().string()) != ".csv") name += ".csv";
    return name;
}

inline std::filesystem::path unique_destination(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::path candidate = dir / name;
    const auto stem = std::filesystem::path(name).stem().string();
    const auto ext = std::filesystem::path(name).extension().string();
    for (int i = 2; std::filesystem::exists(candidate); ++i)
        candidate = dir / (stem + "__" + std::to_string(i) + ext);
    return candidate;
}

}  // namespace detail

// Copies or downloads every manifest entry into `dest_dir`. Oversized entries
// are skipped and unreachable ones recorded as failures; only an unusable
// destination directory aborts the run.
inline FetchResult fetch_manifest(const std::filesystem::path& manifest_path,
                                  const std::filesystem::path& dest_dir,
                                  const FetchOptions& options = {}) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dest_dir, ec);
    if (ec || !fs::is_directory(dest_dir))
        throw Error("destination directory is not usable: " + dest_dir.string());
    {
        const auto probe = dest_dir / ".corrlens-write-probe";
        std::ofstream test(probe);
        if (!test) throw Error("destination directory is not writable: " + dest_dir.string());
        test.close();
        fs::remove(probe, ec);
    }

    const auto entries = read_manifest(manifest_path);
    const auto base = manifest_path.parent_path();
    FetchResult result;

    for (const auto& entry : entries) {
        FetchRecord rec{entry, FetchStatus::failed, {}, {}};
        const auto target = detail::unique_destination(dest_dir, detail::file_name_for(entry));

        if (detail::is_remote(entry)) {
            CURL* curl = curl_easy_init();
            if (!curl) {
                rec.reason = "curl initialisation failed";
                result.report.push_back(rec);
                continue;
            }
            std::ofstream out(target, std::ios::binary);
            detail::DownloadSink sink{&out, 0, options.max_bytes, false};
            curl_easy_setopt(curl, CURLOPT_URL, entry.c_str());
            curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
            curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
            curl_easy_setopt(curl, CURLOPT_TIMEOUT, options.timeout_seconds);
            curl_easy_setopt(curl, CURLOPT_NOSIGNAL, 1L);
            curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, &detail::write_capped);
            curl_easy_setopt(curl, CURLOPT_WRITEDATA, &sink);
            const CURLcode code = curl_easy_perform(curl);
            curl_easy_cleanup(curl);
            out.close();
            if (sink.over_limit) {
                fs::remove(target, ec);
                rec.status = FetchStatus::skipped;
                rec.reason = "exceeds byte cap " + std::to_string(options.max_bytes);
                result.report.push_back(rec);
                continue;
            }
            if (code != CURLE_OK) {
                fs::remove(target, ec);
                rec.reason = curl_easy_strerror(code);
                result.report.push_back(rec);
                continue;
            }
        } else {
            fs::path source = entry.starts_with("file://") ? fs::path(entry.substr(7)) : fs::path(entry);
            if (source.is_relative()) source = base / source;
            if (!fs::is_regular_file(source)) {
                rec.reason = "no such file";
                result.report.push_back(rec);
                continue;
            }
            if (fs::file_size(source) > options.max_bytes) {
                rec.status = FetchStatus::skipped;
                rec.reason = "exceeds byte cap " + std::to_string(options.max_bytes);
                result.report.push_back(rec);
                continue;
            }
            fs::copy_file(source, target, fs::copy_options::overwrite_existing, ec);
            if (ec) {
                rec.reason = "copy failed: " + ec.message();
                result.report.push_back(rec);
                continue;
            }
        }

        const std::string id = target.filename().generic_string();
        result.datasets.push_back(describe_dataset(id, target, options.csv));
        rec.status = FetchStatus::admitted;
        rec.dataset_id = id;
        result.report.push_back(rec);
    }
    return result;
}

}  // namespace corrlens
