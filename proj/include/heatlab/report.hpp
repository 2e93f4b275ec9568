#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatlab/errors.hpp"
#include "heatlab/format.hpp"

namespace heatlab {

inline constexpr std::string_view kVersion = "0.1.0";

/// Run-level record emitted as summary.json next to the per-check CSVs.
/// CSV files are byte-stable for a fixed config and seed; the summary also
/// carries wall-clock timings, which are not.
struct RunReport {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> outputs;
    std::vector<std::pair<std::string, double>> timings_ms;
    std::vector<std::pair<std::string, bool>> checks;

    bool all_checks_pass() const {
        for (const auto& [name, ok] : checks)
            if (!ok) return false;
        return true;
    }
};

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            raise(ErrorKind::io_error,
                  "cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io_error, "cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) raise(ErrorKind::io_error, "write failed for " + path.string());
}

/// Write one CSV file; every row must match the header arity.
inline std::string write_csv(const std::filesystem::path& dir, const std::string& name,
                             const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
    std::string body;
    for (std::size_t i = 0; i < header.size(); ++i)
        body += (i ? "," : "") + header[i];
    body += "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            raise(ErrorKind::io_error, "csv row arity mismatch in " + name);
        for (std::size_t i = 0; i < row.size(); ++i)
            body += (i ? "," : "") + row[i];
        body += "\n";
    }
    std::filesystem::path path = dir / name;
    write_text_file(path, body);
    return path.string();
}

inline std::string emit_report(const RunReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) raise(ErrorKind::io_error, "cannot create " + dir.string() + ": " + ec.message());

    nlohmann::json j;
    j["command"] = report.command;
    j["version"] = std::string(kVersion);
    j["config"] = report.config;
    j["results"] = report.results;
    j["outputs"] = report.outputs;
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& [name, ms] : report.timings_ms) timings[name] = ms;
    j["timings_ms"] = timings;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& [name, ok] : report.checks)
        checks.push_back({{"name", name}, {"pass", ok}});
    j["checks"] = checks;
    j["all_checks_pass"] = report.all_checks_pass();

    std::filesystem::path path = dir / "summary.json";
    write_text_file(path, j.dump(2) + "\n");
    return path.string();
}

} // namespace heatlab
