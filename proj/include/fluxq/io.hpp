#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace fluxq {

struct CsvTable {
    std::vector<std::string> comments;  // written as "# ..." lines ahead of the header
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double v);
void write_csv(const std::string& path, const CsvTable& table);
// Numeric columns of a CSV with a header row; '#' lines skipped.
CsvTable read_csv(const std::string& path);

struct RunManifest {
    std::string command;
    std::string config_path;
    nlohmann::json sweep;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::string timestamp;  // UTC ISO-8601; SOURCE_DATE_EPOCH honoured
};

std::string utc_timestamp();
void write_manifest(const std::string& dir, const RunManifest& m);
void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace fluxq
