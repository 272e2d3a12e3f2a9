#include "fluxq/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "fluxq/errors.hpp"

namespace fluxq {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    for (const auto& c : t.comments) out << "# " << c << "\n";
    for (size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << "\n";
    }
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.substr(line.find_first_not_of("# ")));
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            t.header = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end == c.c_str()) throw ValidationError("non-numeric cell in " + path + ": " + c);
            row.push_back(v);
        }
        if (row.size() != t.header.size()) throw ValidationError("ragged row in " + path);
        t.rows.push_back(row);
    }
    if (!have_header) throw ValidationError("missing header row in " + path);
    return t;
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << doc.dump(2) << "\n";
}

void write_manifest(const std::string& dir, const RunManifest& m) {
    write_json(dir + "/manifest.json", {{"command", m.command},
                                        {"config", m.config_path},
                                        {"sweep", m.sweep},
                                        {"outputs", m.outputs},
                                        {"seed", m.seed},
                                        {"timestamp", m.timestamp}});
}

}  // namespace fluxq
