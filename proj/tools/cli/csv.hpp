// csv.hpp — deterministic CSV tables with a parameter-echo header block.

#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace swcli {

// Shortest round-trippable decimal form; bitwise-stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& subcommand,
              const nlohmann::ordered_json& params, std::vector<std::string> columns);

    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& cells);
    void close();

private:
    std::ofstream out_;
    std::size_t n_columns_;
};

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc);

} // namespace swcli
