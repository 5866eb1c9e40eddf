#include "csv.hpp"

#include <stdexcept>

namespace swcli {

CsvWriter::CsvWriter(const std::string& path, const std::string& subcommand,
                     const nlohmann::ordered_json& params, std::vector<std::string> columns)
    : out_(path), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    out_ << "# scatterwork " << params.value("version", "0.1.0") << "\n";
    out_ << "# subcommand: " << subcommand << "\n";
    out_ << "# params: " << params.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << (i == 0 ? "" : ",") << columns[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_)
        throw std::runtime_error("csv row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << (i == 0 ? "" : ",") << cells[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (double v : cells) text.push_back(format_double(v));
    row(text);
}

void CsvWriter::close() { out_.close(); }

void write_json_file(const std::string& path, const nlohmann::ordered_json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace swcli
