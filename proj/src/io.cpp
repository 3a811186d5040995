#include "adiageo/io.hpp"

#include <fstream>
#include <sstream>

#include "adiageo/errors.hpp"
#include "adiageo/util.hpp"

namespace adiageo {

CsvWriter::CsvWriter(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void CsvWriter::add_comment(const std::string& key, const std::string& value) {
    comments_.push_back("# " + key + "=" + value);
}

void CsvWriter::add_row(std::span<const double> values) {
    if (values.size() != columns_.size())
        throw ConfigError("row width " + std::to_string(values.size()) +
                          " does not match header width " +
                          std::to_string(columns_.size()));
    rows_.emplace_back(values.begin(), values.end());
}

std::string CsvWriter::str() const {
    std::string out;
    for (const auto& c : comments_) {
        out += c;
        out += '\n';
    }
    for (size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

void CsvWriter::write_file(const std::string& path) const {
    write_text_file(path, str());
}

std::string dump_json(const nlohmann::json& doc) {
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << contents;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return nlohmann::json::parse(in);
}

std::vector<std::pair<double, double>> load_series_csv(const std::string& path,
                                                       int t_column,
                                                       int y_column) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<std::pair<double, double>> out;
    std::string line;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_skipped) {
            header_skipped = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ','))
            cells.push_back(std::stod(cell));
        if (t_column >= static_cast<int>(cells.size()) ||
            y_column >= static_cast<int>(cells.size()))
            throw ConfigError("column index out of range in '" + path + "'");
        out.emplace_back(cells[static_cast<size_t>(t_column)],
                         cells[static_cast<size_t>(y_column)]);
    }
    return out;
}

}  // namespace adiageo
