#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace adiageo {

// Plot-ready CSV: optional "# key=value" comment lines, one header row,
// comma-separated values at 17 significant digits, LF line endings.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);

    void add_comment(const std::string& key, const std::string& value);
    void add_row(std::span<const double> values);

    std::string str() const;
    void write_file(const std::string& path) const;

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> comments_;
    std::vector<std::vector<double>> rows_;
};

std::string dump_json(const nlohmann::json& doc);
void write_text_file(const std::string& path, const std::string& contents);
nlohmann::json load_json_file(const std::string& path);

// Two-column (t, y) series from a CSV produced by this tool or any
// comma-separated file with a header row.
std::vector<std::pair<double, double>> load_series_csv(const std::string& path,
                                                       int t_column,
                                                       int y_column);

}  // namespace adiageo
