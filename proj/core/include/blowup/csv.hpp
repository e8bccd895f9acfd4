#pragma once

#include <initializer_list>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace blowup {

using CsvMeta = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form, always with '.' as separator.
std::string format_double(double x);

/// Writes `# key=value` comment lines, then the header row.
void write_csv_header(std::ostream& out, const std::vector<std::string>& columns,
                      const CsvMeta& meta = {});
void write_csv_row(std::ostream& out, const std::vector<double>& values);
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool has_column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace blowup
