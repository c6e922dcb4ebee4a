#ifndef IONTRAP_CSV_HPP
#define IONTRAP_CSV_HPP

#include <string>
#include <vector>

namespace iontrap {

// Rectangular numeric table with '#'-prefixed provenance comments.
// Serialization is locale-independent: %.17g, comma separator, LF line
// terminator, so byte-identical config yields byte-identical output.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;    // column names with unit suffixes
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> values) { rows.emplace_back(values); }
};

std::string format_number(double value);

std::string to_csv(const CsvTable& table);

void write_csv(const CsvTable& table, const std::string& path);

}  // namespace iontrap

#endif
