#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace fairaudit {

// Delimiter-separated text with a header row. Quoted fields ("" escapes a
// quote, embedded delimiters and newlines allowed) so real-world exports parse.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row

  // Index of a header column, or -1.
  int column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, char delimiter = ',');
CsvTable read_csv(const std::filesystem::path& path, char delimiter = ',');

}  // namespace fairaudit
