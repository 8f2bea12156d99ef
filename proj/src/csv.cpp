#include "fairaudit/csv.hpp"

#include "fairaudit/errors.hpp"
#include "fairaudit/hash.hpp"

namespace fairaudit {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(const std::string& text, char delimiter) {
  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    if (row.empty() && field.empty()) {  // blank line
      row_started = false;
      return;
    }
    end_field();
    if (table.header.empty()) {
      table.header = std::move(row);
    } else {
      table.rows.push_back(std::move(row));
      table.row_lines.push_back(row_line);
    }
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (!row_started) {
      row_started = true;
      row_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r') {
      // swallowed; \r\n handled at \n
    } else if (c == '\n') {
      ++line;
      end_row();
    } else {
      field += c;
    }
  }
  if (in_quotes) {
    throw DataError("unterminated quoted field at end of input (line " + std::to_string(row_line) + ")");
  }
  if (row_started || !field.empty()) {
    end_row();
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, char delimiter) {
  return parse_csv(read_file(path), delimiter);
}

}  // namespace fairaudit
