#include "depsel/csv.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "depsel/error.hpp"

namespace depsel::csv {

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ConfigError("missing column '" + name + "' in CSV header");
}

Table parse(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  if (data.compare(0, 3, "\xEF\xBB\xBF") == 0) pos = 3;

  Table table;
  std::vector<Row> records;
  std::vector<std::size_t> lines;
  Row row;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes "" (empty row) from a row with one empty field

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    if (field_started || !row.empty()) {
      end_field();
      records.push_back(std::move(row));
      lines.push_back(record_line);
    }
    row.clear();
    field_started = false;
  };

  const std::size_t n = data.size();
  while (pos < n) {
    char c = data[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < n && data[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        in_quotes = false;
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      ++pos;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty())
          throw InputError("CSV line " + std::to_string(line) + ": quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        field_started = true;
        end_field();
        break;
      case '\r':
        if (pos + 1 < n && data[pos + 1] == '\n') ++pos;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field_started = true;
        field.push_back(c);
    }
    ++pos;
  }
  if (in_quotes) throw InputError("CSV: unterminated quoted field starting on line " +
                                  std::to_string(record_line));
  end_record();

  if (records.empty()) throw InputError("CSV: missing header row");
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  table.row_lines.assign(lines.begin() + 1, lines.end());
  return table;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open CSV file '" + path.string() + "'");
  return parse(in);
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(row[i]);
  }
  return out;
}

}  // namespace depsel::csv
