#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace depsel::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
  /// 1-based physical line on which each data row starts.
  std::vector<std::size_t> row_lines;

  /// Index of a header column; throws ConfigError naming it when absent.
  std::size_t column(const std::string& name) const;
};

/// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
/// quoted fields may span lines, CRLF or LF endings, optional UTF-8 BOM.
Table parse(std::istream& in);
Table read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(const std::string& field);
std::string format_row(const Row& row);

}  // namespace depsel::csv
