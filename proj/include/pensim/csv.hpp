#ifndef PENSIM_CSV_HPP
#define PENSIM_CSV_HPP

#include <string>
#include <vector>

namespace pensim {

struct CsvRow {
  long line = 0;  // 1-based line number in the source file
  std::vector<std::string> fields;
};

// Minimal comma-separated reader: no quoting, no embedded commas. All table
// schemas in this project are plain numeric/token columns.
class CsvReader {
 public:
  // Opens `path`, checks that the header matches `expected_header` exactly
  // (ParseError otherwise), and returns the data rows.
  static std::vector<CsvRow> read(const std::string& path,
                                  const std::vector<std::string>& expected_header);

  static std::vector<std::string> split(const std::string& line);
};

long parse_long(const std::string& token, const std::string& context, long line);
double parse_double(const std::string& token, const std::string& context, long line);

// Canonical decimal formatting for value columns: 12 significant digits, so
// write -> read -> write is byte-stable.
std::string format_value(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace pensim

#endif  // PENSIM_CSV_HPP
