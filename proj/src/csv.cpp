#include "pensim/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pensim/errors.hpp"

namespace pensim {

std::vector<std::string> CsvReader::split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<CsvRow> CsvReader::read(const std::string& path,
                                    const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected header row");
  const auto header = split(line);
  if (header != expected_header) {
    std::string want;
    for (size_t i = 0; i < expected_header.size(); ++i) {
      if (i) want += ',';
      want += expected_header[i];
    }
    throw ParseError(path + ": bad header '" + line + "', expected '" + want + "'");
  }

  std::vector<CsvRow> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    CsvRow row;
    row.line = lineno;
    row.fields = split(line);
    if (row.fields.size() != expected_header.size()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(expected_header.size()) + " fields, got " +
                       std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

long parse_long(const std::string& token, const std::string& context, long line) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (errno != 0 || end == token.c_str() || *end != '\0') {
    throw ParseError(context + ": line " + std::to_string(line) + ": invalid integer '" +
                     token + "'");
  }
  return v;
}

double parse_double(const std::string& token, const std::string& context, long line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (errno != 0 || end == token.c_str() || *end != '\0') {
    throw ParseError(context + ": line " + std::to_string(line) + ": invalid number '" +
                     token + "'");
  }
  return v;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pensim
