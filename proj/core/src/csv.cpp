#include "skf/csv.hpp"

#include "skf/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <system_error>

namespace skf::csv {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line_no, const std::string& what) {
  throw DataError(file.string() + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<Row> read(const std::filesystem::path& file, const std::string& header) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open file: " + file.string());

  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!saw_header) {
      std::string got;
      for (const auto& f : split_fields(line)) {
        if (!got.empty()) got += ',';
        got += f;
      }
      if (got != header)
        fail(file, line_no, "expected header '" + header + "', got '" + got + "'");
      saw_header = true;
      continue;
    }
    rows.push_back(Row{line_no, split_fields(line)});
  }
  if (!saw_header) throw DataError(file.string() + ": empty file, expected header '" + header + "'");
  return rows;
}

std::vector<Row> read(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open file: " + file.string());

  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    rows.push_back(Row{line_no, split_fields(line)});
  }
  return rows;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError("not a number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError("not an integer: '" + s + "'");
  return v;
}

std::string parse_fips(const std::string& s) {
  if (s.size() != 5 ||
      !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw DataError("not a 5-digit FIPS code: '" + s + "'");
  return s;
}

double parse_double(const Row& row, std::size_t idx, const std::filesystem::path& file) {
  if (idx >= row.fields.size()) fail(file, row.line_no, "missing field " + std::to_string(idx + 1));
  try {
    return parse_double(row.fields[idx]);
  } catch (const DataError& e) {
    fail(file, row.line_no, e.what());
  }
}

int parse_int(const Row& row, std::size_t idx, const std::filesystem::path& file) {
  if (idx >= row.fields.size()) fail(file, row.line_no, "missing field " + std::to_string(idx + 1));
  try {
    return parse_int(row.fields[idx]);
  } catch (const DataError& e) {
    fail(file, row.line_no, e.what());
  }
}

std::string parse_fips(const Row& row, std::size_t idx, const std::filesystem::path& file) {
  if (idx >= row.fields.size()) fail(file, row.line_no, "missing field " + std::to_string(idx + 1));
  try {
    return parse_fips(row.fields[idx]);
  } catch (const DataError& e) {
    fail(file, row.line_no, e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_lines(const std::filesystem::path& file, const std::vector<std::string>& lines) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + file.string());
  for (const auto& l : lines) {
    out << l << '\n';
  }
  if (!out) throw DataError("write failed: " + file.string());
}

}  // namespace skf::csv
