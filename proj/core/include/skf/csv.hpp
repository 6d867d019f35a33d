#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace skf::csv {

struct Row {
  std::size_t line_no = 0;  // 1-based line in the source file
  std::vector<std::string> fields;
};

// Reads a comma-separated file whose first line must equal `header`
// exactly. Blank lines are skipped; fields are whitespace-trimmed.
// Throws DataError naming the file (and line) on any violation.
std::vector<Row> read(const std::filesystem::path& file, const std::string& header);

// Headerless variant: every non-blank line becomes a row, the first included.
std::vector<Row> read(const std::filesystem::path& file);

double parse_double(const Row& row, std::size_t idx, const std::filesystem::path& file);
int parse_int(const Row& row, std::size_t idx, const std::filesystem::path& file);
// 5-digit zero-padded county code.
std::string parse_fips(const Row& row, std::size_t idx, const std::filesystem::path& file);

// Bare-string forms; errors omit file context.
double parse_double(const std::string& s);
int parse_int(const std::string& s);
std::string parse_fips(const std::string& s);

// Shortest round-trip decimal form (std::to_chars); deterministic.
std::string format_double(double v);

void write_lines(const std::filesystem::path& file, const std::vector<std::string>& lines);

}  // namespace skf::csv
