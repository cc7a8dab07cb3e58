#include "plad/csv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace plad::csv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::vector<double>> parse_row(std::string_view line) {
  std::vector<double> row;
  while (true) {
    const auto comma = line.find(',');
    std::string_view field = trim(line.substr(0, comma));
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      return std::nullopt;
    }
    row.push_back(value);
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return row;
}

}  // namespace

Matrix parse_matrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    auto row = parse_row(line);
    if (!row) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw DomainError("csv: non-numeric field on line " + std::to_string(line_no));
    }
    if (!rows.empty() && row->size() != rows.front().size()) {
      throw DimensionMismatch("csv: ragged row on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(*row));
  }
  if (rows.empty()) throw DomainError("csv: no data rows");

  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return out;
}

Matrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix(buffer.str());
}

Vector read_vector(const std::filesystem::path& path) {
  Matrix m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw DimensionMismatch("expected a single column in " + path.string());
}

}  // namespace plad::csv
