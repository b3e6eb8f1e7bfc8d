#include "hdmon/csv.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace hdmon {

namespace {

bool parse_row(const std::string& line, Vec& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    std::size_t a = pos, b = comma;
    while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
    while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
    if (a == b) return false;
    double v = 0.0;
    const auto res = std::from_chars(line.data() + a, line.data() + b, v);
    if (res.ec != std::errc() || res.ptr != line.data() + b) return false;
    out.push_back(v);
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return !out.empty();
}

}  // namespace

CsvReader::CsvReader(std::istream& in) : in_(in) {}

bool CsvReader::next(Vec& row) {
  std::string line;
  while (std::getline(in_, line)) {
    // skip blank lines
    bool blank = true;
    for (char ch : line)
      if (ch != ' ' && ch != '\t' && ch != '\r') { blank = false; break; }
    if (blank) continue;
    if (!parse_row(line, row)) {
      if (first_) {
        first_ = false;
        header_skipped_ = true;
        continue;  // header line
      }
      throw std::runtime_error("csv: unparseable row " + std::to_string(rows_ + 1));
    }
    first_ = false;
    for (double v : row)
      if (!std::isfinite(v)) throw std::runtime_error("csv: non-finite entry");
    if (width_ == 0) width_ = row.size();
    if (row.size() != width_)
      throw std::runtime_error("csv: ragged row " + std::to_string(rows_ + 1) + " (" +
                               std::to_string(row.size()) + " columns, expected " +
                               std::to_string(width_) + ")");
    ++rows_;
    return true;
  }
  return false;
}

std::vector<Vec> read_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<Vec> rows;
  Vec row;
  while (reader.next(row)) rows.push_back(row);
  return rows;
}

}  // namespace hdmon
