#pragma once

#include <istream>

#include "hdmon/common.hpp"

namespace hdmon {

// Comma-separated numeric rows, dot decimal point regardless of locale.
// A non-numeric first line is treated as a header and skipped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in);
  bool next(Vec& row);  // false at end of stream
  bool header_skipped() const { return header_skipped_; }
  long rows_read() const { return rows_; }

 private:
  std::istream& in_;
  bool header_skipped_ = false;
  bool first_ = true;
  long rows_ = 0;
  std::size_t width_ = 0;
};

std::vector<Vec> read_csv(std::istream& in);

}  // namespace hdmon
