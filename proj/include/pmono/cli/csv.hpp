#pragma once

// Comma-separated output with a fixed header row.  Numbers are written in
// the shortest decimal form that reads back to the same double.

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pmono::cli {

/// Shortest round-trip decimal for x ("nan", "inf", "-inf" for non-finite).
std::string format_double(double x);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> header);

  /// One cell of the current row.
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(std::string_view text);
  /// Ends the row; throws DomainError if the cell count differs from the header.
  void end_row();

  void row(std::initializer_list<double> values);

 private:
  void cell(const std::string& text);

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace pmono::cli
