#include "pmono/cli/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "pmono/errors.hpp"

namespace pmono::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
  for (const auto& h : header) cell(csv_field(h));
  end_row();
}

void CsvWriter::cell(const std::string& text) {
  if (filled_ > 0) out_ << ',';
  out_ << text;
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double x) {
  cell(format_double(x));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view text) {
  cell(csv_field(text));
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) {
    std::ostringstream msg;
    msg << "csv: row has " << filled_ << " cells, header has " << columns_;
    throw DomainError(msg.str());
  }
  out_ << '\n';
  filled_ = 0;
}

void CsvWriter::row(std::initializer_list<double> values) {
  for (double v : values) *this << v;
  end_row();
}

}  // namespace pmono::cli
