#include "dce/csv.hpp"

#include <charconv>
#include <cmath>
#include <locale>

#include "dce/errors.hpp"

namespace dce {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  // Shortest representation that reads back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns)
    : out_(path) {
  if (!out_) throw ConfigError("cannot write " + path.string());
  out_.imbue(std::locale::classic());
  for (const auto& c : comments) out_ << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::sep() {
  if (!first_) out_ << ',';
  first_ = false;
}

CsvWriter& CsvWriter::cell(double value) {
  sep();
  out_ << format_number(value);
  return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
  sep();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& value) {
  sep();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::empty() {
  sep();
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace dce
