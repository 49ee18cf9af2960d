#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dce {

/// CSV writer: `#`-prefixed header lines, then a column header, then rows.
/// Numbers are written in their shortest round-trip form, independent of the
/// locale.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            const std::vector<std::string>& comments,
            const std::vector<std::string>& columns);

  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  CsvWriter& cell(const std::string& value);
  CsvWriter& empty();
  void end_row();

 private:
  void sep();
  std::ofstream out_;
  bool first_ = true;
};

std::string format_number(double value);

}  // namespace dce
