#pragma once

#include "tailtest/student_model.hpp"

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailtest::harness {

/// Malformed input; line() is 1-based.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  Sample data;                      // rows are observations
};

/// Split one record into fields. Double-quoted fields may contain commas and "" escapes.
[[nodiscard]] std::vector<std::string> split_record(const std::string& line, std::size_t line_number);

/**
 * Numeric CSV with comma separator and decimal point. The first record is a
 * header when any of its fields fails to parse as a number. Blank lines are
 * skipped; every other record must have the same field count.
 */
[[nodiscard]] CsvTable read_csv(std::istream& in);
[[nodiscard]] CsvTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const Sample& data, const std::vector<std::string>& header = {});

}  // namespace tailtest::harness
