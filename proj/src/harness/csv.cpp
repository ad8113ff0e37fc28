#include "tailtest/harness/csv.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>

namespace tailtest::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return std::nullopt;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace

std::vector<std::string> split_record(const std::string& line, std::size_t line_number) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      if (!trim(current).empty() || was_quoted) throw CsvError(line_number, "stray quote");
      current.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(current);
      current.clear();
      was_quoted = false;
    } else if (was_quoted && c != ' ' && c != '\t' && c != '\r') {
      throw CsvError(line_number, "text after closing quote");
    } else {
      current += c;
    }
  }
  if (quoted) throw CsvError(line_number, "unterminated quoted field");
  fields.push_back(current);
  return fields;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_number = 0;
  std::string line;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_number;
    if (line_number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_record(line, line_number);
    std::vector<double> values;
    values.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      const auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (first_record) {
      first_record = false;
      width = fields.size();
      if (!numeric) {
        for (const auto& f : fields) table.header.push_back(trim(f));
        continue;
      }
    }
    if (fields.size() != width) {
      throw CsvError(line_number, "expected " + std::to_string(width) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    if (!numeric) throw CsvError(line_number, "non-numeric field");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw CsvError(line_number, "no data rows");
  table.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.data(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(0, "cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Sample& data, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << data(i, j);
    out << '\n';
  }
}

}  // namespace tailtest::harness
