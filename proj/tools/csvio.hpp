#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskphase::cli {

/// Reading a malformed table; message carries file and line.
class CsvParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Filesystem problem (unreadable input, unwritable output).
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Serializes a double with 17 significant digits (round-trips exactly);
/// empty optional becomes an empty cell.
std::string csv_number(double value);
std::string csv_number(const std::optional<double>& value);

/// Row-oriented CSV writer with a fixed header; all content passes through
/// csv_number or is written verbatim.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string to_string() const;
  void write_file(const std::string& path) const;  // IoError on failure

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // all rows have header size

  int column(const std::string& name) const;  // CsvParseError when missing
};

/// Reads and tokenizes a CSV file; every row must match the header width.
CsvTable read_csv(const std::string& path);

/// Numeric cell access with file/line diagnostics.
double csv_to_double(const CsvTable& table, std::size_t row, int col);
long long csv_to_int(const CsvTable& table, std::size_t row, int col);

}  // namespace riskphase::cli
