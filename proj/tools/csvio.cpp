#include "csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace riskphase::cli {

std::string csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_number(const std::optional<double>& value) {
  return value ? csv_number(*value) : std::string();
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::logic_error("CsvWriter: row width does not match header");
  }
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    out << (i ? "," : "") << header_[i];
  }
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << row[i];
    }
    out << "\n";
  }
  return out.str();
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << to_string();
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw CsvParseError(path + ": missing column '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open for reading: " + path);
  }
  CsvTable table;
  table.path = path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw CsvParseError(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(table.header.size()) + " cells, got " +
                          std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) {
    throw CsvParseError(path + ": empty file");
  }
  return table;
}

namespace {

[[noreturn]] void bad_cell(const CsvTable& table, std::size_t row, int col,
                           const char* what) {
  throw CsvParseError(table.path + ":" + std::to_string(row + 2) + ": column '" +
                      table.header[static_cast<std::size_t>(col)] + "' is not " + what +
                      " ('" + table.rows[row][static_cast<std::size_t>(col)] + "')");
}

}  // namespace

double csv_to_double(const CsvTable& table, std::size_t row, int col) {
  const std::string& cell = table.rows[row][static_cast<std::size_t>(col)];
  try {
    std::size_t used = 0;
    const double value = std::stod(cell, &used);
    if (used != cell.size()) bad_cell(table, row, col, "a number");
    return value;
  } catch (const CsvParseError&) {
    throw;
  } catch (const std::exception&) {
    bad_cell(table, row, col, "a number");
  }
}

long long csv_to_int(const CsvTable& table, std::size_t row, int col) {
  const std::string& cell = table.rows[row][static_cast<std::size_t>(col)];
  try {
    std::size_t used = 0;
    const long long value = std::stoll(cell, &used);
    if (used != cell.size()) bad_cell(table, row, col, "an integer");
    return value;
  } catch (const CsvParseError&) {
    throw;
  } catch (const std::exception&) {
    bad_cell(table, row, col, "an integer");
  }
}

}  // namespace riskphase::cli
