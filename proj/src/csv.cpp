#include "unwash/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "unwash/errors.hpp"

namespace unwash {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

int CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(path + ": cannot open file");
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    auto fields = split_line(line);
    if (lineno == 1) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        throw CsvError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " +
                       std::to_string(fields.size()));
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw CsvError(path + ": empty file");
  return table;
}

Mat read_matrix_csv(const std::string& path, std::vector<std::string>* colnames) {
  const CsvTable table = read_csv(path);
  if (colnames) *colnames = table.header;
  const std::size_t rows = table.rows.size();
  const std::size_t cols = table.header.size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string& f = table.rows[i][j];
      if (f == "NA" || f.empty()) {
        m(i, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0') {
        throw CsvError(path + ":" + std::to_string(i + 2) + ": invalid number '" + f + "'");
      }
      m(i, j) = v;
    }
  }
  return m;
}

void write_matrix_csv(const std::string& path, const Mat& m,
                      const std::vector<std::string>& colnames) {
  std::ofstream out(path);
  if (!out) throw CsvError(path + ": cannot open file for writing");
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (j) out << ',';
    out << (static_cast<std::size_t>(j) < colnames.size() ? colnames[j]
                                                          : "c" + std::to_string(j + 1));
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_int(long x) { return std::to_string(x); }

}  // namespace unwash
