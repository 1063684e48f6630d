#pragma once

// CSV reading/writing. Header row, comma separated, '.' decimal point,
// "NA" for missing. Doubles are written with %.17g so output round-trips
// and repeated runs are byte-identical.

#include <string>
#include <vector>

#include "unwash/types.hpp"

namespace unwash {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);

// Numeric matrix with a header row; throws CsvError with the offending line
// number on malformed input.
Mat read_matrix_csv(const std::string& path, std::vector<std::string>* colnames = nullptr);

void write_matrix_csv(const std::string& path, const Mat& m,
                      const std::vector<std::string>& colnames);

std::string format_double(double x);
std::string format_int(long x);

}  // namespace unwash
