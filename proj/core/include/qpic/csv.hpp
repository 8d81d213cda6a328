#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qpic {

using CsvCell = std::variant<double, std::string>;

/// RFC 4180 style table; numbers are written with 12 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  void add(std::vector<CsvCell> row);
  std::string str() const;
  void write(std::ostream& out) const;
};

std::string format_number(double v);

}  // namespace qpic
