#include "qpic/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "qpic/error.hpp"

namespace qpic {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

void CsvTable::add(std::vector<CsvCell> row) {
  if (row.size() != header.size()) throw ValidationError("CSV row width mismatch");
  rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const auto& cells, auto&& render) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out << ',';
      out << render(cells[k]);
    }
    out << "\r\n";
  };
  line(header, [](const std::string& s) { return quote(s); });
  for (const auto& r : rows) {
    line(r, [](const CsvCell& c) {
      if (const double* d = std::get_if<double>(&c)) return format_number(*d);
      return quote(std::get<std::string>(c));
    });
  }
}

std::string CsvTable::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace qpic
