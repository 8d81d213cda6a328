#pragma once

// Line-oriented key-value lexer shared by the material and netlist formats.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qpic::detail {

struct KvLine {
  enum class Kind { Section, Element, Assignment };
  Kind kind = Kind::Assignment;
  std::size_t line = 0;
  std::size_t column = 0;        ///< column of `name`
  std::string name;              ///< section name, element kind or key
  std::string value;             ///< assignment right-hand side
  std::size_t value_column = 0;  ///< column of `value`
};

/// Splits text into section headers `[name]`, element headers
/// `element <kind>` and assignments `key = value`. `#` starts a comment.
std::vector<KvLine> lex_kv(std::string_view text, const std::string& source);

/// Number literal or a multiple of pi: `1.5`, `-2e-3`, `pi`, `pi/2`,
/// `3*pi/8`, `0.25*pi`.
double parse_number(const KvLine& line, const std::string& source);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(const KvLine& line,
                                      const std::string& source);

bool parse_bool(const KvLine& line, const std::string& source);

}  // namespace qpic::detail
