#include "kv_text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "qpic/error.hpp"
#include "qpic/units.hpp"

namespace qpic::detail {
namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '-';
}

std::string_view trim(std::string_view s, std::size_t* offset = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (offset) *offset += b;
  return s.substr(b, e - b);
}

// Strict full-token conversion of a plain literal.
bool to_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

std::vector<KvLine> lex_kv(std::string_view text, const std::string& source) {
  std::vector<KvLine> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    std::size_t col0 = 0;
    const std::string_view body = trim(raw, &col0);
    if (body.empty()) continue;
    const std::size_t column = col0 + 1;

    KvLine line;
    line.line = line_no;
    line.column = column;

    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ParseError(source, line_no, column + body.size(),
                         "expected ']' to close section header");
      }
      std::size_t inner_off = column + 1;
      const std::string_view name = trim(body.substr(1, body.size() - 2), &inner_off);
      if (name.empty() || !is_ident_start(name.front())) {
        throw ParseError(source, line_no, inner_off, "invalid section name");
      }
      for (std::size_t i = 0; i < name.size(); ++i) {
        if (!is_ident_char(name[i])) {
          throw ParseError(source, line_no, inner_off + i,
                           "invalid character in section name");
        }
      }
      line.kind = KvLine::Kind::Section;
      line.name = std::string(name);
      out.push_back(std::move(line));
      continue;
    }

    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      // Only `element <kind>` headers may omit '='.
      constexpr std::string_view kElement = "element";
      if (body.substr(0, kElement.size()) == kElement &&
          body.size() > kElement.size() &&
          std::isspace(static_cast<unsigned char>(body[kElement.size()]))) {
        std::size_t kind_off = column + kElement.size();
        const std::string_view kind = trim(body.substr(kElement.size()), &kind_off);
        for (std::size_t i = 0; i < kind.size(); ++i) {
          if (!is_ident_char(kind[i])) {
            throw ParseError(source, line_no, kind_off + i,
                             "invalid character in element kind");
          }
        }
        line.kind = KvLine::Kind::Element;
        line.name = std::string(kind);
        line.value_column = kind_off;
        out.push_back(std::move(line));
        continue;
      }
      throw ParseError(source, line_no, column,
                       "expected 'key = value', '[section]' or 'element <kind>'");
    }

    std::size_t key_off = column;
    const std::string_view key = trim(body.substr(0, eq), &key_off);
    if (key.empty()) throw ParseError(source, line_no, column, "missing key before '='");
    if (!is_ident_start(key.front())) {
      throw ParseError(source, line_no, key_off, "key must start with a letter");
    }
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (!is_ident_char(key[i])) {
        throw ParseError(source, line_no, key_off + i, "invalid character in key");
      }
    }
    std::size_t val_off = column + eq + 1;
    const std::string_view value = trim(body.substr(eq + 1), &val_off);
    if (value.empty()) {
      throw ParseError(source, line_no, column + eq + 1, "missing value after '='");
    }
    line.kind = KvLine::Kind::Assignment;
    line.name = std::string(key);
    line.column = key_off;
    line.value = std::string(value);
    line.value_column = val_off;
    out.push_back(std::move(line));
  }
  return out;
}

double parse_number(const KvLine& line, const std::string& source) {
  std::string compact;
  for (char c : line.value) {
    if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
  }
  std::string_view s = compact;
  double value = 0.0;
  if (to_double(s, value)) return value;

  // [coef*]pi[/den] with an optional leading sign.
  double sign = 1.0;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    if (s.front() == '-') sign = -1.0;
    s.remove_prefix(1);
  }
  const auto pi_at = s.find("pi");
  if (pi_at != std::string_view::npos) {
    double coef = 1.0;
    double den = 1.0;
    bool ok = true;
    if (pi_at > 0) {
      ok = s[pi_at - 1] == '*' && to_double(s.substr(0, pi_at - 1), coef);
    }
    const std::string_view rest = s.substr(pi_at + 2);
    if (ok && !rest.empty()) {
      ok = rest.front() == '/' && to_double(rest.substr(1), den) && den != 0.0;
    }
    if (ok) return sign * coef * kPi / den;
  }
  throw ParseError(source, line.line, line.value_column,
                   "expected a number, got '" + line.value + "'");
}

std::vector<double> parse_number_list(const KvLine& line,
                                      const std::string& source) {
  std::vector<double> out;
  std::size_t start = 0;
  const std::string& v = line.value;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const std::size_t end = comma == std::string::npos ? v.size() : comma;
    KvLine item = line;
    std::size_t off = line.value_column + start;
    item.value = std::string(trim(std::string_view(v).substr(start, end - start), &off));
    item.value_column = off;
    out.push_back(parse_number(item, source));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(const KvLine& line, const std::string& source) {
  if (line.value == "true" || line.value == "yes" || line.value == "1") return true;
  if (line.value == "false" || line.value == "no" || line.value == "0") return false;
  throw ParseError(source, line.line, line.value_column,
                   "expected true or false, got '" + line.value + "'");
}

}  // namespace qpic::detail
