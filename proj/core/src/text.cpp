#include "aiready/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <regex>

namespace aiready::text {
namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// 'd' matches a digit, anything else must match literally.
bool match_shape(std::string_view s, std::string_view shape) {
  if (s.size() < shape.size()) return false;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] == 'd') {
      if (!is_digit(s[i])) return false;
    } else if (s[i] != shape[i]) {
      return false;
    }
  }
  return true;
}

bool valid_time_suffix(std::string_view rest) {
  if (rest.empty()) return true;
  if (rest[0] != 'T' && rest[0] != ' ') return false;
  rest.remove_prefix(1);
  if (!match_shape(rest, "dd:dd")) return false;
  rest.remove_prefix(5);
  if (match_shape(rest, ":dd")) rest.remove_prefix(3);
  if (!rest.empty() && rest[0] == '.') {
    rest.remove_prefix(1);
    std::size_t n = 0;
    while (n < rest.size() && is_digit(rest[n])) ++n;
    if (n == 0) return false;
    rest.remove_prefix(n);
  }
  if (rest.empty() || rest == "Z") return true;
  if ((rest[0] == '+' || rest[0] == '-') && (rest.size() == 6 && match_shape(rest.substr(1), "dd:dd"))) return true;
  return false;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t nl = s.find('\n', start);
    std::size_t end = nl == std::string_view::npos ? s.size() : nl;
    std::string_view line = s.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  char c0 = s.front() == '-' && s.size() > 1 ? s[1] : s.front();
  if (!is_digit(c0) && c0 != '.') return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_integer_text(std::string_view s) {
  s = trim(s);
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

bool looks_like_date(std::string_view s) {
  s = trim(s);
  for (std::string_view shape : {"dddd-dd-dd", "dddd/dd/dd", "dd/dd/dddd"}) {
    if (match_shape(s, shape)) return valid_time_suffix(s.substr(shape.size()));
  }
  return false;
}

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_alnum(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string normalize_phrase(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (is_alnum(c)) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

bool contains_phrase(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return false;
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string_view::npos) {
    bool left_ok = pos == 0 || hay[pos - 1] == ' ';
    std::size_t end = pos + needle.size();
    bool right_ok = end == hay.size() || hay[end] == ' ';
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

bool valid_utf8(std::string_view bytes, bool allow_truncated_tail) {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      len = 4;
    } else {
      return false;
    }
    if (i + len > n) {
      if (!allow_truncated_tail) return false;
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((static_cast<unsigned char>(bytes[j]) & 0xC0) != 0x80) return false;
      }
      return true;
    }
    for (std::size_t j = 1; j < len; ++j) {
      if ((static_cast<unsigned char>(bytes[i + j]) & 0xC0) != 0x80) return false;
    }
    i += len;
  }
  return true;
}

std::string normalize_failure(std::string_view message) {
  static const std::regex kPath(R"((?:[A-Za-z]:)?(?:\.{0,2}/)?(?:[\w.\-]+/)+[\w.\-]+)");
  static const std::regex kNumber(R"(-?\b\d+(?:\.\d+)?(?:[eE][-+]?\d+)?\b)");
  static const std::regex kSpace(R"(\s+)");
  std::string s(message);
  s = std::regex_replace(s, kPath, "<path>");
  s = std::regex_replace(s, kNumber, "<n>");
  s = std::regex_replace(s, kSpace, " ");
  return std::string(trim(s));
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace aiready::text
