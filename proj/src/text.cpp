#include "rkwave/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "rkwave/errors.hpp"

namespace rkwave::text {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, std::string_view what) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("invalid " + std::string(what) + ": '" + std::string(token) + "'");
  }
  return value;
}

long parse_int(std::string_view token, std::string_view what) {
  long value = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError("invalid " + std::string(what) + ": '" + std::string(token) + "'");
  }
  return value;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_factor(std::string_view token, std::string_view what) {
  if (token == "pi") return 3.141592653589793238462643383279502884;
  return parse_double(token, what);
}

}  // namespace

double parse_scalar(std::string_view token, std::string_view what) {
  std::string_view t = trim(token);
  double sign = 1.0;
  if (!t.empty() && t.front() == '-' && (t.find('*') != std::string_view::npos ||
                                         t.find('/') != std::string_view::npos || t == "-pi")) {
    sign = -1.0;
    t.remove_prefix(1);
  }
  double denominator = 1.0;
  if (auto slash = t.find('/'); slash != std::string_view::npos) {
    denominator = parse_double(t.substr(slash + 1), what);
    if (denominator == 0.0) throw ParseError("invalid " + std::string(what) + ": division by zero");
    t = t.substr(0, slash);
  }
  double numerator = 1.0;
  if (auto star = t.find('*'); star != std::string_view::npos) {
    numerator = parse_factor(t.substr(0, star), what) * parse_factor(t.substr(star + 1), what);
  } else {
    numerator = parse_factor(t, what);
  }
  return sign * numerator / denominator;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  if (trim(text).empty()) return items;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (item.empty()) throw ParseError("empty item in list '" + std::string(text) + "'");
    items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return items;
}

std::map<std::string, std::string> parse_config(std::string_view content) {
  std::map<std::string, std::string> kv;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view raw = content.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (!raw.empty()) {
      const auto eq = raw.find('=');
      const std::string where = "line " + std::to_string(number) + ": ";
      if (eq == std::string_view::npos) throw ParseError(where + "expected key = value");
      const std::string key(trim(raw.substr(0, eq)));
      const std::string value(trim(raw.substr(eq + 1)));
      if (key.empty() || value.empty()) throw ParseError(where + "expected key = value");
      if (!kv.emplace(key, value).second) throw ParseError(where + "duplicate key '" + key + "'");
    }
    if (end == content.size()) break;
    pos = end + 1;
  }
  return kv;
}

std::vector<Line> tokenize(std::string_view content) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view raw = content.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      if (j > i) line.tokens.emplace_back(raw.substr(i, j - i));
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == content.size()) break;
    pos = end + 1;
  }
  return lines;
}

std::map<std::string, std::string> key_values(const Line& line, std::size_t first) {
  std::map<std::string, std::string> kv;
  for (std::size_t i = first; i < line.tokens.size(); ++i) {
    const std::string& tok = line.tokens[i];
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
      throw ParseError("line " + std::to_string(line.number) + ": expected key=value, got '" + tok +
                       "'");
    }
    auto [it, inserted] = kv.emplace(tok.substr(0, eq), tok.substr(eq + 1));
    if (!inserted) {
      throw ParseError("line " + std::to_string(line.number) + ": duplicate key '" + it->first + "'");
    }
  }
  return kv;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

}  // namespace rkwave::text
