#pragma once

// Helpers shared by the line-oriented file formats (scheme, stencil and
// config files) and by the CSV writers.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rkwave::text {

/// Shortest decimal string that round-trips to the same double.
/// Locale independent. Infinities print as "inf"/"-inf", NaN as "nan".
std::string format_double(double x);

/// Strict base-10 parse of a whole token; throws ParseError on junk.
double parse_double(std::string_view token, std::string_view what = "number");
long parse_int(std::string_view token, std::string_view what = "integer");

struct Line {
  std::size_t number = 0;  // 1-based
  std::vector<std::string> tokens;
};

/// Splits text into whitespace-separated tokens per line, dropping blank
/// lines and everything after a '#'.
std::vector<Line> tokenize(std::string_view content);

/// Parses trailing `key=value` tokens starting at `first`.
std::map<std::string, std::string> key_values(const Line& line, std::size_t first);

/// Real number written as a decimal or a simple multiple of pi:
/// "0.5", "1/2", "pi", "-pi/6", "2*pi/3".
double parse_scalar(std::string_view token, std::string_view what = "number");

/// Comma separated list; empty items are rejected.
std::vector<std::string> split_list(std::string_view text);

/// `key = value` lines with '#' comments. Duplicate keys throw ParseError.
std::map<std::string, std::string> parse_config(std::string_view content);

std::string read_file(const std::string& path);

/// Writes via a temporary sibling file and rename, so readers never observe
/// a partially written artifact.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace rkwave::text
