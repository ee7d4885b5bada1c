#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fine {

/// Formats a double with 17 significant digits, locale-independent.
/// All numeric file output goes through this so artifacts are byte-reproducible.
std::string format_double(double v);

/// Locale-independent double parser. Returns nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);

std::optional<long> parse_long(std::string_view s);

/// Splits one CSV line on commas. No quoting support; fields are trimmed of
/// surrounding whitespace and trailing CR.
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a whole text file into lines (LF or CRLF). Throws EmptyInputError if
/// the file is missing, unreadable, or has no non-blank lines.
std::vector<std::string> read_lines(const std::string& path);

void write_file(const std::string& path, const std::string& content);

}  // namespace fine
