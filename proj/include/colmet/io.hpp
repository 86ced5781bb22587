#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace colmet {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

std::string format_optional(const std::optional<double>& value);

double parse_double(std::string_view text, std::string_view what);

std::vector<std::string> split_fields(std::string_view line, char delimiter);

// Comma unless the header contains a tab.
char detect_delimiter(std::string_view header);

// True for blank cells and the usual NA spellings.
bool is_missing_cell(std::string_view cell);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace colmet
