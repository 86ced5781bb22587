#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace colmet {

using Date = std::chrono::sys_days;

// Parses a strict ISO-8601 calendar date (YYYY-MM-DD). Throws ParseError.
Date parse_date(std::string_view text);

std::string format_date(Date date);

// Validated construction; throws ConfigError on an impossible date.
Date make_date(int year, unsigned month, unsigned day);

}  // namespace colmet
