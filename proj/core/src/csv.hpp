// Minimal CSV helpers (internal): comma separation with double-quote escaping.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace malvis::detail {

/// Splits one CSV record. Quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

}  // namespace malvis::detail
