#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace skillkit {

/// Shortest decimal form that parses back to the same double (round-trip safe).
std::string format_double(double v);

std::string trim(std::string_view s);

/// Splits one text line into cells. A space delimiter means "any run of
/// whitespace"; any other delimiter splits on that exact character and trims
/// each cell.
std::vector<std::string> split_cells(std::string_view line, char delimiter);

/// Splits text into lines, tolerating both \n and \r\n endings.
std::vector<std::string> split_lines(std::string_view text);

double parse_double_cell(const std::string& cell, bool& ok);

}  // namespace skillkit
