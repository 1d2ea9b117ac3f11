#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace debtlens::csv {

// RFC-4180: comma separated, double-quote escaping, CRLF or LF line ends.
// Returns one vector of fields per record; an empty input yields no records.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Quotes a field iff it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

} // namespace debtlens::csv
