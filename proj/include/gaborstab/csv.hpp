#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gaborstab {

// Shortest representation that round-trips through parse_number.
std::string format_number(double v);
// Throws ValidationError on malformed or partially consumed input.
double parse_number(std::string_view s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    // Column index by name; throws ValidationError if absent.
    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is);
void write_csv_row(std::ostream& os, const std::vector<double>& row);
void write_csv_header(std::ostream& os, const std::vector<std::string>& header);

}  // namespace gaborstab
