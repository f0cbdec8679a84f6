#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace graper::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC 4180-style parsing with double-quoted fields. Lines starting with '#'
// are comments; a UTF-8 byte-order mark is skipped. `comments` receives the
// comment lines (without '#') when non-null.
Table parse(std::istream& in, std::vector<std::string>* comments = nullptr);
Table read_file(const std::string& path, std::vector<std::string>* comments = nullptr);

std::string escape(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// 17 significant digits, which round-trips every finite double.
std::string format_double(double value);

}  // namespace graper::csv
