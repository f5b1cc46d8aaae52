#ifndef SNAPDOP_CORE_CSV_HPP
#define SNAPDOP_CORE_CSV_HPP

#include <optional>
#include <string>
#include <vector>

namespace snapdop::csv {

// Shortest representation that round-trips the double exactly.
std::string format_double(double value);

std::string join_row(const std::vector<std::string>& fields);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // each padded/validated by caller
};

// Splits on ',' only (the formats here never quote). Trailing CR stripped.
std::vector<std::string> split_row(const std::string& line);

// Reads a whole CSV file; the first non-empty line is the header. Throws
// IoError when the file cannot be opened.
Table read_file(const std::string& path);

Table parse_text(const std::string& text);

// Header must match the expected column names exactly and in order, else
// SchemaMismatch.
void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::string& what);

double parse_double(const std::string& field, int row_number, const char* column);

std::optional<double> parse_optional_double(const std::string& field, int row_number,
                                            const char* column);

}  // namespace snapdop::csv

#endif
