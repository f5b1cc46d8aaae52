#include "core/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace snapdop::csv {

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

Table parse_text(const std::string& text) {
    Table table;
    std::istringstream stream(text);
    std::string line;
    bool have_header = false;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header) {
            table.header = split_row(line);
            have_header = true;
        } else {
            table.rows.push_back(split_row(line));
        }
    }
    return table;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::string& what) {
    if (table.header != expected) {
        raise(ErrorCode::SchemaMismatch,
              what + ": header '" + join_row(table.header) + "' does not match expected '" +
                  join_row(expected) + "'");
    }
}

double parse_double(const std::string& field, int row_number, const char* column) {
    if (field.empty()) {
        raise(ErrorCode::RowParseError, "row " + std::to_string(row_number) + ": column '" +
                                            column + "' is empty");
    }
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) {
        raise(ErrorCode::RowParseError, "row " + std::to_string(row_number) +
                                            ": cannot parse '" + field + "' in column '" +
                                            column + "'");
    }
    return value;
}

std::optional<double> parse_optional_double(const std::string& field, int row_number,
                                            const char* column) {
    if (field.empty()) return std::nullopt;
    return parse_double(field, row_number, column);
}

}  // namespace snapdop::csv
