#include "core/tle.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/time_utils.hpp"

namespace snapdop {

namespace {

std::string rtrim(const std::string& s) {
    size_t end = s.size();
    while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '\r' || s[end - 1] == '\t' ||
                       s[end - 1] == '\n')) {
        --end;
    }
    return s.substr(0, end);
}

std::string trim(const std::string& s) {
    const std::string r = rtrim(s);
    size_t start = 0;
    while (start < r.size() && r[start] == ' ') ++start;
    return r.substr(start);
}

double parse_double_field(const std::string& line, int line_number, size_t pos, size_t len,
                          const char* what) {
    const std::string field = trim(line.substr(pos, len));
    if (field.empty()) {
        raise(ErrorCode::MalformedLine,
              "line " + std::to_string(line_number) + ": empty " + what + " field");
    }
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) {
        raise(ErrorCode::MalformedLine,
              "line " + std::to_string(line_number) + ": cannot parse " + what + " from '" +
                  field + "'");
    }
    return value;
}

long parse_int_field(const std::string& line, int line_number, size_t pos, size_t len,
                     const char* what, bool allow_empty = false) {
    const std::string field = trim(line.substr(pos, len));
    if (field.empty()) {
        if (allow_empty) return 0;
        raise(ErrorCode::MalformedLine,
              "line " + std::to_string(line_number) + ": empty " + what + " field");
    }
    char* end = nullptr;
    const long value = std::strtol(field.c_str(), &end, 10);
    if (end != field.c_str() + field.size()) {
        raise(ErrorCode::MalformedLine,
              "line " + std::to_string(line_number) + ": cannot parse " + what + " from '" +
                  field + "'");
    }
    return value;
}

// "12345-4" / "+12345-3" / " 00000+0" style implied-decimal exponent field.
double parse_tle_exponent_field(const std::string& line, int line_number, size_t pos,
                                size_t len, const char* what) {
    std::string field = trim(line.substr(pos, len));
    if (field.empty()) return 0.0;
    double sign = 1.0;
    size_t i = 0;
    if (field[i] == '+' || field[i] == '-') {
        sign = field[i] == '-' ? -1.0 : 1.0;
        ++i;
    }
    size_t exp_pos = field.find_first_of("+-", i);
    if (exp_pos == std::string::npos || exp_pos + 1 >= field.size()) {
        raise(ErrorCode::MalformedLine,
              "line " + std::to_string(line_number) + ": cannot parse " + what + " from '" +
                  field + "'");
    }
    const std::string mantissa_digits = field.substr(i, exp_pos - i);
    for (char c : mantissa_digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            raise(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_number) + ": cannot parse " + what + " from '" +
                      field + "'");
        }
    }
    const double mantissa =
        std::strtod(("0." + mantissa_digits).c_str(), nullptr);
    const double exp_sign = field[exp_pos] == '-' ? -1.0 : 1.0;
    const double exponent = std::strtod(field.substr(exp_pos + 1).c_str(), nullptr);
    return sign * mantissa * std::pow(10.0, exp_sign * exponent);
}

// Alpha-5 catalog numbers: a leading letter A-Z (I and O unused) encodes
// 10-33 in the ten-thousands place.
int parse_satnum(const std::string& line, int line_number) {
    const std::string field = line.substr(2, 5);
    const char head = field[0];
    if (std::isalpha(static_cast<unsigned char>(head))) {
        const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(head)));
        if (up == 'I' || up == 'O') {
            raise(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_number) + ": invalid alpha-5 digit '" +
                      std::string(1, head) + "'");
        }
        int value = up - 'A' + 10;
        if (up > 'I') --value;
        if (up > 'O') --value;
        const long tail = parse_int_field(line, line_number, 3, 4, "catalog number");
        return value * 10000 + static_cast<int>(tail);
    }
    return static_cast<int>(parse_int_field(line, line_number, 2, 5, "catalog number"));
}

TleRecord parse_set(const std::string& line1, const std::string& line2, int line1_number,
                    const std::optional<std::string>& name) {
    for (const auto* entry : {&line1, &line2}) {
        const int number = entry == &line1 ? line1_number : line1_number + 1;
        if (entry->size() != 69) {
            raise(ErrorCode::MalformedLine, "line " + std::to_string(number) +
                                                ": expected 69 characters, got " +
                                                std::to_string(entry->size()));
        }
        const int expected = tle_line_checksum(*entry);
        const char actual = (*entry)[68];
        if (!std::isdigit(static_cast<unsigned char>(actual)) || actual - '0' != expected) {
            raise(ErrorCode::ChecksumMismatch,
                  "line " + std::to_string(number) + ": checksum digit '" +
                      std::string(1, actual) + "' does not match computed " +
                      std::to_string(expected));
        }
    }

    TleRecord rec;
    rec.name = name;
    rec.norad_id = parse_satnum(line1, line1_number);
    const int norad2 = parse_satnum(line2, line1_number + 1);
    if (rec.norad_id != norad2) {
        raise(ErrorCode::MalformedLine,
              "line " + std::to_string(line1_number + 1) + ": catalog number mismatch (" +
                  std::to_string(rec.norad_id) + " vs " + std::to_string(norad2) + ")");
    }
    rec.classification = line1[7];
    rec.intl_designator = rtrim(line1.substr(9, 8));

    const int epoch_year = static_cast<int>(parse_int_field(line1, line1_number, 18, 2, "epoch year"));
    const double epoch_day = parse_double_field(line1, line1_number, 20, 12, "epoch day");
    rec.epoch_unix_s = time_utils::unix_from_tle_epoch(epoch_year, epoch_day);

    rec.mean_motion_dot = parse_double_field(line1, line1_number, 33, 10, "mean motion dot");
    rec.mean_motion_ddot =
        parse_tle_exponent_field(line1, line1_number, 44, 8, "mean motion ddot");
    rec.bstar = parse_tle_exponent_field(line1, line1_number, 53, 8, "bstar");
    rec.ephemeris_type = static_cast<int>(parse_int_field(line1, line1_number, 62, 1, "ephemeris type", true));
    rec.element_set_number = static_cast<int>(parse_int_field(line1, line1_number, 64, 4, "element set number", true));

    rec.inclination_deg = parse_double_field(line2, line1_number + 1, 8, 8, "inclination");
    rec.raan_deg = parse_double_field(line2, line1_number + 1, 17, 8, "raan");
    rec.eccentricity =
        std::strtod(("0." + trim(line2.substr(26, 7))).c_str(), nullptr);
    rec.arg_perigee_deg = parse_double_field(line2, line1_number + 1, 34, 8, "arg of perigee");
    rec.mean_anomaly_deg = parse_double_field(line2, line1_number + 1, 43, 8, "mean anomaly");
    rec.mean_motion_rev_day = parse_double_field(line2, line1_number + 1, 52, 11, "mean motion");
    rec.revolution_number = static_cast<int>(parse_int_field(line2, line1_number + 1, 63, 5, "revolution number", true));

    if (rec.eccentricity < 0.0 || rec.eccentricity >= 1.0) {
        raise(ErrorCode::MalformedLine, "line " + std::to_string(line1_number + 1) +
                                            ": eccentricity out of [0,1)");
    }
    if (rec.inclination_deg < 0.0 || rec.inclination_deg > 180.0) {
        raise(ErrorCode::MalformedLine, "line " + std::to_string(line1_number + 1) +
                                            ": inclination out of [0,180]");
    }
    if (!(rec.mean_motion_rev_day > 0.0)) {
        raise(ErrorCode::MalformedLine,
              "line " + std::to_string(line1_number + 1) + ": mean motion must be positive");
    }
    return rec;
}

bool looks_like_line1(const std::string& line) {
    return line.size() == 69 && line[0] == '1' && line[1] == ' ';
}

bool looks_like_line2(const std::string& line) {
    return line.size() == 69 && line[0] == '2' && line[1] == ' ';
}

}  // namespace

int tle_line_checksum(const std::string& line) {
    int sum = 0;
    const size_t end = line.size() < 68 ? line.size() : 68;
    for (size_t i = 0; i < end; ++i) {
        const char c = line[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            sum += c - '0';
        } else if (c == '-') {
            sum += 1;
        }
    }
    return sum % 10;
}

TleParseResult parse_tles(const std::string& text, bool strict) {
    TleParseResult result;
    std::vector<std::string> lines;
    {
        std::istringstream stream(text);
        std::string line;
        while (std::getline(stream, line)) {
            lines.push_back(rtrim(line));
        }
    }

    std::optional<std::string> pending_name;
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) {
            pending_name.reset();
            continue;
        }
        if (!looks_like_line1(line)) {
            if (line[0] == '1' && line[1] == ' ') {
                // A line-1 header of the wrong length is a malformed set, not a name.
                const std::string msg =
                    "line " + std::to_string(i + 1) + ": expected 69 characters, got " +
                    std::to_string(line.size());
                if (strict) raise(ErrorCode::MalformedLine, msg);
                result.issues.push_back({static_cast<int>(i + 1), msg});
                ++result.skipped_sets;
                if (i + 1 < lines.size() && lines[i + 1][0] == '2') ++i;
                pending_name.reset();
                continue;
            }
            pending_name = trim(line);
            if (pending_name->empty()) pending_name.reset();
            continue;
        }
        if (i + 1 >= lines.size() || !(lines[i + 1].size() > 1 && lines[i + 1][0] == '2')) {
            const std::string msg =
                "line " + std::to_string(i + 1) + ": element set missing line 2";
            if (strict) raise(ErrorCode::MalformedLine, msg);
            result.issues.push_back({static_cast<int>(i + 1), msg});
            ++result.skipped_sets;
            pending_name.reset();
            continue;
        }
        const std::string& line2 = lines[i + 1];
        try {
            if (!looks_like_line2(line2)) {
                raise(ErrorCode::MalformedLine,
                      "line " + std::to_string(i + 2) + ": expected 69 characters, got " +
                          std::to_string(line2.size()));
            }
            result.records.push_back(parse_set(line, line2, static_cast<int>(i + 1), pending_name));
        } catch (const SnapdopError& err) {
            if (strict) throw;
            result.issues.push_back({static_cast<int>(i + 1), err.what()});
            ++result.skipped_sets;
        }
        ++i;  // line 2 consumed either way
        pending_name.reset();
    }
    return result;
}

TleParseResult parse_tle_file(const std::string& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open TLE file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_tles(buffer.str(), strict);
}

namespace {

// value -> "±MMMMM±E" implied-decimal exponent encoding (8 chars).
std::string format_tle_exponent(double value) {
    char buf[32];
    if (value == 0.0) {
        return " 00000-0";
    }
    const char sign = value < 0.0 ? '-' : ' ';
    double mag = std::fabs(value);
    int exponent = static_cast<int>(std::floor(std::log10(mag))) + 1;
    double mantissa = mag / std::pow(10.0, exponent);
    int digits = static_cast<int>(std::lround(mantissa * 100000.0));
    if (digits >= 100000) {
        digits /= 10;
        ++exponent;
    }
    if (exponent > 9 || exponent < -9) {
        raise(ErrorCode::InvalidArgument, "value out of TLE exponent field range");
    }
    std::snprintf(buf, sizeof(buf), "%c%05d%+d", sign, digits, exponent);
    return buf;
}

std::string format_satnum(int norad) {
    char buf[16];
    if (norad < 0) {
        raise(ErrorCode::InvalidArgument, "catalog number must be non-negative");
    }
    if (norad < 100000) {
        std::snprintf(buf, sizeof(buf), "%05d", norad);
        return buf;
    }
    const int head = norad / 10000;
    if (head < 10 || head > 33) {
        raise(ErrorCode::InvalidArgument, "catalog number out of alpha-5 range");
    }
    char letter = static_cast<char>('A' + head - 10);
    if (letter >= 'I') ++letter;
    if (letter >= 'O') ++letter;
    std::snprintf(buf, sizeof(buf), "%c%04d", letter, norad % 10000);
    return buf;
}

}  // namespace

std::pair<std::string, std::string> serialize_tle(const TleRecord& record) {
    // Epoch back to 2-digit year + fractional day of year.
    const std::int64_t day_index =
        static_cast<std::int64_t>(std::floor(record.epoch_unix_s / 86400.0));
    int year, month, day;
    time_utils::civil_from_days(day_index, year, month, day);
    const double jan1 =
        static_cast<double>(time_utils::days_from_civil(year, 1, 1)) * 86400.0;
    const double day_of_year = (record.epoch_unix_s - jan1) / 86400.0 + 1.0;
    const int yy = year % 100;

    char ndot_buf[16];
    std::snprintf(ndot_buf, sizeof(ndot_buf), "%10.8f", std::fabs(record.mean_motion_dot));
    // "%10.8f" gives "0.00000023"; the standard drops the leading zero.
    std::string ndot = std::string(1, record.mean_motion_dot < 0.0 ? '-' : ' ') +
                       std::string(ndot_buf).substr(1);

    char line1[80];
    std::snprintf(line1, sizeof(line1), "1 %s%c %-8s %02d%012.8f %s %s %s %d %4d",
                  format_satnum(record.norad_id).c_str(), record.classification,
                  record.intl_designator.c_str(), yy, day_of_year, ndot.c_str(),
                  format_tle_exponent(record.mean_motion_ddot).c_str(),
                  format_tle_exponent(record.bstar).c_str(), record.ephemeris_type,
                  record.element_set_number);

    const long ecc_digits = std::lround(record.eccentricity * 1.0e7);
    char line2[80];
    std::snprintf(line2, sizeof(line2), "2 %s %8.4f %8.4f %07ld %8.4f %8.4f %11.8f%5d",
                  format_satnum(record.norad_id).c_str(), record.inclination_deg,
                  record.raan_deg, ecc_digits, record.arg_perigee_deg,
                  record.mean_anomaly_deg, record.mean_motion_rev_day,
                  record.revolution_number);

    std::string l1(line1), l2(line2);
    if (l1.size() != 68 || l2.size() != 68) {
        raise(ErrorCode::InvalidArgument, "TLE field out of column range during serialization");
    }
    l1 += static_cast<char>('0' + tle_line_checksum(l1));
    l2 += static_cast<char>('0' + tle_line_checksum(l2));
    return {l1, l2};
}

}  // namespace snapdop
