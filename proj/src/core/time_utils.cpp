#include "core/time_utils.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace snapdop::time_utils {

std::int64_t days_from_civil(int year, int month, int day) {
    year -= month <= 2;
    const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(year - era * 400);
    const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2u) / 5u + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, int& year, int& month, int& day) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    year = static_cast<int>(y + (month <= 2));
}

double unix_from_civil(int year, int month, int day, int hour, int minute, double second) {
    return static_cast<double>(days_from_civil(year, month, day)) * 86400.0 +
           hour * 3600.0 + minute * 60.0 + second;
}

double unix_from_tle_epoch(int two_digit_year, double day_of_year) {
    const int year = two_digit_year < 57 ? 2000 + two_digit_year : 1900 + two_digit_year;
    const double jan1 = static_cast<double>(days_from_civil(year, 1, 1)) * 86400.0;
    return jan1 + (day_of_year - 1.0) * 86400.0;
}

namespace {

struct LeapEntry {
    double unix_start;  // UTC instant from which the offset applies
    int tai_minus_utc;
};

// TAI-UTC from the introduction of the integer-second system (1972) through
// the most recent leap second (2017-01-01).
const std::array<LeapEntry, 28>& leap_table() {
    static const std::array<LeapEntry, 28> table = {{
        {unix_from_civil(1972, 1, 1, 0, 0, 0.0), 10},
        {unix_from_civil(1972, 7, 1, 0, 0, 0.0), 11},
        {unix_from_civil(1973, 1, 1, 0, 0, 0.0), 12},
        {unix_from_civil(1974, 1, 1, 0, 0, 0.0), 13},
        {unix_from_civil(1975, 1, 1, 0, 0, 0.0), 14},
        {unix_from_civil(1976, 1, 1, 0, 0, 0.0), 15},
        {unix_from_civil(1977, 1, 1, 0, 0, 0.0), 16},
        {unix_from_civil(1978, 1, 1, 0, 0, 0.0), 17},
        {unix_from_civil(1979, 1, 1, 0, 0, 0.0), 18},
        {unix_from_civil(1980, 1, 1, 0, 0, 0.0), 19},
        {unix_from_civil(1981, 7, 1, 0, 0, 0.0), 20},
        {unix_from_civil(1982, 7, 1, 0, 0, 0.0), 21},
        {unix_from_civil(1983, 7, 1, 0, 0, 0.0), 22},
        {unix_from_civil(1985, 7, 1, 0, 0, 0.0), 23},
        {unix_from_civil(1988, 1, 1, 0, 0, 0.0), 24},
        {unix_from_civil(1990, 1, 1, 0, 0, 0.0), 25},
        {unix_from_civil(1991, 1, 1, 0, 0, 0.0), 26},
        {unix_from_civil(1992, 7, 1, 0, 0, 0.0), 27},
        {unix_from_civil(1993, 7, 1, 0, 0, 0.0), 28},
        {unix_from_civil(1994, 7, 1, 0, 0, 0.0), 29},
        {unix_from_civil(1996, 1, 1, 0, 0, 0.0), 30},
        {unix_from_civil(1997, 7, 1, 0, 0, 0.0), 31},
        {unix_from_civil(1999, 1, 1, 0, 0, 0.0), 32},
        {unix_from_civil(2006, 1, 1, 0, 0, 0.0), 33},
        {unix_from_civil(2009, 1, 1, 0, 0, 0.0), 34},
        {unix_from_civil(2012, 7, 1, 0, 0, 0.0), 35},
        {unix_from_civil(2015, 7, 1, 0, 0, 0.0), 36},
        {unix_from_civil(2017, 1, 1, 0, 0, 0.0), 37},
    }};
    return table;
}

}  // namespace

int tai_minus_utc(double unix_seconds) {
    const auto& table = leap_table();
    int offset = table.front().tai_minus_utc;
    for (const auto& entry : table) {
        if (unix_seconds >= entry.unix_start) {
            offset = entry.tai_minus_utc;
        } else {
            break;
        }
    }
    return offset;
}

double elapsed_seconds(double unix_t0, double unix_t1) {
    return (unix_t1 - unix_t0) +
           static_cast<double>(tai_minus_utc(unix_t1) - tai_minus_utc(unix_t0));
}

std::string format_utc(double unix_seconds) {
    const double floor_s = std::floor(unix_seconds);
    double frac = unix_seconds - floor_s;
    std::int64_t whole = static_cast<std::int64_t>(floor_s);
    // Round the millisecond field first so 59.9996 does not print as 59.1000.
    int millis = static_cast<int>(std::lround(frac * 1000.0));
    if (millis >= 1000) {
        millis -= 1000;
        whole += 1;
    }
    std::int64_t days = whole / 86400;
    std::int64_t sod = whole % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int year, month, day;
    civil_from_days(days, year, month, day);
    const int hour = static_cast<int>(sod / 3600);
    const int minute = static_cast<int>((sod % 3600) / 60);
    const int second = static_cast<int>(sod % 60);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", year, month, day,
                  hour, minute, second, millis);
    return buf;
}

}  // namespace snapdop::time_utils
