#ifndef SNAPDOP_CORE_TIME_UTILS_HPP
#define SNAPDOP_CORE_TIME_UTILS_HPP

#include <cstdint>
#include <string>

namespace snapdop::time_utils {

// Instants are carried everywhere as UTC Unix seconds with fractional part
// (Unix time repeats leap seconds, so calendar mapping is direct).

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, int month, int day);

// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

double unix_from_civil(int year, int month, int day, int hour, int minute, double second);

// Julian date (UTC) from Unix seconds.
inline double julian_date(double unix_seconds) {
    return unix_seconds / 86400.0 + 2440587.5;
}

inline double unix_from_julian(double jd) {
    return (jd - 2440587.5) * 86400.0;
}

// TLE epoch field: 2-digit year (57-99 -> 19xx, else 20xx) plus fractional
// day of year (day 1 = Jan 1). Conversion is exact in the day fraction.
double unix_from_tle_epoch(int two_digit_year, double day_of_year);

// TAI-UTC offset in seconds at the given instant (fixed built-in table,
// 1972 through the 2017 leap second).
int tai_minus_utc(double unix_seconds);

// Physical elapsed seconds between two UTC instants, accounting for any leap
// seconds inserted in between. For intervals not straddling a leap second
// this equals t1 - t0.
double elapsed_seconds(double unix_t0, double unix_t1);

// "YYYY-MM-DDThh:mm:ss.sssZ" for report output.
std::string format_utc(double unix_seconds);

}  // namespace snapdop::time_utils

#endif
