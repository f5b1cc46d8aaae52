#include <doctest.h>

#include "core/time_utils.hpp"

using namespace snapdop::time_utils;

TEST_CASE("civil date round trips through day counts") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2000, 3, 1) == 11017);
    int y, m, d;
    civil_from_days(days_from_civil(2024, 2, 29), y, m, d);
    CHECK(y == 2024);
    CHECK(m == 2);
    CHECK(d == 29);
    for (std::int64_t days : {-10000, -1, 0, 1, 19000, 40000}) {
        civil_from_days(days, y, m, d);
        CHECK(days_from_civil(y, m, d) == days);
    }
}

TEST_CASE("julian date of the unix epoch and J2000") {
    CHECK(julian_date(0.0) == doctest::Approx(2440587.5));
    const double j2000 = unix_from_civil(2000, 1, 1, 12, 0, 0.0);
    CHECK(julian_date(j2000) == doctest::Approx(2451545.0));
    CHECK(unix_from_julian(2451545.0) == doctest::Approx(j2000));
}

TEST_CASE("TLE epoch conversion is exact in the day fraction") {
    // Day 179.78495062 of 2000 = 2000-06-27 18:50:19.733...
    const double epoch = unix_from_tle_epoch(0, 179.78495062);
    const double expected =
        unix_from_civil(2000, 6, 27, 0, 0, 0.0) + 0.78495062 * 86400.0;
    CHECK(epoch == doctest::Approx(expected).epsilon(1e-12));
    CHECK(format_utc(epoch) == "2000-06-27T18:50:19.734Z");
    // 2-digit year pivot: 57 and later are 19xx.
    CHECK(unix_from_tle_epoch(57, 1.0) == unix_from_civil(1957, 1, 1, 0, 0, 0.0));
    CHECK(unix_from_tle_epoch(56, 1.0) == unix_from_civil(2056, 1, 1, 0, 0, 0.0));
}

TEST_CASE("leap second table") {
    CHECK(tai_minus_utc(unix_from_civil(2016, 12, 31, 12, 0, 0.0)) == 36);
    CHECK(tai_minus_utc(unix_from_civil(2017, 1, 2, 0, 0, 0.0)) == 37);
    CHECK(tai_minus_utc(unix_from_civil(1998, 6, 1, 0, 0, 0.0)) == 31);
    CHECK(tai_minus_utc(unix_from_civil(1999, 6, 1, 0, 0, 0.0)) == 32);

    // One leap second inserted across 2017-01-01.
    const double before = unix_from_civil(2016, 12, 31, 23, 0, 0.0);
    const double after = unix_from_civil(2017, 1, 1, 1, 0, 0.0);
    CHECK(elapsed_seconds(before, after) == doctest::Approx(7201.0));
    // No leap second inside an ordinary interval.
    CHECK(elapsed_seconds(after, after + 3600.0) == doctest::Approx(3600.0));
    // Antisymmetric.
    CHECK(elapsed_seconds(after, before) == doctest::Approx(-7201.0));
}

TEST_CASE("format_utc carries milliseconds") {
    CHECK(format_utc(0.0) == "1970-01-01T00:00:00.000Z");
    CHECK(format_utc(0.5) == "1970-01-01T00:00:00.500Z");
    CHECK(format_utc(-0.25) == "1969-12-31T23:59:59.750Z");
}
