#include <doctest.h>

#include <cmath>
#include <fstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/orbits.hpp"
#include "core/sgp4.hpp"
#include "core/time_utils.hpp"
#include "core/tle.hpp"
#include "test_helpers.hpp"

using namespace snapdop;

namespace {

TleRecord load_verification_tle() {
    return parse_tle_file(test::test_data_dir() + "/sgp4_verification_00005.tle", true)
        .records.front();
}

}  // namespace

TEST_CASE("propagation matches the published verification vectors in TEME") {
    const TleRecord rec = load_verification_tle();
    const csv::Table table =
        csv::read_file(test::test_data_dir() + "/sgp4_verification_00005.csv");
    REQUIRE(table.rows.size() == 13);
    // The published span for this satellite runs 0..4320 min in 360 min steps.
    const sgp4::Elements elements = sgp4::initialize(rec);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const double tsince = csv::parse_double(row[0], static_cast<int>(i), "tsince");
        Vec3 r_km, v_km_s;
        sgp4::propagate(elements, tsince, r_km, v_km_s);
        const Vec3 expected_r(csv::parse_double(row[1], 0, "rx"),
                              csv::parse_double(row[2], 0, "ry"),
                              csv::parse_double(row[3], 0, "rz"));
        const Vec3 expected_v(csv::parse_double(row[4], 0, "vx"),
                              csv::parse_double(row[5], 0, "vy"),
                              csv::parse_double(row[6], 0, "vz"));
        CHECK((r_km - expected_r).norm() < 1.0e-3);   // km
        CHECK((v_km_s - expected_v).norm() < 1.0e-6);  // km/s
    }
}

TEST_CASE("propagate_teme agrees with the raw propagator at an offset instant") {
    const TleRecord rec = load_verification_tle();
    const double t = rec.epoch_unix_s + 360.0 * 60.0;
    const SatStateTeme state = propagate_teme(rec, t);
    CHECK(state.position_m.x / 1000.0 == doctest::Approx(-7154.03120202).epsilon(1e-9));
    CHECK(state.position_m.y / 1000.0 == doctest::Approx(-3783.17682504).epsilon(1e-9));
    CHECK(state.position_m.z / 1000.0 == doctest::Approx(-3536.19412294).epsilon(1e-9));
}

TEST_CASE("Iridium-class TLE orbits at the Kepler radius") {
    const TleRecord rec = test::test_constellation().front();
    // Kepler's third law from the mean motion.
    const double n_rad_s = rec.mean_motion_rev_day * 2.0 * std::numbers::pi / 86400.0;
    const double kepler_a_m = std::cbrt(sgp4::grav::mu_km3_s2 * 1.0e9 / (n_rad_s * n_rad_s));
    CHECK(kepler_a_m == doctest::Approx(7.15e6).epsilon(0.01));
    for (int k = 0; k <= 6; ++k) {
        const SatStateEcef state = propagate_to(rec, rec.epoch_unix_s + k * 540.0);
        CHECK(std::fabs(state.position_m.norm() - 7.15e6) < 0.05e6);
        CHECK(std::fabs(state.position_m.norm() - kepler_a_m) < 0.02e6);
    }
}

TEST_CASE("state at the epoch equals series sample zero") {
    const TleRecord rec = test::test_constellation().front();
    const SatStateEcef direct = propagate_to(rec, rec.epoch_unix_s);
    const auto series = propagate_series(rec, rec.epoch_unix_s, rec.epoch_unix_s + 10.0, 5.0);
    REQUIRE(series.size() == 3);
    CHECK(series[0].position_m.x == direct.position_m.x);
    CHECK(series[0].position_m.y == direct.position_m.y);
    CHECK(series[0].position_m.z == direct.position_m.z);
    CHECK(series[0].velocity_m_s.x == direct.velocity_m_s.x);
}

TEST_CASE("series samples equal propagate_to at each timestamp") {
    const TleRecord rec = test::test_constellation().at(7);
    const double t0 = rec.epoch_unix_s + 120.0;
    const auto series = propagate_series(rec, t0, t0 + 60.0, 12.5);
    REQUIRE(series.size() == 5);  // 0, 12.5, 25, 37.5, 50
    for (const auto& sample : series) {
        const SatStateEcef direct = propagate_to(rec, sample.time_unix_s);
        CHECK((sample.position_m - direct.position_m).norm() == doctest::Approx(0.0));
        CHECK((sample.velocity_m_s - direct.velocity_m_s).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("55-minute series honours the physical invariants") {
    const TleRecord rec = test::test_constellation().at(23);
    const double t0 = rec.epoch_unix_s;
    const auto series = propagate_series(rec, t0, t0 + 55.0 * 60.0, 1.0);
    REQUIRE(series.size() == 3301);
    double previous = -1.0e300;
    for (const auto& state : series) {
        CHECK(state.time_unix_s > previous);
        previous = state.time_unix_s;
        const double radius = state.position_m.norm();
        const double speed = state.velocity_m_s.norm();
        CHECK(radius > 6.4e6);
        CHECK(radius < 5.0e7);
        CHECK(speed > 1.0e3);
        CHECK(speed < 1.1e4);
    }
}

TEST_CASE("two-body energy is conserved along a TEME series within 1 percent") {
    const TleRecord rec = load_verification_tle();
    const double mu = sgp4::grav::mu_km3_s2;
    double first_energy = 0.0;
    for (int k = 0; k <= 55; ++k) {
        const SatStateTeme state = propagate_teme(rec, rec.epoch_unix_s + k * 60.0);
        const double r_km = state.position_m.norm() / 1000.0;
        const double v_km_s = state.velocity_m_s.norm() / 1000.0;
        const double energy = v_km_s * v_km_s / 2.0 - mu / r_km;
        if (k == 0) {
            first_energy = energy;
        } else {
            CHECK(std::fabs(energy - first_energy) < 0.01 * std::fabs(first_energy));
        }
    }
}

TEST_CASE("the TEME to ECEF rotation preserves the radius") {
    const TleRecord rec = test::test_constellation().at(40);
    for (int k = 0; k < 8; ++k) {
        const double t = rec.epoch_unix_s + k * 417.0;
        const SatStateTeme teme = propagate_teme(rec, t);
        const SatStateEcef ecef = teme_to_ecef(teme);
        const double relative =
            std::fabs(ecef.position_m.norm() - teme.position_m.norm()) /
            teme.position_m.norm();
        CHECK(relative < 1.0e-6);
    }
}

TEST_CASE("gmst matches the IAU-1982 value at J2000") {
    const double j2000 = time_utils::unix_from_civil(2000, 1, 1, 12, 0, 0.0);
    const double deg = gmst(j2000) * 180.0 / std::numbers::pi;
    CHECK(deg == doctest::Approx(280.46062).epsilon(1e-7));
}

TEST_CASE("gmst repeats after one sidereal day") {
    const double sidereal_day_s = 86164.0905308;
    for (double t : {0.0, 1.0e9, 1.7e9}) {
        const double a = gmst(t);
        const double b = gmst(t + sidereal_day_s);
        double delta = std::fabs(a - b);
        if (delta > std::numbers::pi) delta = 2.0 * std::numbers::pi - delta;
        CHECK(delta < 1.0e-9);
    }
}

TEST_CASE("gmst stays in [0, 2pi)") {
    for (int k = 0; k < 1000; ++k) {
        const double t = -3.0e8 + k * 4.0e6;
        const double theta = gmst(t);
        CHECK(theta >= 0.0);
        CHECK(theta < 2.0 * std::numbers::pi);
    }
    CHECK_THROWS_AS(gmst(time_utils::unix_from_civil(2150, 1, 1, 0, 0, 0.0)), SnapdopError);
}

TEST_CASE("deep-space orbits are rejected") {
    TleRecord rec = test::test_constellation().front();
    rec.mean_motion_rev_day = 2.0;  // ~12 h period
    try {
        propagate_to(rec, rec.epoch_unix_s);
        FAIL("expected DeepSpaceUnsupported");
    } catch (const SnapdopError& err) {
        CHECK(err.code() == ErrorCode::DeepSpaceUnsupported);
    }
}

TEST_CASE("stale epochs are rejected beyond the configurable limit") {
    const TleRecord rec = test::test_constellation().front();
    const double eight_days = rec.epoch_unix_s + 8.0 * 86400.0;
    CHECK_THROWS_AS(propagate_to(rec, eight_days), SnapdopError);
    try {
        propagate_to(rec, eight_days);
    } catch (const SnapdopError& err) {
        CHECK(err.code() == ErrorCode::StaleEpoch);
    }
    // A wider limit admits the same request.
    CHECK_NOTHROW(propagate_to(rec, eight_days, 10.0 * 86400.0));
}

TEST_CASE("orbits dipping below the surface raise PropagationDiverged") {
    TleRecord rec = test::test_constellation().front();
    rec.mean_motion_rev_day = 13.0;
    rec.eccentricity = 0.35;  // perigee far inside the Earth
    rec.mean_anomaly_deg = 0.0;
    try {
        propagate_to(rec, rec.epoch_unix_s);
        FAIL("expected PropagationDiverged");
    } catch (const SnapdopError& err) {
        CHECK(err.code() == ErrorCode::PropagationDiverged);
    }
}

TEST_CASE("propagate_series validates its arguments") {
    const TleRecord rec = test::test_constellation().front();
    CHECK_THROWS_AS(propagate_series(rec, 100.0, 100.0, 1.0), SnapdopError);
    CHECK_THROWS_AS(propagate_series(rec, rec.epoch_unix_s, rec.epoch_unix_s + 1.0, 0.0),
                    SnapdopError);
}
