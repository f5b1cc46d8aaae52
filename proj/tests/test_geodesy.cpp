#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/geodesy.hpp"
#include "core/orbits.hpp"
#include "core/rng.hpp"
#include "test_helpers.hpp"

using namespace snapdop;

TEST_CASE("geodetic_to_ecef at the reference points") {
    const Vec3 equator = geodetic_to_ecef({0.0, 0.0, 0.0});
    CHECK(equator.x == doctest::Approx(6378137.0));
    CHECK(equator.y == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::fabs(equator.z) < 1e-9);

    // b = a (1 - f)
    const Vec3 pole = geodetic_to_ecef({90.0, 0.0, 0.0});
    CHECK(std::fabs(pole.x) < 1e-4);
    CHECK(std::fabs(pole.y) < 1e-4);
    CHECK(pole.z == doctest::Approx(6356752.3142).epsilon(1e-11));

    const Vec3 east = geodetic_to_ecef({0.0, 90.0, 0.0});
    CHECK(std::fabs(east.x) < 1e-6);
    CHECK(east.y == doctest::Approx(6378137.0));
    CHECK(std::fabs(east.z) < 1e-9);
}

TEST_CASE("ecef_to_geodetic inverts the forward conversion") {
    const GeodeticPosition original{37.7497, -122.4506, 87.3};
    const GeodeticPosition back = ecef_to_geodetic(geodetic_to_ecef(original));
    CHECK(back.latitude_deg == doctest::Approx(original.latitude_deg).epsilon(1e-11));
    CHECK(back.longitude_deg == doctest::Approx(original.longitude_deg).epsilon(1e-11));
    CHECK(back.altitude_m == doctest::Approx(original.altitude_m).epsilon(1e-7));
}

TEST_CASE("polar axis point returns longitude 0 by convention") {
    const GeodeticPosition pole = ecef_to_geodetic(Vec3(0.0, 0.0, 6356752.3142));
    CHECK(pole.latitude_deg == doctest::Approx(90.0));
    CHECK(pole.longitude_deg == 0.0);
    CHECK(std::fabs(pole.altitude_m) < 1e-4);
}

TEST_CASE("radial offset on the equator becomes pure altitude") {
    const GeodeticPosition p = ecef_to_geodetic(Vec3(6378137.0 + 1000.0, 0.0, 0.0));
    CHECK(p.latitude_deg == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.longitude_deg == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p.altitude_m == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("near-geocenter input is rejected") {
    CHECK_THROWS_AS(ecef_to_geodetic(Vec3(10.0, 20.0, 30.0)), SnapdopError);
    try {
        ecef_to_geodetic(Vec3(10.0, 20.0, 30.0));
    } catch (const SnapdopError& err) {
        CHECK(err.code() == ErrorCode::DegenerateInput);
    }
}

TEST_CASE("round trip closes within 1e-6 m over 10^4 random points") {
    Rng rng(20250308u);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        GeodeticPosition p;
        p.latitude_deg = -90.0 + 180.0 * rng.uniform();
        p.longitude_deg = -179.999 + 359.999 * rng.uniform();
        p.altitude_m = -1000.0 + 9.0e6 * rng.uniform();
        const Vec3 forward = geodetic_to_ecef(p);
        const GeodeticPosition back = ecef_to_geodetic(forward);
        const Vec3 again = geodetic_to_ecef(back);
        worst = std::max(worst, (forward - again).norm());
    }
    CHECK(worst < 1.0e-6);
}

TEST_CASE("range_rate for colinear and orthogonal geometry") {
    SatStateEcef sat;
    sat.position_m = Vec3(7.15e6, 0.0, 0.0);
    sat.velocity_m_s = Vec3(7000.0, 0.0, 0.0);  // radially outward
    const Vec3 rx(6.378e6, 0.0, 0.0);
    CHECK(range_rate(sat, rx, Vec3{}) == doctest::Approx(7000.0));

    sat.velocity_m_s = Vec3(0.0, 7456.0, 0.0);  // perpendicular to the line of sight
    CHECK(range_rate(sat, rx, Vec3{}) == doctest::Approx(0.0));

    sat.velocity_m_s = Vec3(-7000.0, 0.0, 0.0);  // approaching
    CHECK(range_rate(sat, rx, Vec3{}) == doctest::Approx(-7000.0));
}

TEST_CASE("range_rate sign flips when every velocity is negated") {
    SatStateEcef sat;
    sat.position_m = Vec3(5.0e6, 3.2e6, 4.1e6);
    sat.velocity_m_s = Vec3(-3000.0, 5500.0, 2100.0);
    const Vec3 rx_pos(4.1e6, 3.0e6, 3.3e6);
    const Vec3 rx_vel(12.0, -44.0, 3.0);
    const double forward = range_rate(sat, rx_pos, rx_vel);
    SatStateEcef mirrored = sat;
    mirrored.velocity_m_s = -sat.velocity_m_s;
    const double backward = range_rate(mirrored, rx_pos, -rx_vel);
    CHECK(backward == doctest::Approx(-forward).epsilon(1e-12));
}

namespace {

// Analytic circular-orbit trajectory in the rotating frame, with its exact
// derivative. Unlike SGP4 (whose published velocity is only cm/s-consistent
// with the derivative of its own positions), this is differentiable to
// machine precision, which is what a 1 ms finite-difference oracle needs.
SatStateEcef analytic_state(double t) {
    const double radius = 7.153e6;
    const double n = std::sqrt(3.986008e14 / (radius * radius * radius));
    const double incl = 86.4 * std::numbers::pi / 180.0;
    const double theta = n * t;
    const Vec3 r_inertial(radius * std::cos(theta), radius * std::sin(theta) * std::cos(incl),
                          radius * std::sin(theta) * std::sin(incl));
    const Vec3 v_inertial(-radius * n * std::sin(theta),
                          radius * n * std::cos(theta) * std::cos(incl),
                          radius * n * std::cos(theta) * std::sin(incl));
    const double w = earth_rotation_rad_s;
    const double c = std::cos(w * t), s = std::sin(w * t);
    SatStateEcef state;
    state.time_unix_s = t;
    state.position_m = Vec3(c * r_inertial.x + s * r_inertial.y,
                            -s * r_inertial.x + c * r_inertial.y, r_inertial.z);
    const Vec3 v_rot(c * v_inertial.x + s * v_inertial.y,
                     -s * v_inertial.x + c * v_inertial.y, v_inertial.z);
    state.velocity_m_s = v_rot - Vec3(0.0, 0.0, w).cross(state.position_m);
    return state;
}

}  // namespace

TEST_CASE("range_rate matches a 1 ms central finite difference along a pass") {
    const Vec3 rx = geodetic_to_ecef({37.7, -122.4, 20.0});
    const double delta = 1.0e-3;
    for (int k = 0; k <= 55; ++k) {
        const double t = 60.0 * k;
        const SatStateEcef now = analytic_state(t);
        const SatStateEcef before = analytic_state(t - delta);
        const SatStateEcef after = analytic_state(t + delta);
        const double fd = ((after.position_m - rx).norm() - (before.position_m - rx).norm()) /
                          (2.0 * delta);
        CHECK(std::fabs(range_rate(now, rx, Vec3{}) - fd) < 1.0e-3);
    }
}

TEST_CASE("range_rate tracks finite differences of SGP4 passes to its pos/vel consistency") {
    // SGP4's analytic velocity is the derivative of its position only to the
    // centimetre-per-second level, which bounds what an FD oracle can see.
    const TleRecord rec = test::test_constellation().front();
    const Vec3 rx = geodetic_to_ecef({37.7, -122.4, 20.0});
    const double delta = 1.0e-3;
    for (int k = 0; k <= 30; ++k) {
        const double t = rec.epoch_unix_s + 60.0 * k;
        const SatStateEcef now = propagate_to(rec, t);
        const double t_before = t - delta;
        const double t_after = t + delta;
        const SatStateEcef before = propagate_to(rec, t_before);
        const SatStateEcef after = propagate_to(rec, t_after);
        const double fd = ((after.position_m - rx).norm() - (before.position_m - rx).norm()) /
                          (t_after - t_before);
        CHECK(std::fabs(range_rate(now, rx, Vec3{}) - fd) < 0.03);
    }
}

TEST_CASE("range_rate rejects coincident geometry") {
    SatStateEcef sat;
    sat.position_m = Vec3(7.0e6, 0.0, 0.0);
    sat.velocity_m_s = Vec3(0.0, 7.5e3, 0.0);
    CHECK_THROWS_AS(range_rate(sat, Vec3(7.0e6, 0.0, 0.5), Vec3{}), SnapdopError);
}

TEST_CASE("elevation angle at zenith and the antipode") {
    const GeodeticPosition rx{37.7, -122.4, 0.0};
    const Vec3 zenith = geodetic_to_ecef({37.7, -122.4, 780.0e3});
    CHECK(elevation_angle(zenith, rx) == doctest::Approx(90.0).epsilon(1e-6));
    const Vec3 antipode = geodetic_to_ecef({-37.7, 57.6, 780.0e3});
    CHECK(elevation_angle(antipode, rx) < 0.0);
}

TEST_CASE("elevation angle agrees with a brute-force ENU construction") {
    // Independent construction: up is the ellipsoid normal written out from
    // its definition, east/north follow from cross products with the pole.
    Rng rng(777u);
    for (int k = 0; k < 200; ++k) {
        GeodeticPosition rx;
        rx.latitude_deg = -80.0 + 160.0 * rng.uniform();
        rx.longitude_deg = -179.0 + 358.0 * rng.uniform();
        rx.altitude_m = 500.0 * rng.uniform();
        const Vec3 sat = geodetic_to_ecef({-80.0 + 160.0 * rng.uniform(),
                                           -179.0 + 358.0 * rng.uniform(),
                                           400.0e3 + 1.0e6 * rng.uniform()});
        const double lat = rx.latitude_deg * std::numbers::pi / 180.0;
        const double lon = rx.longitude_deg * std::numbers::pi / 180.0;
        const Vec3 up(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                      std::sin(lat));
        const Vec3 east = Vec3(0.0, 0.0, 1.0).cross(up).unit();
        const Vec3 north = up.cross(east);
        const Vec3 los = sat - geodetic_to_ecef(rx);
        const double oracle =
            std::atan2(los.dot(up), std::hypot(los.dot(east), los.dot(north))) * 180.0 /
            std::numbers::pi;
        CHECK(std::fabs(elevation_angle(sat, rx) - oracle) < 1.0e-6);
    }
}

TEST_CASE("elevation angle agrees with a finite-difference ENU frame") {
    // Fully independent frame from differencing the forward conversion; the
    // chord/rounding trade-off bounds this oracle near 1e-5 degrees.
    Rng rng(778u);
    for (int k = 0; k < 50; ++k) {
        GeodeticPosition rx;
        rx.latitude_deg = -80.0 + 160.0 * rng.uniform();
        rx.longitude_deg = -179.0 + 358.0 * rng.uniform();
        rx.altitude_m = 500.0 * rng.uniform();
        const Vec3 sat = geodetic_to_ecef({-80.0 + 160.0 * rng.uniform(),
                                           -179.0 + 358.0 * rng.uniform(),
                                           400.0e3 + 1.0e6 * rng.uniform()});
        const double h = 1.0e-6;
        const Vec3 at = geodetic_to_ecef(rx);
        Vec3 up = geodetic_to_ecef({rx.latitude_deg, rx.longitude_deg, rx.altitude_m + 1.0});
        up = (up - at).unit();
        GeodeticPosition north_p = rx;
        north_p.latitude_deg += h;
        const Vec3 north = (geodetic_to_ecef(north_p) - at).unit();
        GeodeticPosition east_p = rx;
        east_p.longitude_deg += h;
        const Vec3 east = (geodetic_to_ecef(east_p) - at).unit();
        const Vec3 los = sat - at;
        const double oracle =
            std::atan2(los.dot(up), std::hypot(los.dot(east), los.dot(north))) * 180.0 /
            std::numbers::pi;
        CHECK(std::fabs(elevation_angle(sat, rx) - oracle) < 1.0e-5);
    }
}

TEST_CASE("horizontal error of identical points is zero") {
    const GeodeticPosition p{12.3, 45.6, 78.9};
    CHECK(horizontal_error(p, p) == 0.0);
}

TEST_CASE("one millidegree of latitude at the equator is 110.57 m") {
    // Meridian arc per degree from the WGS-84 constants:
    // M = a (1 - e^2) at the equator, 0.001 deg -> 110.574 m.
    const GeodeticPosition truth{0.0, 0.0, 0.0};
    const GeodeticPosition estimate{0.001, 0.0, 0.0};
    CHECK(horizontal_error(estimate, truth) == doctest::Approx(110.57).epsilon(0.001));
}

TEST_CASE("horizontal error ignores the vertical component") {
    const GeodeticPosition truth{10.0, 20.0, 0.0};
    const GeodeticPosition above{10.0, 20.0, 5000.0};
    CHECK(horizontal_error(above, truth) < 1.0e-6);
}

TEST_CASE("horizontal error is symmetric at short range") {
    Rng rng(31337u);
    for (int k = 0; k < 200; ++k) {
        GeodeticPosition a;
        a.latitude_deg = -60.0 + 120.0 * rng.uniform();
        a.longitude_deg = -179.0 + 358.0 * rng.uniform();
        a.altitude_m = 100.0 * rng.uniform();
        GeodeticPosition b = a;
        b.latitude_deg += (rng.uniform() - 0.5) * 0.8;   // up to ~44 km
        b.longitude_deg += (rng.uniform() - 0.5) * 0.5;
        const double ab = horizontal_error(a, b);
        const double ba = horizontal_error(b, a);
        if (ab > 1.0) {
            CHECK(std::fabs(ab - ba) / ab < 1.0e-6);
        }
    }
}

TEST_CASE("normalize_geodetic wraps longitude and reflects across the poles") {
    GeodeticPosition p = normalize_geodetic({91.0, 10.0, 0.0});
    CHECK(p.latitude_deg == doctest::Approx(89.0));
    CHECK(p.longitude_deg == doctest::Approx(-170.0));
    p = normalize_geodetic({45.0, 181.0, 0.0});
    CHECK(p.longitude_deg == doctest::Approx(-179.0));
    p = normalize_geodetic({45.0, -180.0, 0.0});
    CHECK(p.longitude_deg == doctest::Approx(180.0));
    CHECK_THROWS_AS(validate_geodetic({95.0, 0.0, 0.0}), SnapdopError);
    CHECK_THROWS_AS(validate_geodetic({0.0, 0.0, -5000.0}), SnapdopError);
}
