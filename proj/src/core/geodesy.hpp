#ifndef SNAPDOP_CORE_GEODESY_HPP
#define SNAPDOP_CORE_GEODESY_HPP

#include "core/orbits.hpp"
#include "core/vec3.hpp"

namespace snapdop {

// WGS-84 ellipsoid.
namespace wgs84 {
inline constexpr double semi_major_axis_m = 6378137.0;
inline constexpr double flattening = 1.0 / 298.257223563;
inline constexpr double semi_minor_axis_m = semi_major_axis_m * (1.0 - flattening);
inline constexpr double ecc_sq = flattening * (2.0 - flattening);
}  // namespace wgs84

struct GeodeticPosition {
    double latitude_deg = 0.0;   // [-90, +90]
    double longitude_deg = 0.0;  // (-180, +180]
    double altitude_m = 0.0;     // above the WGS-84 ellipsoid
};

// Throws InvariantViolation when the fields are out of range.
void validate_geodetic(const GeodeticPosition& p);

// Wraps longitude to (-180, 180] and reflects latitude excursions across the
// poles (used by the solver when steps cross a pole or the date line).
GeodeticPosition normalize_geodetic(GeodeticPosition p);

Vec3 geodetic_to_ecef(const GeodeticPosition& p);

// Inverse conversion; throws DegenerateInput within 100 km of the geocenter.
// At the poles the longitude is reported as 0 by convention.
GeodeticPosition ecef_to_geodetic(const Vec3& v);

// East/north/up components of an ECEF delta vector in the local frame at the
// given geodetic point.
Vec3 ecef_to_enu(const GeodeticPosition& at, const Vec3& ecef_delta);

// d|r_sat - r_rx|/dt, meters/second, positive when receding. Throws
// DegenerateGeometry when the separation is <= 1 m.
double range_rate(const SatStateEcef& sat, const Vec3& rx_pos_m, const Vec3& rx_vel_m_s);

// Line-of-sight angle above the local ellipsoidal horizon, degrees in [-90, 90].
double elevation_angle(const Vec3& sat_pos_m, const GeodeticPosition& rx);

// Norm of the east/north components of (estimate - truth) in the ENU frame at
// the truth point; the vertical component is excluded.
double horizontal_error(const GeodeticPosition& estimate, const GeodeticPosition& truth);

}  // namespace snapdop

#endif
