#include "core/geodesy.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/errors.hpp"

namespace snapdop {

namespace {
constexpr double deg2rad = std::numbers::pi / 180.0;
constexpr double rad2deg = 180.0 / std::numbers::pi;
}  // namespace

void validate_geodetic(const GeodeticPosition& p) {
    if (!(p.latitude_deg >= -90.0 && p.latitude_deg <= 90.0)) {
        raise(ErrorCode::InvariantViolation,
              "latitude " + std::to_string(p.latitude_deg) + " outside [-90, 90]");
    }
    if (!(p.longitude_deg > -180.0 && p.longitude_deg <= 180.0)) {
        raise(ErrorCode::InvariantViolation,
              "longitude " + std::to_string(p.longitude_deg) + " outside (-180, 180]");
    }
    if (!(p.altitude_m >= -1000.0 && p.altitude_m <= 1.0e7)) {
        raise(ErrorCode::InvariantViolation,
              "altitude " + std::to_string(p.altitude_m) + " outside [-1000, 1e7] m");
    }
}

GeodeticPosition normalize_geodetic(GeodeticPosition p) {
    double lat = std::fmod(p.latitude_deg, 360.0);
    double lon = p.longitude_deg;
    if (lat > 180.0) lat -= 360.0;
    if (lat < -180.0) lat += 360.0;
    if (lat > 90.0) {
        lat = 180.0 - lat;
        lon += 180.0;
    } else if (lat < -90.0) {
        lat = -180.0 - lat;
        lon += 180.0;
    }
    lon = std::fmod(lon, 360.0);
    if (lon > 180.0) lon -= 360.0;
    if (lon <= -180.0) lon += 360.0;
    p.latitude_deg = lat;
    p.longitude_deg = lon;
    return p;
}

Vec3 geodetic_to_ecef(const GeodeticPosition& p) {
    const double lat = p.latitude_deg * deg2rad;
    const double lon = p.longitude_deg * deg2rad;
    const double sin_lat = std::sin(lat);
    const double cos_lat = std::cos(lat);
    const double n = wgs84::semi_major_axis_m /
                     std::sqrt(1.0 - wgs84::ecc_sq * sin_lat * sin_lat);
    return {(n + p.altitude_m) * cos_lat * std::cos(lon),
            (n + p.altitude_m) * cos_lat * std::sin(lon),
            (n * (1.0 - wgs84::ecc_sq) + p.altitude_m) * sin_lat};
}

GeodeticPosition ecef_to_geodetic(const Vec3& v) {
    const double norm = v.norm();
    if (norm <= 1.0e5) {
        raise(ErrorCode::DegenerateInput,
              "ecef_to_geodetic: point within 100 km of the geocenter");
    }
    const double a = wgs84::semi_major_axis_m;
    const double b = wgs84::semi_minor_axis_m;
    const double e2 = wgs84::ecc_sq;
    const double ep2 = e2 / (1.0 - e2);

    const double p = std::hypot(v.x, v.y);
    GeodeticPosition out;
    if (p < 1.0e-6) {
        // On the polar axis; longitude 0 by convention.
        out.latitude_deg = v.z >= 0.0 ? 90.0 : -90.0;
        out.longitude_deg = 0.0;
        out.altitude_m = std::fabs(v.z) - b;
        return out;
    }
    out.longitude_deg = std::atan2(v.y, v.x) * rad2deg;
    if (out.longitude_deg <= -180.0) out.longitude_deg += 360.0;

    // Bowring's parametric-latitude iteration; three rounds land well below
    // the micrometre level for any point of interest here.
    double beta = std::atan2(v.z * a, p * b);
    double lat = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double sin_beta = std::sin(beta);
        const double cos_beta = std::cos(beta);
        lat = std::atan2(v.z + ep2 * b * sin_beta * sin_beta * sin_beta,
                         p - e2 * a * cos_beta * cos_beta * cos_beta);
        beta = std::atan2((1.0 - wgs84::flattening) * std::sin(lat), std::cos(lat));
    }
    const double sin_lat = std::sin(lat);
    const double cos_lat = std::cos(lat);
    const double n = a / std::sqrt(1.0 - e2 * sin_lat * sin_lat);
    double alt;
    if (std::fabs(lat) < 80.0 * deg2rad) {
        alt = p / cos_lat - n;
    } else {
        alt = v.z / sin_lat - n * (1.0 - e2);
    }
    out.latitude_deg = lat * rad2deg;
    out.altitude_m = alt;
    return out;
}

Vec3 ecef_to_enu(const GeodeticPosition& at, const Vec3& d) {
    const double lat = at.latitude_deg * deg2rad;
    const double lon = at.longitude_deg * deg2rad;
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double so = std::sin(lon), co = std::cos(lon);
    return {-so * d.x + co * d.y,
            -sl * co * d.x - sl * so * d.y + cl * d.z,
            cl * co * d.x + cl * so * d.y + sl * d.z};
}

double range_rate(const SatStateEcef& sat, const Vec3& rx_pos_m, const Vec3& rx_vel_m_s) {
    const Vec3 dr = sat.position_m - rx_pos_m;
    const double separation = dr.norm();
    if (separation <= 1.0) {
        raise(ErrorCode::DegenerateGeometry,
              "range_rate: satellite/receiver separation <= 1 m");
    }
    const Vec3 dv = sat.velocity_m_s - rx_vel_m_s;
    return dr.dot(dv) / separation;
}

double elevation_angle(const Vec3& sat_pos_m, const GeodeticPosition& rx) {
    const Vec3 rx_ecef = geodetic_to_ecef(rx);
    const Vec3 enu = ecef_to_enu(rx, sat_pos_m - rx_ecef);
    const double horizontal = std::hypot(enu.x, enu.y);
    return std::atan2(enu.z, horizontal) * rad2deg;
}

double horizontal_error(const GeodeticPosition& estimate, const GeodeticPosition& truth) {
    const Vec3 delta = geodetic_to_ecef(estimate) - geodetic_to_ecef(truth);
    const Vec3 enu = ecef_to_enu(truth, delta);
    return std::hypot(enu.x, enu.y);
}

}  // namespace snapdop
