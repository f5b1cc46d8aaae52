#ifndef SNAPDOP_CORE_SGP4_HPP
#define SNAPDOP_CORE_SGP4_HPP

#include "core/tle.hpp"
#include "core/vec3.hpp"

namespace snapdop::sgp4 {

// WGS-72 gravity constants, the set that gives TLE mean elements their
// standard semantics.
namespace grav {
inline constexpr double mu_km3_s2 = 398600.8;
inline constexpr double earth_radius_km = 6378.135;
inline constexpr double j2 = 0.001082616;
inline constexpr double j3 = -0.00000253881;
inline constexpr double j4 = -0.00000165597;
inline constexpr double j3oj2 = j3 / j2;
const double xke = 60.0 / std::sqrt(earth_radius_km * earth_radius_km *
                                    earth_radius_km / mu_km3_s2);
const double tumin = 1.0 / xke;
}  // namespace grav

// Initialized propagation constants for one near-Earth satellite.
// Deep-space orbits (period >= 225 min) are rejected at init.
struct Elements {
    double epoch_unix_s = 0.0;
    double bstar = 0.0;
    double ecco = 0.0, inclo = 0.0, nodeo = 0.0, argpo = 0.0, mo = 0.0;
    double no_kozai = 0.0, no_unkozai = 0.0;
    double a = 0.0, alta = 0.0, altp = 0.0;

    bool isimp = false;
    double con41 = 0.0, x1mth2 = 0.0, x7thm1 = 0.0;
    double cc1 = 0.0, cc4 = 0.0, cc5 = 0.0;
    double d2 = 0.0, d3 = 0.0, d4 = 0.0;
    double t2cof = 0.0, t3cof = 0.0, t4cof = 0.0, t5cof = 0.0;
    double mdot = 0.0, argpdot = 0.0, nodedot = 0.0, nodecf = 0.0;
    double omgcof = 0.0, xmcof = 0.0, xlcof = 0.0, aycof = 0.0;
    double eta = 0.0, delmo = 0.0, sinmao = 0.0;
};

Elements initialize(const TleRecord& record);

// Mean-element propagation to tsince minutes after epoch; output is the TEME
// state in kilometers and kilometers/second.
void propagate(const Elements& elements, double tsince_min, Vec3& position_km,
               Vec3& velocity_km_s);

// IAU-1982 Greenwich mean sidereal time, wrapped to [0, 2*pi).
double gstime(double julian_date_ut1);

// Same polynomial evaluated from Julian centuries since J2000 directly;
// avoids the precision loss of carrying a full Julian date in one double.
double gstime_from_tut1(double julian_centuries_ut1);

}  // namespace snapdop::sgp4

#endif
