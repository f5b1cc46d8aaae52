#ifndef SNAPDOP_CORE_ORBITS_HPP
#define SNAPDOP_CORE_ORBITS_HPP

#include <vector>

#include "core/sgp4.hpp"
#include "core/tle.hpp"
#include "core/vec3.hpp"

namespace snapdop {

// Earth rotation rate used for the TEME->ECEF velocity cross term: the time
// derivative of the IAU-1982 GMST, so velocities stay consistent with the
// GMST-only frame rotation.
inline constexpr double earth_rotation_rad_s =
    (876600.0 * 3600.0 + 8640184.812866) / (86400.0 * 36525.0) *
    (3.14159265358979323846 / 43200.0);

// Default staleness limit for propagation requests, seconds (7 days).
inline constexpr double default_staleness_limit_s = 7.0 * 86400.0;

struct SatStateEcef {
    double time_unix_s = 0.0;
    Vec3 position_m;      // ECEF meters
    Vec3 velocity_m_s;    // ECEF meters/second
};

// Same layout, quasi-inertial TEME frame (used for propagator verification
// and energy checks).
struct SatStateTeme {
    double time_unix_s = 0.0;
    Vec3 position_m;
    Vec3 velocity_m_s;
};

// IAU-1982 Greenwich mean sidereal time at a UTC instant, radians in [0, 2*pi).
double gmst(double time_unix_s);

SatStateTeme propagate_teme(const TleRecord& tle, double time_unix_s,
                            double staleness_limit_s = default_staleness_limit_s);

SatStateEcef teme_to_ecef(const SatStateTeme& state);

SatStateEcef propagate_to(const TleRecord& tle, double time_unix_s,
                          double staleness_limit_s = default_staleness_limit_s);

// Samples at t0, t0+step, ... with the final sample <= t1.
std::vector<SatStateEcef> propagate_series(const TleRecord& tle, double t0_unix_s,
                                           double t1_unix_s, double step_s,
                                           double staleness_limit_s = default_staleness_limit_s);

// Holds the initialized propagation constants so repeated queries for one
// satellite skip re-initialization.
class Propagator {
public:
    explicit Propagator(const TleRecord& tle)
        : tle_(tle), elements_(sgp4::initialize(tle)) {}

    const TleRecord& record() const { return tle_; }

    SatStateTeme teme_at(double time_unix_s,
                         double staleness_limit_s = default_staleness_limit_s) const;
    SatStateEcef ecef_at(double time_unix_s,
                         double staleness_limit_s = default_staleness_limit_s) const;

private:
    TleRecord tle_;
    sgp4::Elements elements_;
};

}  // namespace snapdop

#endif
