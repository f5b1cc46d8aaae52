#include "core/orbits.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/sgp4.hpp"
#include "core/time_utils.hpp"

namespace snapdop {

double gmst(double time_unix_s) {
    if (time_unix_s < time_utils::unix_from_civil(1957, 1, 1, 0, 0, 0.0) ||
        time_unix_s > time_utils::unix_from_civil(2100, 1, 1, 0, 0, 0.0)) {
        raise(ErrorCode::InvalidArgument, "gmst: instant outside supported years 1957-2100");
    }
    // Centuries since J2000 computed in seconds to dodge Julian-date rounding.
    constexpr double j2000_unix = 946728000.0;
    return sgp4::gstime_from_tut1((time_unix_s - j2000_unix) / (86400.0 * 36525.0));
}

SatStateTeme propagate_teme(const TleRecord& tle, double time_unix_s,
                            double staleness_limit_s) {
    const double elapsed = time_utils::elapsed_seconds(tle.epoch_unix_s, time_unix_s);
    if (std::fabs(elapsed) > staleness_limit_s) {
        raise(ErrorCode::StaleEpoch,
              "satellite " + std::to_string(tle.norad_id) + ": requested instant is " +
                  std::to_string(std::fabs(elapsed) / 86400.0) +
                  " days from the TLE epoch (limit " +
                  std::to_string(staleness_limit_s / 86400.0) + " days)");
    }
    const sgp4::Elements elements = sgp4::initialize(tle);
    Vec3 r_km, v_km_s;
    sgp4::propagate(elements, elapsed / 60.0, r_km, v_km_s);
    SatStateTeme state;
    state.time_unix_s = time_unix_s;
    state.position_m = r_km * 1000.0;
    state.velocity_m_s = v_km_s * 1000.0;
    return state;
}

SatStateEcef teme_to_ecef(const SatStateTeme& state) {
    const double theta = gmst(state.time_unix_s);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Vec3& rt = state.position_m;
    const Vec3& vt = state.velocity_m_s;
    // R3(gmst) rotation into the pseudo-Earth-fixed frame; the velocity picks
    // up the frame-rotation cross term.
    SatStateEcef out;
    out.time_unix_s = state.time_unix_s;
    out.position_m = Vec3(c * rt.x + s * rt.y, -s * rt.x + c * rt.y, rt.z);
    const Vec3 v_rot(c * vt.x + s * vt.y, -s * vt.x + c * vt.y, vt.z);
    const Vec3 omega(0.0, 0.0, earth_rotation_rad_s);
    out.velocity_m_s = v_rot - omega.cross(out.position_m);
    return out;
}

SatStateEcef propagate_to(const TleRecord& tle, double time_unix_s,
                          double staleness_limit_s) {
    return teme_to_ecef(propagate_teme(tle, time_unix_s, staleness_limit_s));
}

SatStateTeme Propagator::teme_at(double time_unix_s, double staleness_limit_s) const {
    const double elapsed = time_utils::elapsed_seconds(tle_.epoch_unix_s, time_unix_s);
    if (std::fabs(elapsed) > staleness_limit_s) {
        raise(ErrorCode::StaleEpoch,
              "satellite " + std::to_string(tle_.norad_id) +
                  ": requested instant exceeds the staleness limit");
    }
    Vec3 r_km, v_km_s;
    sgp4::propagate(elements_, elapsed / 60.0, r_km, v_km_s);
    SatStateTeme state;
    state.time_unix_s = time_unix_s;
    state.position_m = r_km * 1000.0;
    state.velocity_m_s = v_km_s * 1000.0;
    return state;
}

SatStateEcef Propagator::ecef_at(double time_unix_s, double staleness_limit_s) const {
    return teme_to_ecef(teme_at(time_unix_s, staleness_limit_s));
}

std::vector<SatStateEcef> propagate_series(const TleRecord& tle, double t0_unix_s,
                                           double t1_unix_s, double step_s,
                                           double staleness_limit_s) {
    if (!(t0_unix_s < t1_unix_s)) {
        raise(ErrorCode::InvalidArgument, "propagate_series: t0 must precede t1");
    }
    if (!(step_s > 0.0)) {
        raise(ErrorCode::InvalidArgument, "propagate_series: step must be positive");
    }
    // Initialize once; per-sample propagation shares the elements.
    const double first_elapsed = time_utils::elapsed_seconds(tle.epoch_unix_s, t0_unix_s);
    const double last_elapsed = time_utils::elapsed_seconds(tle.epoch_unix_s, t1_unix_s);
    if (std::fabs(first_elapsed) > staleness_limit_s ||
        std::fabs(last_elapsed) > staleness_limit_s) {
        raise(ErrorCode::StaleEpoch,
              "satellite " + std::to_string(tle.norad_id) +
                  ": series extends beyond the staleness limit");
    }
    const sgp4::Elements elements = sgp4::initialize(tle);

    const std::size_t count =
        static_cast<std::size_t>(std::floor((t1_unix_s - t0_unix_s) / step_s + 1e-9)) + 1;
    std::vector<SatStateEcef> series;
    series.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = t0_unix_s + static_cast<double>(i) * step_s;
        const double elapsed = time_utils::elapsed_seconds(tle.epoch_unix_s, t);
        Vec3 r_km, v_km_s;
        sgp4::propagate(elements, elapsed / 60.0, r_km, v_km_s);
        SatStateTeme teme;
        teme.time_unix_s = t;
        teme.position_m = r_km * 1000.0;
        teme.velocity_m_s = v_km_s * 1000.0;
        series.push_back(teme_to_ecef(teme));
    }
    return series;
}

}  // namespace snapdop
