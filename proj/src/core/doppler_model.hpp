#ifndef SNAPDOP_CORE_DOPPLER_MODEL_HPP
#define SNAPDOP_CORE_DOPPLER_MODEL_HPP

#include <map>
#include <vector>

#include "core/geodesy.hpp"
#include "core/observations.hpp"
#include "core/orbits.hpp"
#include "core/tle.hpp"

namespace snapdop {

namespace constants {
inline constexpr double speed_of_light_m_s = 299792458.0;
inline constexpr double default_base_frequency_hz = 1.626e9;
}  // namespace constants

// The 5-parameter unknown: geodetic position plus receiver clock offset and
// linear drift. Clock terms are referenced to reference_epoch_unix_s.
struct StateVector {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double altitude_m = 0.0;
    double clock_offset_hz = 0.0;    // f_O
    double clock_drift_hz_s = 0.0;   // f_O-dot
    double reference_epoch_unix_s = 0.0;

    GeodeticPosition position() const {
        return {latitude_deg, longitude_deg, altitude_m};
    }
};

void validate_state(const StateVector& state);

std::map<int, TleRecord> ephemeris_from_tles(const std::vector<TleRecord>& tles);

// Predicted Doppler shift for a static receiver at the state's position:
//   f_D = -(f_B / c) * range_rate + f_O + f_O_dot * (t - t_ref)
// The sign makes an approaching satellite (negative range rate) produce a
// positive Doppler shift.
double predict_doppler(const SatStateEcef& sat, const StateVector& state, double f_b_hz,
                       double t_unix_s);

// Hot-path variant with the receiver ECEF position precomputed.
double predict_doppler_at(const SatStateEcef& sat, const Vec3& rx_ecef_m,
                          const StateVector& state, double f_b_hz, double t_unix_s);

// Element i = measured Doppler of observation i minus the model prediction at
// the observation's satellite and timestamp; order matches the input.
std::vector<double> residual_vector(const StateVector& state,
                                    const std::vector<DopplerObservation>& observations,
                                    const std::map<int, TleRecord>& ephemeris);

// Root mean square; throws EmptyInput for an empty list.
double doppler_rmse(const std::vector<double>& residuals_hz);

}  // namespace snapdop

#endif
