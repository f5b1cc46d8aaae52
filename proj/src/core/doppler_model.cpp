#include "core/doppler_model.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace snapdop {

void validate_state(const StateVector& state) {
    validate_geodetic(state.position());
    if (!(std::fabs(state.clock_offset_hz) < 1.0e6)) {
        raise(ErrorCode::InvariantViolation, "clock offset magnitude must be below 1e6 Hz");
    }
    if (!(std::fabs(state.clock_drift_hz_s) < 1.0e3)) {
        raise(ErrorCode::InvariantViolation, "clock drift magnitude must be below 1e3 Hz/s");
    }
}

std::map<int, TleRecord> ephemeris_from_tles(const std::vector<TleRecord>& tles) {
    std::map<int, TleRecord> out;
    for (const auto& tle : tles) {
        out.insert_or_assign(tle.norad_id, tle);
    }
    return out;
}

double predict_doppler_at(const SatStateEcef& sat, const Vec3& rx_ecef_m,
                          const StateVector& state, double f_b_hz, double t_unix_s) {
    const double rho_dot = range_rate(sat, rx_ecef_m, Vec3{});
    return -(f_b_hz / constants::speed_of_light_m_s) * rho_dot + state.clock_offset_hz +
           state.clock_drift_hz_s * (t_unix_s - state.reference_epoch_unix_s);
}

double predict_doppler(const SatStateEcef& sat, const StateVector& state, double f_b_hz,
                       double t_unix_s) {
    validate_state(state);
    return predict_doppler_at(sat, geodetic_to_ecef(state.position()), state, f_b_hz,
                              t_unix_s);
}

std::vector<double> residual_vector(const StateVector& state,
                                    const std::vector<DopplerObservation>& observations,
                                    const std::map<int, TleRecord>& ephemeris) {
    validate_state(state);
    const Vec3 rx_ecef = geodetic_to_ecef(state.position());
    std::vector<double> residuals;
    residuals.reserve(observations.size());
    for (const auto& obs : observations) {
        if (!obs.matched()) {
            raise(ErrorCode::UnmatchedObservation,
                  "residual_vector: observation at t=" + std::to_string(obs.time_unix_s) +
                      " has no satellite identity");
        }
        const auto it = ephemeris.find(*obs.norad_id);
        if (it == ephemeris.end()) {
            raise(ErrorCode::MissingEphemeris,
                  "residual_vector: no TLE for satellite " + std::to_string(*obs.norad_id));
        }
        const SatStateEcef sat = propagate_to(it->second, obs.time_unix_s);
        residuals.push_back(obs.doppler_hz() - predict_doppler_at(sat, rx_ecef, state,
                                                                  obs.base_frequency_hz,
                                                                  obs.time_unix_s));
    }
    return residuals;
}

double doppler_rmse(const std::vector<double>& residuals_hz) {
    if (residuals_hz.empty()) {
        raise(ErrorCode::EmptyInput, "doppler_rmse: empty residual list");
    }
    double sum_sq = 0.0;
    for (double r : residuals_hz) sum_sq += r * r;
    return std::sqrt(sum_sq / static_cast<double>(residuals_hz.size()));
}

}  // namespace snapdop
