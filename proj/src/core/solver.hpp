#ifndef SNAPDOP_CORE_SOLVER_HPP
#define SNAPDOP_CORE_SOLVER_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/differential.hpp"
#include "core/doppler_model.hpp"
#include "core/observations.hpp"

namespace snapdop {

struct SolverOptions {
    int max_iterations = 50;
    double step_tolerance = 1.0e-8;    // scaled-parameter step norm
    double cost_tolerance = 1.0e-10;   // relative cost change
    double initial_damping = 1.0e-3;
    std::optional<double> fix_altitude_m;
    // One scaled unit per parameter: latitude/longitude 1e-5 deg, altitude
    // 100 m, clock offset 10 Hz, clock drift 0.1 Hz/s.
    std::array<double, 5> parameter_scales{1.0e-5, 1.0e-5, 100.0, 10.0, 0.1};
    std::optional<double> robust_loss_delta_hz;  // Huber loss when set
    std::map<std::string, double> station_sigma_hz;  // optional per-station weights
};

struct ResidualRow {
    int norad_id = 0;
    double time_unix_s = 0.0;
    double measured_doppler_hz = 0.0;
    double predicted_doppler_hz = 0.0;
    double residual_hz = 0.0;
};

struct SolveResult {
    StateVector state;
    bool converged = false;
    int iterations = 0;
    double final_rmse_hz = 0.0;
    std::vector<double> residuals;
    std::vector<ResidualRow> residual_rows;       // same order as residuals
    std::array<std::array<double, 5>, 5> covariance{};  // natural units, informational
    std::map<int, int> per_satellite_counts;
    double condition_estimate = 0.0;
    std::vector<std::string> warnings;
};

struct ZeroCrossing {
    enum class Method { Interpolated, Extrapolated };
    int norad_id = 0;
    double crossing_time_unix_s = 0.0;
    Method method = Method::Interpolated;
    GeodeticPosition sat_subpoint;
};

struct InitialEstimate {
    GeodeticPosition position;  // altitude 0
    std::vector<ZeroCrossing> crossings;
};

// Zero-Doppler initializer: per satellite, a least-squares line through
// Doppler vs time across all bursts gives the crossing instant; the estimate
// is the mean of the sub-satellite points at those instants (longitude via
// unit-vector mean), altitude 0. Crossings are clamped to the observed span
// +/- 600 s.
InitialEstimate initial_estimate(
    const std::map<int, std::vector<DopplerObservation>>& obs_by_satellite,
    const std::map<int, TleRecord>& ephemeris);

// Damped least squares over the scaled 5-parameter state (4 with the
// altitude fixed): damping x10 on a rejected step, /10 on an accepted one.
// Jacobian columns for the geodetic parameters come from central finite
// differences in scaled space; the clock columns are analytic.
SolveResult fit_state(const std::vector<DopplerObservation>& observations,
                      const std::map<int, TleRecord>& ephemeris, const StateVector& initial,
                      const SolverOptions& options = {});

SolveResult solve_standalone(const std::vector<DopplerObservation>& rover_observations,
                             const std::map<int, TleRecord>& ephemeris,
                             const SolverOptions& options = {});

struct DifferentialResult {
    SolveResult solve;
    CorrectionReport corrections;
    std::map<int, ErrorSeries> error_series;
};

// estimate_base_clock: treat the mean of e(t) across satellites as an
// undisciplined base clock offset and remove it from the corrections
// (off by default; the reference station is normally GPS-disciplined).
DifferentialResult solve_differential(const std::vector<DopplerObservation>& rover_observations,
                                      const std::vector<DopplerObservation>& base_observations,
                                      const StationMeta& base_station,
                                      const std::map<int, TleRecord>& ephemeris,
                                      const SolverOptions& options = {},
                                      double max_extrapolation_s = kDefaultMaxExtrapolationS,
                                      bool estimate_base_clock = false);

// "norad_id,time_unix_s,f_meas_hz,f_pred_hz,residual_hz" rows (Doppler, Hz).
std::string residuals_to_csv(const SolveResult& result);

}  // namespace snapdop

#endif
