#ifndef SNAPDOP_CORE_DIFFERENTIAL_HPP
#define SNAPDOP_CORE_DIFFERENTIAL_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/doppler_model.hpp"
#include "core/observations.hpp"

namespace snapdop {

// Per-satellite time series of base-station Doppler residuals e(t):
// measured minus theoretical minus base clock, at the known base position.
struct ErrorSeries {
    int norad_id = 0;
    std::vector<std::pair<double, double>> samples;  // (time_unix_s, error_hz), increasing
    std::string source_station;
};

struct BaseClockModel {
    double offset_hz = 0.0;
    double drift_hz_s = 0.0;
    double reference_epoch_unix_s = 0.0;

    double at(double t_unix_s) const {
        return offset_hz + drift_hz_s * (t_unix_s - reference_epoch_unix_s);
    }
};

inline constexpr double kDefaultMaxExtrapolationS = 10.0;

// e(t_i) = measured Doppler - predicted geometric Doppler at the known base
// position - f_clock_B(t_i), grouped per satellite and time-sorted.
std::map<int, ErrorSeries> compute_base_error_series(
    const std::vector<DopplerObservation>& base_observations, const StationMeta& base_station,
    const std::map<int, TleRecord>& ephemeris, const BaseClockModel& base_clock = {});

// Optional estimator for an undisciplined base clock: the mean of e across
// all satellites, treated as a constant offset. Off by default.
BaseClockModel estimate_base_clock_offset(const std::map<int, ErrorSeries>& series);

// Piecewise-linear interpolation; outside the sampled span but within
// max_extrapolation the nearest segment's slope extends the series. Throws
// OutOfCoverage beyond that.
double interpolate_error(const ErrorSeries& series, double t_unix_s,
                         double max_extrapolation_s);

struct CorrectionReport {
    struct Applied {
        std::size_t input_index;
        int norad_id;
        double time_unix_s;
        double correction_hz;
    };
    struct Skipped {
        std::size_t input_index;
        std::string reason;
    };
    std::vector<Applied> applied;
    std::vector<Skipped> skipped;  // uncorrectable rows, excluded from the output
};

// Subtracts the interpolated per-satellite base error from each rover
// measurement (f_corr = f_meas - e(t)). Uncorrectable observations are
// dropped and listed in the report; throws NoCommonSatellite when nothing
// is correctable.
std::pair<std::vector<DopplerObservation>, CorrectionReport> apply_corrections(
    const std::vector<DopplerObservation>& rover_observations,
    const std::map<int, ErrorSeries>& series_map,
    double max_extrapolation_s = kDefaultMaxExtrapolationS);

// "norad_id,time_unix_s,error_hz" rows for all series, full precision.
std::string error_series_to_csv(const std::map<int, ErrorSeries>& series_map);

}  // namespace snapdop

#endif
