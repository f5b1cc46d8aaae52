#include "core/differential.hpp"

#include <algorithm>
#include <cmath>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace snapdop {

std::map<int, ErrorSeries> compute_base_error_series(
    const std::vector<DopplerObservation>& base_observations, const StationMeta& base_station,
    const std::map<int, TleRecord>& ephemeris, const BaseClockModel& base_clock) {
    if (base_station.role != StationRole::Base || !base_station.known_position) {
        raise(ErrorCode::UnknownBasePosition,
              "station '" + base_station.station_id + "' is not a base with a known position");
    }
    StateVector zero_clock;
    zero_clock.latitude_deg = base_station.known_position->latitude_deg;
    zero_clock.longitude_deg = base_station.known_position->longitude_deg;
    zero_clock.altitude_m = base_station.known_position->altitude_m;
    const Vec3 base_ecef = geodetic_to_ecef(*base_station.known_position);

    std::map<int, ErrorSeries> out;
    for (const auto& obs : base_observations) {
        if (!obs.matched()) {
            raise(ErrorCode::UnmatchedObservation,
                  "compute_base_error_series: unmatched base observation at t=" +
                      std::to_string(obs.time_unix_s));
        }
        const auto it = ephemeris.find(*obs.norad_id);
        if (it == ephemeris.end()) {
            raise(ErrorCode::MissingEphemeris,
                  "compute_base_error_series: no TLE for satellite " +
                      std::to_string(*obs.norad_id));
        }
        const SatStateEcef sat = propagate_to(it->second, obs.time_unix_s);
        const double theoretical = predict_doppler_at(sat, base_ecef, zero_clock,
                                                      obs.base_frequency_hz, obs.time_unix_s);
        const double error = obs.doppler_hz() - theoretical - base_clock.at(obs.time_unix_s);
        ErrorSeries& series = out[*obs.norad_id];
        series.norad_id = *obs.norad_id;
        series.source_station = base_station.station_id;
        series.samples.emplace_back(obs.time_unix_s, error);
    }
    for (auto& [norad, series] : out) {
        std::stable_sort(series.samples.begin(), series.samples.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        // Keep the first of any exactly duplicated timestamps.
        series.samples.erase(std::unique(series.samples.begin(), series.samples.end(),
                                         [](const auto& a, const auto& b) {
                                             return a.first == b.first;
                                         }),
                             series.samples.end());
    }
    return out;
}

BaseClockModel estimate_base_clock_offset(const std::map<int, ErrorSeries>& series_map) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [norad, series] : series_map) {
        for (const auto& [t, e] : series.samples) {
            sum += e;
            ++count;
        }
    }
    if (count == 0) {
        raise(ErrorCode::EmptyInput, "estimate_base_clock_offset: no error samples");
    }
    BaseClockModel model;
    model.offset_hz = sum / static_cast<double>(count);
    return model;
}

double interpolate_error(const ErrorSeries& series, double t_unix_s,
                         double max_extrapolation_s) {
    if (series.samples.empty()) {
        raise(ErrorCode::EmptyInput, "interpolate_error: empty series");
    }
    if (max_extrapolation_s < 0.0) {
        raise(ErrorCode::InvalidArgument, "interpolate_error: negative max_extrapolation");
    }
    const auto& samples = series.samples;
    const double first_t = samples.front().first;
    const double last_t = samples.back().first;
    if (t_unix_s < first_t - max_extrapolation_s || t_unix_s > last_t + max_extrapolation_s) {
        raise(ErrorCode::OutOfCoverage,
              "interpolate_error: t=" + std::to_string(t_unix_s) + " outside [" +
                  std::to_string(first_t) + ", " + std::to_string(last_t) + "] + " +
                  std::to_string(max_extrapolation_s) + " s for satellite " +
                  std::to_string(series.norad_id));
    }
    if (samples.size() == 1) {
        return samples.front().second;
    }
    // Pick the segment: interior bracketing pair, or the nearest edge segment
    // when extrapolating.
    std::size_t hi = 1;
    if (t_unix_s >= last_t) {
        hi = samples.size() - 1;
    } else if (t_unix_s > first_t) {
        hi = static_cast<std::size_t>(
            std::lower_bound(samples.begin(), samples.end(), t_unix_s,
                             [](const auto& sample, double value) {
                                 return sample.first < value;
                             }) -
            samples.begin());
        if (hi == 0) hi = 1;
    }
    const auto& [t0, e0] = samples[hi - 1];
    const auto& [t1, e1] = samples[hi];
    const double w = (t_unix_s - t0) / (t1 - t0);
    return e0 + w * (e1 - e0);
}

std::pair<std::vector<DopplerObservation>, CorrectionReport> apply_corrections(
    const std::vector<DopplerObservation>& rover_observations,
    const std::map<int, ErrorSeries>& series_map, double max_extrapolation_s) {
    std::vector<DopplerObservation> corrected;
    CorrectionReport report;
    corrected.reserve(rover_observations.size());
    for (std::size_t i = 0; i < rover_observations.size(); ++i) {
        const auto& obs = rover_observations[i];
        if (!obs.matched()) {
            report.skipped.push_back({i, "unmatched observation"});
            continue;
        }
        const auto it = series_map.find(*obs.norad_id);
        if (it == series_map.end()) {
            report.skipped.push_back(
                {i, "no common satellite " + std::to_string(*obs.norad_id) +
                        " in the base error series"});
            continue;
        }
        double correction = 0.0;
        try {
            correction = interpolate_error(it->second, obs.time_unix_s, max_extrapolation_s);
        } catch (const SnapdopError& err) {
            report.skipped.push_back({i, err.what()});
            continue;
        }
        DopplerObservation fixed = obs;
        fixed.measured_frequency_hz -= correction;
        corrected.push_back(std::move(fixed));
        report.applied.push_back({i, *obs.norad_id, obs.time_unix_s, correction});
    }
    if (corrected.empty()) {
        raise(ErrorCode::NoCommonSatellite,
              "apply_corrections: no rover observation could be corrected (" +
                  std::to_string(report.skipped.size()) + " skipped)");
    }
    return {std::move(corrected), std::move(report)};
}

std::string error_series_to_csv(const std::map<int, ErrorSeries>& series_map) {
    std::string out = "norad_id,time_unix_s,error_hz\n";
    for (const auto& [norad, series] : series_map) {
        for (const auto& [t, e] : series.samples) {
            out += std::to_string(norad);
            out += ',';
            out += csv::format_double(t);
            out += ',';
            out += csv::format_double(e);
            out += '\n';
        }
    }
    return out;
}

}  // namespace snapdop
