#include "core/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <set>
#include <thread>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/time_utils.hpp"

namespace snapdop {

namespace {

constexpr double deg2rad = std::numbers::pi / 180.0;
constexpr double kTruthSeriesStepS = 10.0;

// Stream tags so toggling one noise source never shifts another's draws.
enum StreamTag : std::uint64_t {
    kStreamPerturbation = 1,
    kStreamBaseNoise = 2,
    kStreamRoverNoise = 3,
    kStreamRoverClock = 4,
    kStreamBaseClock = 5,
    kStreamJitter = 6,
};

Vec3 rodrigues_rotate(const Vec3& v, const Vec3& unit_axis, double angle_rad) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    return v * c + unit_axis.cross(v) * s + unit_axis * (unit_axis.dot(v) * (1.0 - c));
}

struct StationFrame {
    Vec3 ecef;
    Vec3 east, north, up;
};

StationFrame make_station_frame(const GeodeticPosition& p) {
    StationFrame frame;
    frame.ecef = geodetic_to_ecef(p);
    const double lat = p.latitude_deg * deg2rad;
    const double lon = p.longitude_deg * deg2rad;
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double so = std::sin(lon), co = std::cos(lon);
    frame.east = {-so, co, 0.0};
    frame.north = {-sl * co, -sl * so, cl};
    frame.up = {cl * co, cl * so, sl};
    return frame;
}

double elevation_at(const StationFrame& frame, const Vec3& sat_pos) {
    const Vec3 d = sat_pos - frame.ecef;
    return std::asin(frame.up.dot(d) / d.norm()) / deg2rad;
}

double wrap_deg(double x) {
    x = std::fmod(x, 360.0);
    if (x < 0.0) x += 360.0;
    return x;
}

}  // namespace

void validate_config(const ScenarioConfig& config) {
    auto fail = [](const std::string& field, const std::string& why) {
        raise(ErrorCode::ConfigError, "config field '" + field + "': " + why);
    };
    try {
        validate_geodetic(config.rover_truth);
    } catch (const SnapdopError& e) {
        fail("rover_truth", e.what());
    }
    try {
        validate_geodetic(config.base_position);
    } catch (const SnapdopError& e) {
        fail("base_position", e.what());
    }
    if (config.tle_set.empty()) fail("tle_set", "must contain at least one TLE");
    if (!(config.window_duration_s > 0.0)) fail("window.duration_s", "must be positive");
    if (!(config.rover_burst.duration_s > 0.0)) fail("rover_burst.duration_s", "must be positive");
    if (!(config.rover_burst.period_s > 0.0)) fail("rover_burst.period_s", "must be positive");
    if (!(config.rover_burst.duration_s < config.rover_burst.period_s)) {
        fail("rover_burst.duration_s", "burst duration must be less than the burst period");
    }
    if (!(config.rover_burst.intra_burst_sample_period_s > 0.0)) {
        fail("rover_burst.intra_burst_sample_period_s", "must be positive");
    }
    if (config.rover_burst.jitter_fraction < 0.0 || config.rover_burst.jitter_fraction > 0.5) {
        fail("rover_burst.jitter_fraction", "must be within [0, 0.5]");
    }
    if (!(config.base_sample_period_s > 0.0)) fail("base_sampling.sample_period_s", "must be positive");
    if (!(config.f_b_hz > 0.0)) fail("f_b_hz", "must be positive");
    if (config.noise.base_sigma_hz < 0.0) fail("noise.base_sigma_hz", "must be >= 0");
    if (config.noise.rover_sigma_hz < 0.0) fail("noise.rover_sigma_hz", "must be >= 0");
    if (config.rover_clock.random_walk_hz_sqrt_s < 0.0) {
        fail("rover_clock.random_walk_hz_per_sqrt_s", "must be >= 0");
    }
    if (config.base_clock.random_walk_hz_sqrt_s < 0.0) {
        fail("base_clock.random_walk_hz_per_sqrt_s", "must be >= 0");
    }
    if (config.ephemeris_perturbation.along_track_m < 0.0 ||
        config.ephemeris_perturbation.cross_track_m < 0.0 ||
        config.ephemeris_perturbation.radial_m < 0.0) {
        fail("ephemeris_perturbation", "scales must be >= 0");
    }
    if (config.elevation_mask_deg < 0.0 || config.elevation_mask_deg >= 90.0) {
        fail("elevation_mask_deg", "must be within [0, 90)");
    }
    if (config.min_common_satellites < 1) fail("min_common_satellites", "must be >= 1");
}

double ClockTruth::at(double t_unix_s) const {
    double value = offset_hz + drift_hz_s * (t_unix_s - reference_unix_s);
    if (random_walk.empty()) return value;
    const auto it = std::lower_bound(random_walk.begin(), random_walk.end(), t_unix_s,
                                     [](const auto& sample, double t) {
                                         return sample.first < t;
                                     });
    if (it == random_walk.begin()) {
        value += it->second;
    } else if (it == random_walk.end()) {
        value += random_walk.back().second;
    } else if (it->first == t_unix_s) {
        value += it->second;
    } else {
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (t_unix_s - lo.first) / (hi.first - lo.first);
        value += lo.second + w * (hi.second - lo.second);
    }
    return value;
}

std::vector<SatStateEcef> perturb_ephemeris(const std::vector<SatStateEcef>& true_series,
                                            const RtnOffset& offsets) {
    if (true_series.empty()) {
        raise(ErrorCode::EmptyInput, "perturb_ephemeris: empty series");
    }
    const Vec3 omega(0.0, 0.0, earth_rotation_rad_s);
    std::vector<SatStateEcef> out;
    out.reserve(true_series.size());
    for (const auto& state : true_series) {
        // RTN axes from the inertial velocity so that an along-track offset
        // really is a shift along the orbit (the rotating-frame velocity
        // direction is tilted by the Earth-rotation term).
        const Vec3 v_inertial = state.velocity_m_s + omega.cross(state.position_m);
        const Vec3 radial = state.position_m.unit();
        Vec3 cross = state.position_m.cross(v_inertial);
        const double cross_norm = cross.norm();
        if (cross_norm < 1.0) {
            raise(ErrorCode::DegenerateInput,
                  "perturb_ephemeris: state has no angular momentum");
        }
        cross = cross / cross_norm;
        const Vec3 along = cross.cross(radial);
        SatStateEcef perturbed = state;
        perturbed.position_m = state.position_m + radial * offsets.radial_m +
                               along * offsets.along_track_m + cross * offsets.cross_track_m;
        // Along-track offset d is the time shift d/|v|; the velocity turns by
        // the corresponding orbital angle about the cross-normal axis.
        const double angle = offsets.along_track_m / state.position_m.norm();
        const Vec3 v_rotated = rodrigues_rotate(v_inertial, cross, angle);
        perturbed.velocity_m_s = v_rotated - omega.cross(perturbed.position_m);
        out.push_back(perturbed);
    }
    return out;
}

namespace {

std::vector<TleRecord> sorted_unique_tles(const std::vector<TleRecord>& tles) {
    std::vector<TleRecord> sorted = tles;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const TleRecord& a, const TleRecord& b) {
                         return a.norad_id < b.norad_id;
                     });
    sorted.erase(std::unique(sorted.begin(), sorted.end(),
                             [](const TleRecord& a, const TleRecord& b) {
                                 return a.norad_id == b.norad_id;
                             }),
                 sorted.end());
    return sorted;
}

// Realizes the drawn RTN offsets as quantized element shifts on a copy of
// the TLE; returns the broadcast record plus its serialized lines.
TleRecord perturb_tle_elements(const TleRecord& truth, const SatellitePerturbation& p,
                               std::string& lines_out) {
    const double n_rad_s = truth.mean_motion_rev_day * 2.0 * std::numbers::pi / 86400.0;
    const double mu_m = sgp4::grav::mu_km3_s2 * 1.0e9;
    const double a_m = std::cbrt(mu_m / (n_rad_s * n_rad_s));

    TleRecord broadcast = truth;
    broadcast.mean_anomaly_deg =
        wrap_deg(truth.mean_anomaly_deg + (p.along_track_m / a_m) / deg2rad);
    const double sin_i = std::sin(truth.inclination_deg * deg2rad);
    if (std::fabs(sin_i) > 1.0e-3) {
        broadcast.raan_deg =
            wrap_deg(truth.raan_deg + (p.cross_track_m / (a_m * sin_i)) / deg2rad);
    }
    broadcast.mean_motion_rev_day = truth.mean_motion_rev_day * (1.0 - 1.5 * p.radial_m / a_m);

    // Quantize to TLE column precision so the in-memory broadcast equals the
    // file a solver would read back.
    const auto [l1, l2] = serialize_tle(broadcast);
    lines_out = l1 + "\n" + l2 + "\n";
    TleParseResult reparsed = parse_tles(lines_out, true);
    TleRecord quantized = reparsed.records.at(0);
    quantized.name = truth.name;
    return quantized;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
    validate_config(config);
    Scenario scenario;
    scenario.truth.config = config;

    const std::vector<TleRecord> sats = sorted_unique_tles(config.tle_set);
    const double window_end = config.window_start_unix_s + config.window_duration_s;

    // Per-satellite ephemeris perturbations, drawn in NORAD order.
    Rng rng_perturb(Rng::derive(config.seed, kStreamPerturbation));
    std::vector<Propagator> true_props;
    std::vector<Propagator> broadcast_props;
    true_props.reserve(sats.size());
    broadcast_props.reserve(sats.size());
    for (const auto& tle : sats) {
        SatellitePerturbation p;
        p.norad_id = tle.norad_id;
        p.along_track_m = rng_perturb.gauss() * config.ephemeris_perturbation.along_track_m;
        p.cross_track_m = rng_perturb.gauss() * config.ephemeris_perturbation.cross_track_m;
        p.radial_m = rng_perturb.gauss() * config.ephemeris_perturbation.radial_m;
        std::string lines;
        const TleRecord broadcast = perturb_tle_elements(tle, p, lines);
        scenario.truth.perturbations.push_back(p);
        scenario.truth.broadcast_tles.push_back(broadcast);
        scenario.truth.broadcast_tle_text += lines;
        true_props.emplace_back(tle);
        broadcast_props.emplace_back(broadcast);
    }

    const StationFrame base_frame = make_station_frame(config.base_position);
    const StationFrame rover_frame = make_station_frame(config.rover_truth);

    // Sampling grids.
    std::vector<double> base_times;
    for (std::size_t k = 0;; ++k) {
        const double t = config.window_start_unix_s +
                         static_cast<double>(k) * config.base_sample_period_s;
        if (t > window_end + 1.0e-9) break;
        base_times.push_back(t);
    }
    Rng rng_jitter(Rng::derive(config.seed, kStreamJitter));
    std::vector<double> rover_times;
    for (std::size_t k = 0;; ++k) {
        double burst_start = config.window_start_unix_s +
                             static_cast<double>(k) * config.rover_burst.period_s;
        if (burst_start > window_end + 1.0e-9) break;
        if (config.rover_burst.jitter_fraction > 0.0) {
            burst_start += (rng_jitter.uniform() - 0.5) * 2.0 *
                           config.rover_burst.jitter_fraction * config.rover_burst.period_s;
        }
        for (std::size_t j = 0;; ++j) {
            const double offset =
                static_cast<double>(j) * config.rover_burst.intra_burst_sample_period_s;
            if (offset > config.rover_burst.duration_s + 1.0e-9) break;
            const double t = burst_start + offset;
            if (t < config.window_start_unix_s - 1.0e-9 || t > window_end + 1.0e-9) continue;
            rover_times.push_back(t);
        }
    }

    // True clock trajectories (random walk over each station's own grid).
    auto make_clock = [&](const ClockConfig& clock, const std::vector<double>& times,
                          std::uint64_t stream) {
        ClockTruth truth;
        truth.offset_hz = clock.offset_hz;
        truth.drift_hz_s = clock.drift_hz_s;
        truth.reference_unix_s = config.window_start_unix_s;
        if (clock.random_walk_hz_sqrt_s > 0.0 && !times.empty()) {
            Rng rng(Rng::derive(config.seed, stream));
            std::vector<double> unique_times = times;
            std::sort(unique_times.begin(), unique_times.end());
            unique_times.erase(std::unique(unique_times.begin(), unique_times.end()),
                               unique_times.end());
            double walk = 0.0;
            double previous = unique_times.front();
            truth.random_walk.reserve(unique_times.size());
            for (double t : unique_times) {
                const double dt = t - previous;
                if (dt > 0.0) {
                    walk += rng.gauss() * clock.random_walk_hz_sqrt_s * std::sqrt(dt);
                }
                truth.random_walk.emplace_back(t, walk);
                previous = t;
            }
        }
        return truth;
    };
    scenario.truth.base_clock = make_clock(config.base_clock, base_times, kStreamBaseClock);
    scenario.truth.rover_clock = make_clock(config.rover_clock, rover_times, kStreamRoverClock);

    // Measurement synthesis from the true orbits.
    const double doppler_scale = -config.f_b_hz / constants::speed_of_light_m_s;
    auto emit = [&](const std::vector<double>& times, const StationFrame& frame,
                    const std::string& station_id, const ClockTruth& clock, double sigma,
                    Rng& rng, std::vector<DopplerObservation>& out) {
        for (double t : times) {
            for (std::size_t s = 0; s < true_props.size(); ++s) {
                const SatStateEcef sat = true_props[s].ecef_at(t);
                if (elevation_at(frame, sat.position_m) < config.elevation_mask_deg) continue;
                DopplerObservation obs;
                obs.station_id = station_id;
                obs.time_unix_s = t;
                obs.norad_id = sats[s].norad_id;
                obs.reported_position_m = sat.position_m;
                obs.base_frequency_hz = config.f_b_hz;
                const double geometric =
                    doppler_scale * range_rate(sat, frame.ecef, Vec3{});
                const double noise = sigma > 0.0 ? rng.gauss() * sigma : 0.0;
                obs.measured_frequency_hz =
                    config.f_b_hz + geometric + clock.at(t) + noise;
                out.push_back(std::move(obs));
            }
        }
    };
    Rng rng_base_noise(Rng::derive(config.seed, kStreamBaseNoise));
    Rng rng_rover_noise(Rng::derive(config.seed, kStreamRoverNoise));
    emit(base_times, base_frame, "base", scenario.truth.base_clock,
         config.noise.base_sigma_hz, rng_base_noise, scenario.base_observations);
    emit(rover_times, rover_frame, "rover", scenario.truth.rover_clock,
         config.noise.rover_sigma_hz, rng_rover_noise, scenario.rover_observations);

    // Common-visibility precondition.
    std::set<int> base_sats, rover_sats;
    for (const auto& obs : scenario.base_observations) base_sats.insert(*obs.norad_id);
    for (const auto& obs : scenario.rover_observations) rover_sats.insert(*obs.norad_id);
    std::vector<int> common;
    std::set_intersection(base_sats.begin(), base_sats.end(), rover_sats.begin(),
                          rover_sats.end(), std::back_inserter(common));
    if (static_cast<int>(common.size()) < config.min_common_satellites) {
        raise(ErrorCode::InsufficientCommonVisibility,
              "generate_scenario: only " + std::to_string(common.size()) +
                  " common satellites visible (need " +
                  std::to_string(config.min_common_satellites) + ")");
    }

    // Coarse truth series (true and broadcast share timestamps).
    for (std::size_t s = 0; s < true_props.size(); ++s) {
        std::vector<SatStateEcef> true_series, broadcast_series;
        for (double t = config.window_start_unix_s; t <= window_end + 1.0e-9;
             t += kTruthSeriesStepS) {
            true_series.push_back(true_props[s].ecef_at(t));
            broadcast_series.push_back(broadcast_props[s].ecef_at(t));
        }
        scenario.truth.true_series[sats[s].norad_id] = std::move(true_series);
        scenario.truth.broadcast_series[sats[s].norad_id] = std::move(broadcast_series);
    }

    StationMeta base_meta;
    base_meta.station_id = "base";
    base_meta.role = StationRole::Base;
    base_meta.known_position = config.base_position;
    base_meta.clock_disciplined = true;
    StationMeta rover_meta;
    rover_meta.station_id = "rover";
    rover_meta.role = StationRole::Rover;
    rover_meta.clock_disciplined = false;
    scenario.stations = {base_meta, rover_meta};
    return scenario;
}

namespace {

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double rank = p * (static_cast<double>(values.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
    const double w = rank - static_cast<double>(lo);
    return values[lo] + w * (values[hi] - values[lo]);
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

TrialRecord run_trial(const ScenarioConfig& config, int trial, const SolverOptions& options) {
    TrialRecord record;
    record.trial = trial;
    record.seed = Rng::derive(config.seed, static_cast<std::uint64_t>(trial));
    try {
        ScenarioConfig trial_config = config;
        trial_config.seed = record.seed;
        const Scenario scenario = generate_scenario(trial_config);
        const auto ephemeris = ephemeris_from_tles(scenario.truth.broadcast_tles);

        const SolveResult standalone =
            solve_standalone(scenario.rover_observations, ephemeris, options);
        const DifferentialResult differential = solve_differential(
            scenario.rover_observations, scenario.base_observations, scenario.stations[0],
            ephemeris, options);

        record.standalone_error_m =
            horizontal_error(standalone.state.position(), trial_config.rover_truth);
        record.differential_error_m =
            horizontal_error(differential.solve.state.position(), trial_config.rover_truth);
        record.standalone_rmse_hz = standalone.final_rmse_hz;
        record.differential_rmse_hz = differential.solve.final_rmse_hz;
        record.converged_standalone = standalone.converged;
        record.converged_differential = differential.solve.converged;
        record.reduction =
            record.standalone_error_m > 0.0
                ? (record.standalone_error_m - record.differential_error_m) /
                      record.standalone_error_m
                : 0.0;
    } catch (const SnapdopError& err) {
        record.failed = true;
        record.failure = err.what();
    }
    return record;
}

}  // namespace

MonteCarloResult monte_carlo(const ScenarioConfig& config, int n_trials, int threads,
                             const SolverOptions& options) {
    if (n_trials < 1) {
        raise(ErrorCode::InvalidArgument, "monte_carlo: n_trials must be >= 1");
    }
    MonteCarloResult result;
    result.trials.resize(static_cast<std::size_t>(n_trials));

    if (threads <= 1) {
        for (int i = 0; i < n_trials; ++i) {
            result.trials[static_cast<std::size_t>(i)] = run_trial(config, i, options);
        }
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n_trials) break;
                result.trials[static_cast<std::size_t>(i)] = run_trial(config, i, options);
            }
        };
        std::vector<std::thread> pool;
        const int n_workers = std::min(threads, n_trials);
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<double> std_errors, diff_errors, reductions, std_rmse, diff_rmse;
    int wins = 0, ok = 0;
    for (const auto& trial : result.trials) {
        if (trial.failed) {
            ++result.summary.failures;
            continue;
        }
        ++ok;
        std_errors.push_back(trial.standalone_error_m);
        diff_errors.push_back(trial.differential_error_m);
        reductions.push_back(trial.reduction);
        std_rmse.push_back(trial.standalone_rmse_hz);
        diff_rmse.push_back(trial.differential_rmse_hz);
        if (trial.differential_error_m < trial.standalone_error_m) ++wins;
    }
    result.summary.n_trials = n_trials;
    result.summary.median_standalone_m = percentile(std_errors, 0.5);
    result.summary.median_differential_m = percentile(diff_errors, 0.5);
    result.summary.mean_standalone_m = mean_of(std_errors);
    result.summary.mean_differential_m = mean_of(diff_errors);
    result.summary.p10_standalone_m = percentile(std_errors, 0.1);
    result.summary.p90_standalone_m = percentile(std_errors, 0.9);
    result.summary.p10_differential_m = percentile(diff_errors, 0.1);
    result.summary.p90_differential_m = percentile(diff_errors, 0.9);
    result.summary.median_reduction = percentile(reductions, 0.5);
    result.summary.mean_reduction = mean_of(reductions);
    result.summary.differential_win_fraction =
        ok > 0 ? static_cast<double>(wins) / static_cast<double>(ok) : 0.0;
    result.summary.mean_standalone_rmse_hz = mean_of(std_rmse);
    result.summary.mean_differential_rmse_hz = mean_of(diff_rmse);
    return result;
}

std::string trials_to_csv(const std::vector<TrialRecord>& trials) {
    std::string out =
        "trial,seed,std_err_m,diff_err_m,reduction,std_rmse_hz,diff_rmse_hz,"
        "converged_std,converged_diff\n";
    for (const auto& trial : trials) {
        out += std::to_string(trial.trial);
        out += ',';
        out += std::to_string(trial.seed);
        out += ',';
        if (!trial.failed) {
            out += csv::format_double(trial.standalone_error_m);
            out += ',';
            out += csv::format_double(trial.differential_error_m);
            out += ',';
            out += csv::format_double(trial.reduction);
            out += ',';
            out += csv::format_double(trial.standalone_rmse_hz);
            out += ',';
            out += csv::format_double(trial.differential_rmse_hz);
            out += ',';
            out += trial.converged_standalone ? "true" : "false";
            out += ',';
            out += trial.converged_differential ? "true" : "false";
        } else {
            out += ",,,,,false,false";
        }
        out += '\n';
    }
    return out;
}

std::vector<TleRecord> make_walker_constellation(int planes, int per_plane,
                                                 double inclination_deg,
                                                 double mean_motion_rev_day,
                                                 double epoch_unix_s, int first_norad) {
    if (planes < 1 || per_plane < 1) {
        raise(ErrorCode::InvalidArgument, "make_walker_constellation: bad plane counts");
    }
    std::vector<TleRecord> tles;
    tles.reserve(static_cast<std::size_t>(planes) * static_cast<std::size_t>(per_plane));
    int norad = first_norad;
    for (int p = 0; p < planes; ++p) {
        for (int s = 0; s < per_plane; ++s) {
            TleRecord rec;
            rec.norad_id = norad;
            rec.name = "SIM-" + std::to_string(norad);
            rec.epoch_unix_s = epoch_unix_s;
            rec.classification = 'U';
            rec.intl_designator = "25900A";
            rec.mean_motion_rev_day = mean_motion_rev_day;
            rec.eccentricity = 0.0002;
            rec.inclination_deg = inclination_deg;
            // Star pattern: ascending nodes spread over 180 degrees.
            rec.raan_deg = wrap_deg(180.0 * static_cast<double>(p) / planes);
            rec.arg_perigee_deg = 90.0;
            rec.mean_anomaly_deg = wrap_deg(
                360.0 * static_cast<double>(s) / per_plane +
                360.0 * static_cast<double>(p) / (static_cast<double>(planes) * per_plane) / 2.0);
            rec.bstar = 1.0e-4;
            rec.mean_motion_dot = 1.0e-7;
            rec.mean_motion_ddot = 0.0;
            rec.element_set_number = 999;
            rec.revolution_number = 1;
            // Quantize through the standard column layout.
            const auto [l1, l2] = serialize_tle(rec);
            TleParseResult parsed = parse_tles(l1 + "\n" + l2 + "\n", true);
            TleRecord quantized = parsed.records.at(0);
            quantized.name = rec.name;
            tles.push_back(quantized);
            ++norad;
        }
    }
    return tles;
}

}  // namespace snapdop
