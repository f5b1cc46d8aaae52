#ifndef SNAPDOP_CORE_SIMULATOR_HPP
#define SNAPDOP_CORE_SIMULATOR_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/observations.hpp"
#include "core/orbits.hpp"
#include "core/solver.hpp"
#include "core/tle.hpp"

namespace snapdop {

struct BurstSchedule {
    double duration_s = 5.0;
    double period_s = 60.0;
    double intra_burst_sample_period_s = 0.5;
    double jitter_fraction = 0.0;  // +/- fraction of the period applied to burst starts
};

struct NoiseConfig {
    double base_sigma_hz = 1.5;
    double rover_sigma_hz = 9.0;
};

struct ClockConfig {
    double offset_hz = 0.0;
    double drift_hz_s = 0.0;
    double random_walk_hz_sqrt_s = 0.0;
};

// Per-satellite ephemeris error scales (1-sigma). Offsets are drawn per
// satellite and realized as element shifts on the broadcast TLEs: along-track
// as a mean-anomaly shift, cross-track as a node shift, radial as a
// semi-major-axis (mean motion) shift. Defaults are calibrated so the base
// station sees a 4-9 Hz residual RMSE while the standalone position error
// lands in the hundreds of meters.
struct EphemerisPerturbation {
    double along_track_m = 80.0;
    double cross_track_m = 1400.0;
    double radial_m = 30.0;
};

struct ScenarioConfig {
    GeodeticPosition rover_truth{37.7497, -122.4506, 20.0};
    GeodeticPosition base_position{37.6616, -122.4406, 15.0};
    std::vector<TleRecord> tle_set;
    double window_start_unix_s = 0.0;
    double window_duration_s = 3300.0;
    BurstSchedule rover_burst;
    double base_sample_period_s = 1.0;
    double f_b_hz = constants::default_base_frequency_hz;
    NoiseConfig noise;
    ClockConfig rover_clock{2000.0, 0.05, 0.08};
    ClockConfig base_clock{0.0, 0.0, 0.0};
    EphemerisPerturbation ephemeris_perturbation;
    double elevation_mask_deg = 10.0;
    int min_common_satellites = 3;
    std::uint64_t seed = 1;
};

void validate_config(const ScenarioConfig& config);

// True clock trajectory of one station: deterministic offset + drift around
// the window start plus a random walk sampled at the station's timestamps.
struct ClockTruth {
    double offset_hz = 0.0;
    double drift_hz_s = 0.0;
    double reference_unix_s = 0.0;
    std::vector<std::pair<double, double>> random_walk;  // (time, walk value)

    double at(double t_unix_s) const;
};

struct SatellitePerturbation {
    int norad_id = 0;
    double along_track_m = 0.0;
    double cross_track_m = 0.0;
    double radial_m = 0.0;
};

struct ScenarioTruth {
    ScenarioConfig config;
    std::vector<TleRecord> broadcast_tles;       // what solvers are given
    std::string broadcast_tle_text;
    std::vector<SatellitePerturbation> perturbations;
    ClockTruth rover_clock;
    ClockTruth base_clock;
    // Coarse (10 s) state series over the window, shared timestamps.
    std::map<int, std::vector<SatStateEcef>> true_series;
    std::map<int, std::vector<SatStateEcef>> broadcast_series;
};

struct Scenario {
    std::vector<DopplerObservation> rover_observations;
    std::vector<DopplerObservation> base_observations;
    std::vector<StationMeta> stations;
    ScenarioTruth truth;
};

struct RtnOffset {
    double radial_m = 0.0;
    double along_track_m = 0.0;
    double cross_track_m = 0.0;
};

// Displaces every state by the constant offset expressed in its own
// radial / along-track / cross-normal frame; the velocity is rotated about
// the cross-normal axis consistently with the along-track time-shift
// interpretation (offset d ~ time shift d/|v|).
std::vector<SatStateEcef> perturb_ephemeris(const std::vector<SatStateEcef>& true_series,
                                            const RtnOffset& offsets);

// Deterministic synthetic scenario: measurements synthesized from the true
// orbits and clock trajectories, solvers handed the perturbed broadcast TLEs.
Scenario generate_scenario(const ScenarioConfig& config);

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    double standalone_error_m = 0.0;
    double differential_error_m = 0.0;
    double reduction = 0.0;  // (std - diff) / std
    double standalone_rmse_hz = 0.0;
    double differential_rmse_hz = 0.0;
    bool converged_standalone = false;
    bool converged_differential = false;
    bool failed = false;
    std::string failure;
};

struct MonteCarloSummary {
    int n_trials = 0;
    int failures = 0;
    double median_standalone_m = 0.0;
    double median_differential_m = 0.0;
    double mean_standalone_m = 0.0;
    double mean_differential_m = 0.0;
    double p10_standalone_m = 0.0, p90_standalone_m = 0.0;
    double p10_differential_m = 0.0, p90_differential_m = 0.0;
    double median_reduction = 0.0;  // median of per-trial (std - diff) / std
    double mean_reduction = 0.0;
    double differential_win_fraction = 0.0;
    double mean_standalone_rmse_hz = 0.0;
    double mean_differential_rmse_hz = 0.0;
};

struct MonteCarloResult {
    std::vector<TrialRecord> trials;
    MonteCarloSummary summary;
};

// Trials are reproducible from (config.seed, trial index) and independent of
// thread count; per-trial failures are recorded, not fatal.
MonteCarloResult monte_carlo(const ScenarioConfig& config, int n_trials, int threads = 1,
                             const SolverOptions& options = {});

std::string trials_to_csv(const std::vector<TrialRecord>& trials);

// Synthetic near-polar Walker-style constellation with quantized (serialize/
// reparse round-tripped) elements; used for shipped scenario data and tests.
std::vector<TleRecord> make_walker_constellation(int planes, int per_plane,
                                                 double inclination_deg,
                                                 double mean_motion_rev_day,
                                                 double epoch_unix_s, int first_norad);

}  // namespace snapdop

#endif
