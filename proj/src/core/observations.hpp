#ifndef SNAPDOP_CORE_OBSERVATIONS_HPP
#define SNAPDOP_CORE_OBSERVATIONS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/geodesy.hpp"
#include "core/tle.hpp"
#include "core/vec3.hpp"

namespace snapdop {

// One time-tagged carrier-frequency measurement. The satellite identity is
// either a matched NORAD id or, pre-matching, the self-reported ECEF position
// (plus an optional channel tag) carried in from the data frame.
struct DopplerObservation {
    std::string station_id;
    double time_unix_s = 0.0;
    std::optional<int> norad_id;                 // set when matched
    std::optional<Vec3> reported_position_m;     // required while unmatched
    std::string channel_tag;
    double base_frequency_hz = 0.0;              // f_B
    double measured_frequency_hz = 0.0;          // absolute carrier measurement
    int burst_id = -1;                           // assigned by grouping
    std::optional<double> snr_db;

    bool matched() const { return norad_id.has_value(); }
    // Measured Doppler shift relative to the nominal carrier.
    double doppler_hz() const { return measured_frequency_hz - base_frequency_hz; }
};

struct Burst {
    int burst_id = -1;
    std::string station_id;
    std::vector<DopplerObservation> observations;  // time-ordered
    double start_unix_s = 0.0;
    double end_unix_s = 0.0;
};

enum class StationRole { Base, Rover };

struct StationMeta {
    std::string station_id;
    StationRole role = StationRole::Rover;
    std::optional<GeodeticPosition> known_position;  // required for base
    bool clock_disciplined = false;
};

inline constexpr const char* kObservationCsvHeader =
    "station_id,time_unix_s,sat_norad,reported_x_m,reported_y_m,reported_z_m,"
    "f_base_hz,f_measured_hz,snr_db";

inline constexpr const char* kStationCsvHeader =
    "station_id,role,lat_deg,lon_deg,alt_m,clock_disciplined";

struct ObservationLoadResult {
    std::vector<DopplerObservation> observations;
    std::vector<std::string> issues;  // per-row invariant violations (non-strict mode)
};

// Loads the observation CSV. Schema violations always throw SchemaMismatch;
// row-level problems throw in strict mode and are otherwise collected.
ObservationLoadResult load_observations(const std::string& path, bool strict = false);
ObservationLoadResult parse_observations_csv(const std::string& text, bool strict = false);

std::string observations_to_csv(const std::vector<DopplerObservation>& observations);
void write_observations(const std::string& path,
                        const std::vector<DopplerObservation>& observations);

std::vector<StationMeta> load_stations(const std::string& path);
std::vector<StationMeta> parse_stations_csv(const std::string& text);
std::string stations_to_csv(const std::vector<StationMeta>& stations);

// Partitions per (station, satellite identity): consecutive observations
// closer than gap_threshold share a burst. Burst ids are dense from 0,
// ordered by (station, satellite, start time).
std::vector<Burst> group_into_bursts(const std::vector<DopplerObservation>& observations,
                                     double gap_threshold_s);

struct MatchResult {
    int norad_id = 0;
    double distance_m = 0.0;
};

inline constexpr double kDefaultMatchMaxDistanceM = 100.0e3;
inline constexpr double kDefaultMatchAmbiguityRatio = 2.0;

// Nearest propagated candidate to the reported position. Throws NoCandidate
// when the best distance exceeds max_distance and AmbiguousMatch when the
// second-best/best ratio test fails.
MatchResult match_satellite(const Vec3& reported_position_m, double time_unix_s,
                            const std::vector<TleRecord>& tles,
                            double max_distance_m = kDefaultMatchMaxDistanceM,
                            double ambiguity_ratio = kDefaultMatchAmbiguityRatio);

struct MatchReport {
    int already_matched = 0;
    int matched = 0;
    struct Failure {
        std::size_t index;
        std::string reason;
    };
    std::vector<Failure> failures;  // unmatched or ambiguous rows, retained and flagged
};

// Fills norad_id in place for every row carrying a reported position.
MatchReport match_observations(std::vector<DopplerObservation>& observations,
                               const std::vector<TleRecord>& tles,
                               double max_distance_m = kDefaultMatchMaxDistanceM,
                               double ambiguity_ratio = kDefaultMatchAmbiguityRatio);

// Convenience: observations grouped by NORAD id (unmatched rows skipped).
std::map<int, std::vector<DopplerObservation>> by_satellite(
    const std::vector<DopplerObservation>& observations);

}  // namespace snapdop

#endif
