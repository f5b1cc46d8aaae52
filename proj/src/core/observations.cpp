#include "core/observations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <tuple>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/orbits.hpp"

namespace snapdop {

namespace {

constexpr double kDopplerEnvelopeHz = 200.0e3;

void check_observation_invariants(const DopplerObservation& obs, int row_number,
                                  std::vector<std::string>& issues, bool strict) {
    auto report = [&](const std::string& msg) {
        const std::string full = "row " + std::to_string(row_number) + ": " + msg;
        if (strict) raise(ErrorCode::InvariantViolation, full);
        issues.push_back(full);
    };
    if (!std::isfinite(obs.time_unix_s)) {
        report("time is not finite");
    }
    if (!(obs.base_frequency_hz > 0.0)) {
        report("f_base_hz must be positive");
    }
    if (std::fabs(obs.measured_frequency_hz - obs.base_frequency_hz) > kDopplerEnvelopeHz) {
        report("measured frequency outside f_base +/- 200 kHz envelope");
    }
    if (!obs.matched() && !obs.reported_position_m.has_value()) {
        report("unmatched observation missing reported position");
    }
}

}  // namespace

ObservationLoadResult parse_observations_csv(const std::string& text, bool strict) {
    const csv::Table table = csv::parse_text(text);
    csv::require_header(table, csv::split_row(kObservationCsvHeader), "observations");

    ObservationLoadResult result;
    result.observations.reserve(table.rows.size());
    int row_number = 1;
    for (const auto& row : table.rows) {
        ++row_number;
        if (row.size() != 9) {
            raise(ErrorCode::RowParseError,
                  "row " + std::to_string(row_number) + ": expected 9 columns, got " +
                      std::to_string(row.size()));
        }
        DopplerObservation obs;
        obs.station_id = row[0];
        obs.time_unix_s = csv::parse_double(row[1], row_number, "time_unix_s");
        if (!row[2].empty()) {
            obs.norad_id = static_cast<int>(csv::parse_double(row[2], row_number, "sat_norad"));
        }
        const auto x = csv::parse_optional_double(row[3], row_number, "reported_x_m");
        const auto y = csv::parse_optional_double(row[4], row_number, "reported_y_m");
        const auto z = csv::parse_optional_double(row[5], row_number, "reported_z_m");
        if (x && y && z) {
            obs.reported_position_m = Vec3(*x, *y, *z);
        } else if (x || y || z) {
            raise(ErrorCode::RowParseError,
                  "row " + std::to_string(row_number) + ": partial reported position");
        }
        obs.base_frequency_hz = csv::parse_double(row[6], row_number, "f_base_hz");
        obs.measured_frequency_hz = csv::parse_double(row[7], row_number, "f_measured_hz");
        obs.snr_db = csv::parse_optional_double(row[8], row_number, "snr_db");
        check_observation_invariants(obs, row_number, result.issues, strict);
        result.observations.push_back(std::move(obs));
    }
    return result;
}

ObservationLoadResult load_observations(const std::string& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open observations file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_observations_csv(text, strict);
}

std::string observations_to_csv(const std::vector<DopplerObservation>& observations) {
    std::string out = kObservationCsvHeader;
    out += '\n';
    for (const auto& obs : observations) {
        std::vector<std::string> fields(9);
        fields[0] = obs.station_id;
        fields[1] = csv::format_double(obs.time_unix_s);
        fields[2] = obs.norad_id ? std::to_string(*obs.norad_id) : "";
        if (obs.reported_position_m) {
            fields[3] = csv::format_double(obs.reported_position_m->x);
            fields[4] = csv::format_double(obs.reported_position_m->y);
            fields[5] = csv::format_double(obs.reported_position_m->z);
        }
        fields[6] = csv::format_double(obs.base_frequency_hz);
        fields[7] = csv::format_double(obs.measured_frequency_hz);
        fields[8] = obs.snr_db ? csv::format_double(*obs.snr_db) : "";
        out += csv::join_row(fields);
        out += '\n';
    }
    return out;
}

void write_observations(const std::string& path,
                        const std::vector<DopplerObservation>& observations) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write observations file '" + path + "'");
    out << observations_to_csv(observations);
    if (!out) raise(ErrorCode::IoError, "failed writing observations file '" + path + "'");
}

std::vector<StationMeta> parse_stations_csv(const std::string& text) {
    const csv::Table table = csv::parse_text(text);
    csv::require_header(table, csv::split_row(kStationCsvHeader), "stations");
    std::vector<StationMeta> stations;
    int row_number = 1;
    for (const auto& row : table.rows) {
        ++row_number;
        if (row.size() != 6) {
            raise(ErrorCode::RowParseError,
                  "row " + std::to_string(row_number) + ": expected 6 columns, got " +
                      std::to_string(row.size()));
        }
        StationMeta meta;
        meta.station_id = row[0];
        if (row[1] == "base") {
            meta.role = StationRole::Base;
        } else if (row[1] == "rover") {
            meta.role = StationRole::Rover;
        } else {
            raise(ErrorCode::RowParseError, "row " + std::to_string(row_number) +
                                                ": role must be 'base' or 'rover', got '" +
                                                row[1] + "'");
        }
        const auto lat = csv::parse_optional_double(row[2], row_number, "lat_deg");
        const auto lon = csv::parse_optional_double(row[3], row_number, "lon_deg");
        const auto alt = csv::parse_optional_double(row[4], row_number, "alt_m");
        if (lat && lon && alt) {
            GeodeticPosition p{*lat, *lon, *alt};
            validate_geodetic(p);
            meta.known_position = p;
        }
        if (row[5] == "true" || row[5] == "1") {
            meta.clock_disciplined = true;
        } else if (row[5] == "false" || row[5] == "0" || row[5].empty()) {
            meta.clock_disciplined = false;
        } else {
            raise(ErrorCode::RowParseError,
                  "row " + std::to_string(row_number) + ": clock_disciplined must be boolean");
        }
        if (meta.role == StationRole::Base && !meta.known_position) {
            raise(ErrorCode::UnknownBasePosition,
                  "row " + std::to_string(row_number) + ": base station '" + meta.station_id +
                      "' requires a known position");
        }
        stations.push_back(std::move(meta));
    }
    return stations;
}

std::vector<StationMeta> load_stations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open stations file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_stations_csv(text);
}

std::string stations_to_csv(const std::vector<StationMeta>& stations) {
    std::string out = kStationCsvHeader;
    out += '\n';
    for (const auto& meta : stations) {
        std::vector<std::string> fields(6);
        fields[0] = meta.station_id;
        fields[1] = meta.role == StationRole::Base ? "base" : "rover";
        if (meta.known_position) {
            fields[2] = csv::format_double(meta.known_position->latitude_deg);
            fields[3] = csv::format_double(meta.known_position->longitude_deg);
            fields[4] = csv::format_double(meta.known_position->altitude_m);
        }
        fields[5] = meta.clock_disciplined ? "true" : "false";
        out += csv::join_row(fields);
        out += '\n';
    }
    return out;
}

std::vector<Burst> group_into_bursts(const std::vector<DopplerObservation>& observations,
                                     double gap_threshold_s) {
    if (!(gap_threshold_s > 0.0)) {
        raise(ErrorCode::InvalidArgument, "gap_threshold must be positive");
    }
    // Group key: station + satellite identity (channel tag stands in for
    // unmatched satellites).
    using Key = std::tuple<std::string, int, std::string>;
    std::map<Key, std::vector<DopplerObservation>> groups;
    for (const auto& obs : observations) {
        Key key{obs.station_id, obs.norad_id.value_or(-1),
                obs.matched() ? std::string() : obs.channel_tag};
        groups[key].push_back(obs);
    }

    std::vector<Burst> bursts;
    for (auto& [key, group] : groups) {
        std::stable_sort(group.begin(), group.end(),
                         [](const DopplerObservation& a, const DopplerObservation& b) {
                             return a.time_unix_s < b.time_unix_s;
                         });
        Burst current;
        auto flush = [&]() {
            if (!current.observations.empty()) {
                current.start_unix_s = current.observations.front().time_unix_s;
                current.end_unix_s = current.observations.back().time_unix_s;
                bursts.push_back(std::move(current));
                current = Burst{};
            }
        };
        for (const auto& obs : group) {
            if (!current.observations.empty() &&
                obs.time_unix_s - current.observations.back().time_unix_s >= gap_threshold_s) {
                flush();
            }
            if (current.observations.empty()) current.station_id = obs.station_id;
            current.observations.push_back(obs);
        }
        flush();
    }

    std::stable_sort(bursts.begin(), bursts.end(), [](const Burst& a, const Burst& b) {
        if (a.station_id != b.station_id) return a.station_id < b.station_id;
        return a.start_unix_s < b.start_unix_s;
    });
    for (std::size_t i = 0; i < bursts.size(); ++i) {
        bursts[i].burst_id = static_cast<int>(i);
        for (auto& obs : bursts[i].observations) {
            obs.burst_id = static_cast<int>(i);
        }
    }
    return bursts;
}

MatchResult match_satellite(const Vec3& reported_position_m, double time_unix_s,
                            const std::vector<TleRecord>& tles, double max_distance_m,
                            double ambiguity_ratio) {
    if (tles.empty()) {
        raise(ErrorCode::InvalidArgument, "match_satellite: TLE list is empty");
    }
    if (!(max_distance_m > 0.0) || !(ambiguity_ratio > 1.0)) {
        raise(ErrorCode::InvalidArgument,
              "match_satellite: max_distance must be > 0 and ambiguity_ratio > 1");
    }
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    int best_norad = 0, second_norad = 0;
    int usable = 0;
    for (const auto& tle : tles) {
        SatStateEcef state;
        try {
            state = propagate_to(tle, time_unix_s);
        } catch (const SnapdopError&) {
            continue;  // unusable candidate (stale, decayed, deep space)
        }
        ++usable;
        const double distance = (state.position_m - reported_position_m).norm();
        if (distance < best) {
            second = best;
            second_norad = best_norad;
            best = distance;
            best_norad = tle.norad_id;
        } else if (distance < second) {
            second = distance;
            second_norad = tle.norad_id;
        }
    }
    if (usable == 0) {
        raise(ErrorCode::NoCandidate, "match_satellite: no propagatable TLE candidates");
    }
    if (best > max_distance_m) {
        raise(ErrorCode::NoCandidate,
              "match_satellite: nearest candidate " + std::to_string(best_norad) + " is " +
                  std::to_string(best) + " m away (limit " + std::to_string(max_distance_m) +
                  " m)");
    }
    if (usable > 1 && second < ambiguity_ratio * best) {
        raise(ErrorCode::AmbiguousMatch,
              "match_satellite: candidates " + std::to_string(best_norad) + " (" +
                  std::to_string(best) + " m) and " + std::to_string(second_norad) + " (" +
                  std::to_string(second) + " m) fail the ambiguity ratio test");
    }
    return {best_norad, best};
}

MatchReport match_observations(std::vector<DopplerObservation>& observations,
                               const std::vector<TleRecord>& tles, double max_distance_m,
                               double ambiguity_ratio) {
    MatchReport report;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        auto& obs = observations[i];
        if (obs.matched()) {
            ++report.already_matched;
            continue;
        }
        if (!obs.reported_position_m) {
            report.failures.push_back({i, "no reported position"});
            continue;
        }
        try {
            const MatchResult match = match_satellite(*obs.reported_position_m,
                                                      obs.time_unix_s, tles, max_distance_m,
                                                      ambiguity_ratio);
            obs.norad_id = match.norad_id;
            ++report.matched;
        } catch (const SnapdopError& err) {
            report.failures.push_back({i, err.what()});
        }
    }
    return report;
}

std::map<int, std::vector<DopplerObservation>> by_satellite(
    const std::vector<DopplerObservation>& observations) {
    std::map<int, std::vector<DopplerObservation>> out;
    for (const auto& obs : observations) {
        if (obs.matched()) {
            out[*obs.norad_id].push_back(obs);
        }
    }
    return out;
}

}  // namespace snapdop
