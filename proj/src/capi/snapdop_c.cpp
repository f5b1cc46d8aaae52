#include "snapdop/snapdop.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/differential.hpp"
#include "core/errors.hpp"
#include "core/geodesy.hpp"
#include "core/json_io.hpp"
#include "core/observations.hpp"
#include "core/orbits.hpp"
#include "core/simulator.hpp"
#include "core/solver.hpp"

using namespace snapdop;

struct snapdop_tleset {
    std::vector<TleRecord> records;
    std::map<int, TleRecord> by_norad;
    int skipped = 0;
};

struct snapdop_dataset {
    std::vector<DopplerObservation> observations;
    std::vector<StationMeta> stations;
};

struct snapdop_result {
    SolveResult solve;
    bool differential = false;
    CorrectionReport corrections;
    std::map<int, ErrorSeries> error_series;
};

struct snapdop_scenario {
    ScenarioConfig config;
};

namespace {

thread_local std::string g_last_error;

snapdop_status status_from(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return SNAPDOP_OK;
        case ErrorCode::InvalidArgument: return SNAPDOP_E_INVALID_ARGUMENT;
        case ErrorCode::ChecksumMismatch: return SNAPDOP_E_CHECKSUM_MISMATCH;
        case ErrorCode::MalformedLine: return SNAPDOP_E_MALFORMED_LINE;
        case ErrorCode::PropagationDiverged: return SNAPDOP_E_PROPAGATION_DIVERGED;
        case ErrorCode::StaleEpoch: return SNAPDOP_E_STALE_EPOCH;
        case ErrorCode::DeepSpaceUnsupported: return SNAPDOP_E_DEEP_SPACE_UNSUPPORTED;
        case ErrorCode::DegenerateInput: return SNAPDOP_E_DEGENERATE_INPUT;
        case ErrorCode::DegenerateGeometry: return SNAPDOP_E_DEGENERATE_GEOMETRY;
        case ErrorCode::SchemaMismatch: return SNAPDOP_E_SCHEMA_MISMATCH;
        case ErrorCode::RowParseError: return SNAPDOP_E_ROW_PARSE;
        case ErrorCode::InvariantViolation: return SNAPDOP_E_INVARIANT_VIOLATION;
        case ErrorCode::NoCandidate: return SNAPDOP_E_NO_CANDIDATE;
        case ErrorCode::AmbiguousMatch: return SNAPDOP_E_AMBIGUOUS_MATCH;
        case ErrorCode::MissingEphemeris: return SNAPDOP_E_MISSING_EPHEMERIS;
        case ErrorCode::UnknownBasePosition: return SNAPDOP_E_UNKNOWN_BASE_POSITION;
        case ErrorCode::UnmatchedObservation: return SNAPDOP_E_UNMATCHED_OBSERVATION;
        case ErrorCode::OutOfCoverage: return SNAPDOP_E_OUT_OF_COVERAGE;
        case ErrorCode::NoCommonSatellite: return SNAPDOP_E_NO_COMMON_SATELLITE;
        case ErrorCode::NoCrossing: return SNAPDOP_E_NO_CROSSING;
        case ErrorCode::InsufficientData: return SNAPDOP_E_INSUFFICIENT_DATA;
        case ErrorCode::SingularNormalMatrix: return SNAPDOP_E_SINGULAR_NORMAL_MATRIX;
        case ErrorCode::EmptyInput: return SNAPDOP_E_EMPTY_INPUT;
        case ErrorCode::InsufficientCommonVisibility:
            return SNAPDOP_E_INSUFFICIENT_COMMON_VISIBILITY;
        case ErrorCode::ConfigError: return SNAPDOP_E_CONFIG;
        case ErrorCode::IoError: return SNAPDOP_E_IO;
        case ErrorCode::Internal: return SNAPDOP_E_INTERNAL;
    }
    return SNAPDOP_E_INTERNAL;
}

template <typename Fn>
snapdop_status guarded(Fn&& fn) {
    try {
        fn();
        return SNAPDOP_OK;
    } catch (const SnapdopError& err) {
        g_last_error = err.what();
        return status_from(err.code());
    } catch (const std::exception& err) {
        g_last_error = err.what();
        return SNAPDOP_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SNAPDOP_E_INTERNAL;
    }
}

snapdop_status invalid(const char* message) {
    g_last_error = message;
    return SNAPDOP_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out != nullptr) {
        std::memcpy(out, text.c_str(), text.size() + 1);
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
    out << content;
    if (!out) raise(ErrorCode::IoError, "failed writing '" + path + "'");
}

SolverOptions to_core_options(const snapdop_solver_options* options) {
    SolverOptions core;
    if (options == nullptr) return core;
    core.max_iterations = options->max_iterations;
    core.step_tolerance = options->step_tolerance;
    core.cost_tolerance = options->cost_tolerance;
    core.initial_damping = options->initial_damping;
    if (options->fix_altitude != 0) {
        core.fix_altitude_m = options->fixed_altitude_m;
    }
    if (options->robust_loss_delta_hz > 0.0) {
        core.robust_loss_delta_hz = options->robust_loss_delta_hz;
    }
    return core;
}

const StationMeta& find_base_station(const snapdop_dataset& dataset) {
    const StationMeta* found = nullptr;
    for (const auto& meta : dataset.stations) {
        if (meta.role == StationRole::Base) {
            if (found != nullptr) {
                raise(ErrorCode::InvalidArgument,
                      "dataset contains more than one base station");
            }
            found = &meta;
        }
    }
    if (found == nullptr) {
        raise(ErrorCode::UnknownBasePosition,
              "dataset has no base station metadata; pass a stations CSV");
    }
    return *found;
}

}  // namespace

extern "C" {

const char* snapdop_version(void) { return "1.0.0"; }

const char* snapdop_status_name(snapdop_status status) {
    switch (status) {
        case SNAPDOP_OK: return "SNAPDOP_OK";
        case SNAPDOP_E_INVALID_ARGUMENT: return "SNAPDOP_E_INVALID_ARGUMENT";
        case SNAPDOP_E_CHECKSUM_MISMATCH: return "SNAPDOP_E_CHECKSUM_MISMATCH";
        case SNAPDOP_E_MALFORMED_LINE: return "SNAPDOP_E_MALFORMED_LINE";
        case SNAPDOP_E_PROPAGATION_DIVERGED: return "SNAPDOP_E_PROPAGATION_DIVERGED";
        case SNAPDOP_E_STALE_EPOCH: return "SNAPDOP_E_STALE_EPOCH";
        case SNAPDOP_E_DEEP_SPACE_UNSUPPORTED: return "SNAPDOP_E_DEEP_SPACE_UNSUPPORTED";
        case SNAPDOP_E_DEGENERATE_INPUT: return "SNAPDOP_E_DEGENERATE_INPUT";
        case SNAPDOP_E_DEGENERATE_GEOMETRY: return "SNAPDOP_E_DEGENERATE_GEOMETRY";
        case SNAPDOP_E_SCHEMA_MISMATCH: return "SNAPDOP_E_SCHEMA_MISMATCH";
        case SNAPDOP_E_ROW_PARSE: return "SNAPDOP_E_ROW_PARSE";
        case SNAPDOP_E_INVARIANT_VIOLATION: return "SNAPDOP_E_INVARIANT_VIOLATION";
        case SNAPDOP_E_NO_CANDIDATE: return "SNAPDOP_E_NO_CANDIDATE";
        case SNAPDOP_E_AMBIGUOUS_MATCH: return "SNAPDOP_E_AMBIGUOUS_MATCH";
        case SNAPDOP_E_MISSING_EPHEMERIS: return "SNAPDOP_E_MISSING_EPHEMERIS";
        case SNAPDOP_E_UNKNOWN_BASE_POSITION: return "SNAPDOP_E_UNKNOWN_BASE_POSITION";
        case SNAPDOP_E_UNMATCHED_OBSERVATION: return "SNAPDOP_E_UNMATCHED_OBSERVATION";
        case SNAPDOP_E_OUT_OF_COVERAGE: return "SNAPDOP_E_OUT_OF_COVERAGE";
        case SNAPDOP_E_NO_COMMON_SATELLITE: return "SNAPDOP_E_NO_COMMON_SATELLITE";
        case SNAPDOP_E_NO_CROSSING: return "SNAPDOP_E_NO_CROSSING";
        case SNAPDOP_E_INSUFFICIENT_DATA: return "SNAPDOP_E_INSUFFICIENT_DATA";
        case SNAPDOP_E_SINGULAR_NORMAL_MATRIX: return "SNAPDOP_E_SINGULAR_NORMAL_MATRIX";
        case SNAPDOP_E_EMPTY_INPUT: return "SNAPDOP_E_EMPTY_INPUT";
        case SNAPDOP_E_INSUFFICIENT_COMMON_VISIBILITY:
            return "SNAPDOP_E_INSUFFICIENT_COMMON_VISIBILITY";
        case SNAPDOP_E_CONFIG: return "SNAPDOP_E_CONFIG";
        case SNAPDOP_E_IO: return "SNAPDOP_E_IO";
        case SNAPDOP_E_INTERNAL: return "SNAPDOP_E_INTERNAL";
    }
    return "SNAPDOP_E_UNKNOWN";
}

const char* snapdop_last_error(void) { return g_last_error.c_str(); }

void snapdop_string_free(char* text) { std::free(text); }

snapdop_status snapdop_tleset_parse(const char* text, int strict, snapdop_tleset** out) {
    if (text == nullptr || out == nullptr) return invalid("text and out must be non-null");
    return guarded([&]() {
        auto set = std::make_unique<snapdop_tleset>();
        TleParseResult parsed = parse_tles(text, strict != 0);
        set->records = std::move(parsed.records);
        set->skipped = parsed.skipped_sets;
        for (const auto& rec : set->records) set->by_norad.insert_or_assign(rec.norad_id, rec);
        *out = set.release();
    });
}

snapdop_status snapdop_tleset_load(const char* path, int strict, snapdop_tleset** out) {
    if (path == nullptr || out == nullptr) return invalid("path and out must be non-null");
    return guarded([&]() {
        auto set = std::make_unique<snapdop_tleset>();
        TleParseResult parsed = parse_tle_file(path, strict != 0);
        set->records = std::move(parsed.records);
        set->skipped = parsed.skipped_sets;
        for (const auto& rec : set->records) set->by_norad.insert_or_assign(rec.norad_id, rec);
        *out = set.release();
    });
}

size_t snapdop_tleset_count(const snapdop_tleset* set) {
    return set == nullptr ? 0 : set->records.size();
}

int snapdop_tleset_skipped(const snapdop_tleset* set) {
    return set == nullptr ? 0 : set->skipped;
}

snapdop_status snapdop_tleset_norad_at(const snapdop_tleset* set, size_t index,
                                       int* norad_out) {
    if (set == nullptr || norad_out == nullptr) return invalid("set and out must be non-null");
    if (index >= set->records.size()) return invalid("index out of range");
    *norad_out = set->records[index].norad_id;
    return SNAPDOP_OK;
}

void snapdop_tleset_free(snapdop_tleset* set) { delete set; }

static snapdop_status propagate_common(const snapdop_tleset* set, int norad, double t_unix_s,
                                       double pos_m[3], double vel_m_s[3], bool ecef) {
    if (set == nullptr || pos_m == nullptr || vel_m_s == nullptr) {
        return invalid("set, pos and vel must be non-null");
    }
    return guarded([&]() {
        const auto it = set->by_norad.find(norad);
        if (it == set->by_norad.end()) {
            raise(ErrorCode::MissingEphemeris,
                  "no TLE for satellite " + std::to_string(norad));
        }
        Vec3 p, v;
        if (ecef) {
            const SatStateEcef state = propagate_to(it->second, t_unix_s);
            p = state.position_m;
            v = state.velocity_m_s;
        } else {
            const SatStateTeme state = propagate_teme(it->second, t_unix_s);
            p = state.position_m;
            v = state.velocity_m_s;
        }
        pos_m[0] = p.x;
        pos_m[1] = p.y;
        pos_m[2] = p.z;
        vel_m_s[0] = v.x;
        vel_m_s[1] = v.y;
        vel_m_s[2] = v.z;
    });
}

snapdop_status snapdop_propagate_teme(const snapdop_tleset* set, int norad, double t_unix_s,
                                      double pos_m[3], double vel_m_s[3]) {
    return propagate_common(set, norad, t_unix_s, pos_m, vel_m_s, false);
}

snapdop_status snapdop_propagate_ecef(const snapdop_tleset* set, int norad, double t_unix_s,
                                      double pos_m[3], double vel_m_s[3]) {
    return propagate_common(set, norad, t_unix_s, pos_m, vel_m_s, true);
}

snapdop_status snapdop_gmst(double t_unix_s, double* rad_out) {
    if (rad_out == nullptr) return invalid("out must be non-null");
    return guarded([&]() { *rad_out = gmst(t_unix_s); });
}

snapdop_status snapdop_geodetic_to_ecef(double lat_deg, double lon_deg, double alt_m,
                                        double ecef_m[3]) {
    if (ecef_m == nullptr) return invalid("out must be non-null");
    return guarded([&]() {
        const GeodeticPosition p{lat_deg, lon_deg, alt_m};
        validate_geodetic(p);
        const Vec3 v = geodetic_to_ecef(p);
        ecef_m[0] = v.x;
        ecef_m[1] = v.y;
        ecef_m[2] = v.z;
    });
}

snapdop_status snapdop_ecef_to_geodetic(const double ecef_m[3], double* lat_deg,
                                        double* lon_deg, double* alt_m) {
    if (ecef_m == nullptr || lat_deg == nullptr || lon_deg == nullptr || alt_m == nullptr) {
        return invalid("arguments must be non-null");
    }
    return guarded([&]() {
        const GeodeticPosition p = ecef_to_geodetic(Vec3(ecef_m[0], ecef_m[1], ecef_m[2]));
        *lat_deg = p.latitude_deg;
        *lon_deg = p.longitude_deg;
        *alt_m = p.altitude_m;
    });
}

snapdop_status snapdop_horizontal_error(double lat1_deg, double lon1_deg, double alt1_m,
                                        double lat2_deg, double lon2_deg, double alt2_m,
                                        double* error_m) {
    if (error_m == nullptr) return invalid("out must be non-null");
    return guarded([&]() {
        *error_m = horizontal_error(GeodeticPosition{lat1_deg, lon1_deg, alt1_m},
                                    GeodeticPosition{lat2_deg, lon2_deg, alt2_m});
    });
}

snapdop_status snapdop_dataset_load(const char* observations_csv_path,
                                    const char* stations_csv_path, snapdop_dataset** out) {
    if (observations_csv_path == nullptr || out == nullptr) {
        return invalid("observations path and out must be non-null");
    }
    return guarded([&]() {
        auto dataset = std::make_unique<snapdop_dataset>();
        dataset->observations = load_observations(observations_csv_path).observations;
        if (stations_csv_path != nullptr) {
            dataset->stations = load_stations(stations_csv_path);
        }
        *out = dataset.release();
    });
}

size_t snapdop_dataset_count(const snapdop_dataset* dataset) {
    return dataset == nullptr ? 0 : dataset->observations.size();
}

snapdop_status snapdop_dataset_to_csv(const snapdop_dataset* dataset, char** csv_out) {
    if (dataset == nullptr || csv_out == nullptr) {
        return invalid("dataset and out must be non-null");
    }
    return guarded([&]() { *csv_out = dup_string(observations_to_csv(dataset->observations)); });
}

void snapdop_dataset_free(snapdop_dataset* dataset) { delete dataset; }

snapdop_status snapdop_dataset_match(snapdop_dataset* dataset, const snapdop_tleset* tles,
                                     double max_distance_m, double ambiguity_ratio,
                                     char** report_json_out) {
    if (dataset == nullptr || tles == nullptr) {
        return invalid("dataset and tles must be non-null");
    }
    return guarded([&]() {
        const MatchReport report = match_observations(dataset->observations, tles->records,
                                                      max_distance_m, ambiguity_ratio);
        if (report_json_out != nullptr) {
            nlohmann::json failures = nlohmann::json::array();
            for (const auto& failure : report.failures) {
                failures.push_back(nlohmann::json{{"index", failure.index},
                                                  {"reason", failure.reason}});
            }
            const nlohmann::json doc{{"schema_version", kSchemaVersion},
                                     {"already_matched", report.already_matched},
                                     {"matched", report.matched},
                                     {"failures", failures}};
            *report_json_out = dup_string(doc.dump(2) + "\n");
        }
    });
}

void snapdop_solver_options_init(snapdop_solver_options* options) {
    if (options == nullptr) return;
    options->max_iterations = 50;
    options->step_tolerance = 1.0e-8;
    options->cost_tolerance = 1.0e-10;
    options->initial_damping = 1.0e-3;
    options->fix_altitude = 0;
    options->fixed_altitude_m = 0.0;
    options->robust_loss_delta_hz = 0.0;
    options->estimate_base_clock = 0;
}

snapdop_status snapdop_solve_standalone(const snapdop_dataset* rover,
                                        const snapdop_tleset* tles,
                                        const snapdop_solver_options* options,
                                        snapdop_result** out) {
    if (rover == nullptr || tles == nullptr || out == nullptr) {
        return invalid("rover, tles and out must be non-null");
    }
    return guarded([&]() {
        auto result = std::make_unique<snapdop_result>();
        result->solve =
            solve_standalone(rover->observations, tles->by_norad, to_core_options(options));
        *out = result.release();
    });
}

snapdop_status snapdop_solve_differential(const snapdop_dataset* rover,
                                          const snapdop_dataset* base,
                                          const snapdop_tleset* tles,
                                          const snapdop_solver_options* options,
                                          double max_extrapolation_s, snapdop_result** out) {
    if (rover == nullptr || base == nullptr || tles == nullptr || out == nullptr) {
        return invalid("rover, base, tles and out must be non-null");
    }
    return guarded([&]() {
        const StationMeta& base_station = find_base_station(*base);
        DifferentialResult differential = solve_differential(
            rover->observations, base->observations, base_station, tles->by_norad,
            to_core_options(options), max_extrapolation_s,
            options != nullptr && options->estimate_base_clock != 0);
        auto result = std::make_unique<snapdop_result>();
        result->solve = std::move(differential.solve);
        result->differential = true;
        result->corrections = std::move(differential.corrections);
        result->error_series = std::move(differential.error_series);
        *out = result.release();
    });
}

snapdop_status snapdop_result_state(const snapdop_result* result, double* lat_deg,
                                    double* lon_deg, double* alt_m, double* clock_offset_hz,
                                    double* clock_drift_hz_s,
                                    double* reference_epoch_unix_s) {
    if (result == nullptr) return invalid("result must be non-null");
    if (lat_deg) *lat_deg = result->solve.state.latitude_deg;
    if (lon_deg) *lon_deg = result->solve.state.longitude_deg;
    if (alt_m) *alt_m = result->solve.state.altitude_m;
    if (clock_offset_hz) *clock_offset_hz = result->solve.state.clock_offset_hz;
    if (clock_drift_hz_s) *clock_drift_hz_s = result->solve.state.clock_drift_hz_s;
    if (reference_epoch_unix_s) {
        *reference_epoch_unix_s = result->solve.state.reference_epoch_unix_s;
    }
    return SNAPDOP_OK;
}

snapdop_status snapdop_result_stats(const snapdop_result* result, int* converged,
                                    int* iterations, double* final_rmse_hz) {
    if (result == nullptr) return invalid("result must be non-null");
    if (converged) *converged = result->solve.converged ? 1 : 0;
    if (iterations) *iterations = result->solve.iterations;
    if (final_rmse_hz) *final_rmse_hz = result->solve.final_rmse_hz;
    return SNAPDOP_OK;
}

snapdop_status snapdop_result_to_json(const snapdop_result* result, char** json_out) {
    if (result == nullptr || json_out == nullptr) {
        return invalid("result and out must be non-null");
    }
    return guarded([&]() {
        if (result->differential) {
            DifferentialResult differential;
            differential.solve = result->solve;
            differential.corrections = result->corrections;
            differential.error_series = result->error_series;
            *json_out = dup_string(differential_result_to_json(differential));
        } else {
            *json_out = dup_string(solve_result_to_json(result->solve));
        }
    });
}

snapdop_status snapdop_result_residual_csv(const snapdop_result* result, char** csv_out) {
    if (result == nullptr || csv_out == nullptr) {
        return invalid("result and out must be non-null");
    }
    return guarded([&]() { *csv_out = dup_string(residuals_to_csv(result->solve)); });
}

snapdop_status snapdop_result_error_series_csv(const snapdop_result* result, char** csv_out) {
    if (result == nullptr || csv_out == nullptr) {
        return invalid("result and out must be non-null");
    }
    return guarded([&]() {
        if (!result->differential) {
            raise(ErrorCode::EmptyInput, "standalone results carry no error series");
        }
        *csv_out = dup_string(error_series_to_csv(result->error_series));
    });
}

void snapdop_result_free(snapdop_result* result) { delete result; }

snapdop_status snapdop_scenario_load(const char* config_json_path, snapdop_scenario** out) {
    if (config_json_path == nullptr || out == nullptr) {
        return invalid("path and out must be non-null");
    }
    return guarded([&]() {
        auto scenario = std::make_unique<snapdop_scenario>();
        scenario->config = load_scenario_config(config_json_path);
        *out = scenario.release();
    });
}

snapdop_status snapdop_scenario_parse(const char* config_json_text, const char* base_dir,
                                      snapdop_scenario** out) {
    if (config_json_text == nullptr || out == nullptr) {
        return invalid("text and out must be non-null");
    }
    return guarded([&]() {
        auto scenario = std::make_unique<snapdop_scenario>();
        scenario->config = scenario_config_from_json(config_json_text,
                                                     base_dir != nullptr ? base_dir : ".");
        *out = scenario.release();
    });
}

snapdop_status snapdop_scenario_set_seed(snapdop_scenario* scenario, uint64_t seed) {
    if (scenario == nullptr) return invalid("scenario must be non-null");
    scenario->config.seed = seed;
    return SNAPDOP_OK;
}

snapdop_status snapdop_scenario_config_json(const snapdop_scenario* scenario,
                                            char** json_out) {
    if (scenario == nullptr || json_out == nullptr) {
        return invalid("scenario and out must be non-null");
    }
    return guarded([&]() { *json_out = dup_string(scenario_config_to_json(scenario->config)); });
}

snapdop_status snapdop_simulate(const snapdop_scenario* scenario, const char* out_dir,
                                char** report_json_out) {
    if (scenario == nullptr || out_dir == nullptr) {
        return invalid("scenario and out_dir must be non-null");
    }
    return guarded([&]() {
        const Scenario result = generate_scenario(scenario->config);
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        const std::string dir(out_dir);

        std::map<std::string, std::string> files;
        files["rover_observations.csv"] = observations_to_csv(result.rover_observations);
        files["base_observations.csv"] = observations_to_csv(result.base_observations);
        files["stations.csv"] = stations_to_csv(result.stations);
        files["broadcast.tle"] = result.truth.broadcast_tle_text;
        files["truth.json"] = truth_to_json(result.truth);

        nlohmann::json digests = nlohmann::json::object();
        for (const auto& [name, content] : files) {
            write_file(dir + "/" + name, content);
            digests[name] = fnv1a_hex(content);
        }
        if (report_json_out != nullptr) {
            const nlohmann::json doc{
                {"schema_version", kSchemaVersion},
                {"rover_observations", result.rover_observations.size()},
                {"base_observations", result.base_observations.size()},
                {"satellites", result.truth.broadcast_tles.size()},
                {"file_digests", digests}};
            *report_json_out = dup_string(doc.dump(2) + "\n");
        }
    });
}

snapdop_status snapdop_monte_carlo(const snapdop_scenario* scenario, int n_trials,
                                   int threads, const char* out_dir,
                                   char** summary_json_out) {
    if (scenario == nullptr) return invalid("scenario must be non-null");
    return guarded([&]() {
        const MonteCarloResult result = monte_carlo(scenario->config, n_trials, threads);
        const std::string summary = monte_carlo_summary_to_json(result.summary);
        if (out_dir != nullptr) {
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            write_file(std::string(out_dir) + "/trials.csv", trials_to_csv(result.trials));
            write_file(std::string(out_dir) + "/summary.json", summary);
        }
        if (summary_json_out != nullptr) {
            *summary_json_out = dup_string(summary);
        }
    });
}

void snapdop_scenario_free(snapdop_scenario* scenario) { delete scenario; }

}  // extern "C"
