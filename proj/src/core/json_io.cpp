#include "core/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace snapdop {

using nlohmann::json;

namespace {

double get_number(const json& node, const char* field, double fallback,
                  const std::string& context) {
    if (!node.contains(field)) return fallback;
    if (!node[field].is_number()) {
        raise(ErrorCode::ConfigError,
              "config field '" + context + field + "' must be a number");
    }
    return node[field].get<double>();
}

GeodeticPosition get_position(const json& root, const char* field,
                              const GeodeticPosition& fallback) {
    if (!root.contains(field)) return fallback;
    const json& node = root[field];
    if (!node.is_object()) {
        raise(ErrorCode::ConfigError, std::string("config field '") + field +
                                          "' must be an object with lat_deg/lon_deg/alt_m");
    }
    const std::string context = std::string(field) + ".";
    GeodeticPosition p;
    p.latitude_deg = get_number(node, "lat_deg", fallback.latitude_deg, context);
    p.longitude_deg = get_number(node, "lon_deg", fallback.longitude_deg, context);
    p.altitude_m = get_number(node, "alt_m", fallback.altitude_m, context);
    return p;
}

json position_to_json(const GeodeticPosition& p) {
    return json{{"lat_deg", p.latitude_deg},
                {"lon_deg", p.longitude_deg},
                {"alt_m", p.altitude_m}};
}

json state_to_json(const StateVector& state) {
    return json{{"lat_deg", state.latitude_deg},
                {"lon_deg", state.longitude_deg},
                {"alt_m", state.altitude_m},
                {"clock_offset_hz", state.clock_offset_hz},
                {"clock_drift_hz_s", state.clock_drift_hz_s},
                {"reference_epoch_unix_s", state.reference_epoch_unix_s}};
}

json solve_result_to_json_obj(const SolveResult& result) {
    json counts = json::object();
    for (const auto& [norad, count] : result.per_satellite_counts) {
        counts[std::to_string(norad)] = count;
    }
    json covariance = json::array();
    for (const auto& row : result.covariance) {
        covariance.push_back(row);
    }
    return json{{"schema_version", kSchemaVersion},
                {"state", state_to_json(result.state)},
                {"converged", result.converged},
                {"iterations", result.iterations},
                {"final_rmse_hz", result.final_rmse_hz},
                {"residuals_hz", result.residuals},
                {"covariance", covariance},
                {"per_satellite_counts", counts},
                {"condition_estimate", result.condition_estimate},
                {"warnings", result.warnings}};
}

}  // namespace

ScenarioConfig scenario_config_from_json(const std::string& json_text,
                                         const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& err) {
        raise(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) {
        raise(ErrorCode::ConfigError, "config root must be a JSON object");
    }

    ScenarioConfig config;
    config.rover_truth = get_position(root, "rover_truth", config.rover_truth);
    config.base_position = get_position(root, "base_position", config.base_position);

    if (root.contains("tle_set")) {
        if (!root["tle_set"].is_array()) {
            raise(ErrorCode::ConfigError, "config field 'tle_set' must be an array of lines");
        }
        std::string text;
        for (const auto& line : root["tle_set"]) {
            if (!line.is_string()) {
                raise(ErrorCode::ConfigError, "config field 'tle_set' entries must be strings");
            }
            text += line.get<std::string>();
            text += '\n';
        }
        config.tle_set = parse_tles(text, true).records;
    } else if (root.contains("tle_file")) {
        if (!root["tle_file"].is_string()) {
            raise(ErrorCode::ConfigError, "config field 'tle_file' must be a string path");
        }
        std::string path = root["tle_file"].get<std::string>();
        if (!path.empty() && path.front() != '/' && !base_dir.empty()) {
            path = base_dir + "/" + path;
        }
        config.tle_set = parse_tle_file(path, true).records;
    } else {
        raise(ErrorCode::ConfigError, "config requires 'tle_set' lines or a 'tle_file' path");
    }

    if (!root.contains("window") || !root["window"].is_object() ||
        !root["window"].contains("start_unix_s")) {
        raise(ErrorCode::ConfigError, "config field 'window.start_unix_s' is required");
    }
    config.window_start_unix_s = get_number(root["window"], "start_unix_s", 0.0, "window.");
    config.window_duration_s =
        get_number(root["window"], "duration_s", config.window_duration_s, "window.");

    if (root.contains("rover_burst")) {
        const json& node = root["rover_burst"];
        config.rover_burst.duration_s =
            get_number(node, "duration_s", config.rover_burst.duration_s, "rover_burst.");
        config.rover_burst.period_s =
            get_number(node, "period_s", config.rover_burst.period_s, "rover_burst.");
        config.rover_burst.intra_burst_sample_period_s =
            get_number(node, "intra_burst_sample_period_s",
                       config.rover_burst.intra_burst_sample_period_s, "rover_burst.");
        config.rover_burst.jitter_fraction = get_number(
            node, "jitter_fraction", config.rover_burst.jitter_fraction, "rover_burst.");
    }
    if (root.contains("base_sampling")) {
        config.base_sample_period_s = get_number(
            root["base_sampling"], "sample_period_s", config.base_sample_period_s,
            "base_sampling.");
    }
    config.f_b_hz = get_number(root, "f_b_hz", config.f_b_hz, "");
    if (root.contains("noise")) {
        config.noise.base_sigma_hz =
            get_number(root["noise"], "base_sigma_hz", config.noise.base_sigma_hz, "noise.");
        config.noise.rover_sigma_hz =
            get_number(root["noise"], "rover_sigma_hz", config.noise.rover_sigma_hz, "noise.");
    }
    auto read_clock = [&](const char* field, ClockConfig fallback) {
        if (!root.contains(field)) return fallback;
        const json& node = root[field];
        const std::string context = std::string(field) + ".";
        ClockConfig clock;
        clock.offset_hz = get_number(node, "offset_hz", fallback.offset_hz, context);
        clock.drift_hz_s = get_number(node, "drift_hz_s", fallback.drift_hz_s, context);
        clock.random_walk_hz_sqrt_s =
            get_number(node, "random_walk_hz_per_sqrt_s", fallback.random_walk_hz_sqrt_s,
                       context);
        return clock;
    };
    config.rover_clock = read_clock("rover_clock", config.rover_clock);
    config.base_clock = read_clock("base_clock", config.base_clock);

    if (root.contains("ephemeris_perturbation")) {
        const json& node = root["ephemeris_perturbation"];
        config.ephemeris_perturbation.along_track_m =
            get_number(node, "along_track_m", config.ephemeris_perturbation.along_track_m,
                       "ephemeris_perturbation.");
        config.ephemeris_perturbation.cross_track_m =
            get_number(node, "cross_track_m", config.ephemeris_perturbation.cross_track_m,
                       "ephemeris_perturbation.");
        config.ephemeris_perturbation.radial_m =
            get_number(node, "radial_m", config.ephemeris_perturbation.radial_m,
                       "ephemeris_perturbation.");
    }
    config.elevation_mask_deg =
        get_number(root, "elevation_mask_deg", config.elevation_mask_deg, "");
    config.min_common_satellites = static_cast<int>(get_number(
        root, "min_common_satellites", config.min_common_satellites, ""));
    if (root.contains("seed")) {
        if (root["seed"].is_number_unsigned() || root["seed"].is_number_integer()) {
            config.seed = root["seed"].get<std::uint64_t>();
        } else {
            raise(ErrorCode::ConfigError, "config field 'seed' must be an integer");
        }
    }
    validate_config(config);
    return config;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string dir = ".";
    const auto slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return scenario_config_from_json(buffer.str(), dir);
}

std::string scenario_config_to_json(const ScenarioConfig& config) {
    json tle_lines = json::array();
    for (const auto& rec : config.tle_set) {
        const auto [l1, l2] = serialize_tle(rec);
        tle_lines.push_back(l1);
        tle_lines.push_back(l2);
    }
    const json root{
        {"schema_version", kSchemaVersion},
        {"rover_truth", position_to_json(config.rover_truth)},
        {"base_position", position_to_json(config.base_position)},
        {"tle_set", tle_lines},
        {"window",
         {{"start_unix_s", config.window_start_unix_s},
          {"duration_s", config.window_duration_s}}},
        {"rover_burst",
         {{"duration_s", config.rover_burst.duration_s},
          {"period_s", config.rover_burst.period_s},
          {"intra_burst_sample_period_s", config.rover_burst.intra_burst_sample_period_s},
          {"jitter_fraction", config.rover_burst.jitter_fraction}}},
        {"base_sampling", {{"sample_period_s", config.base_sample_period_s}}},
        {"f_b_hz", config.f_b_hz},
        {"noise",
         {{"base_sigma_hz", config.noise.base_sigma_hz},
          {"rover_sigma_hz", config.noise.rover_sigma_hz}}},
        {"rover_clock",
         {{"offset_hz", config.rover_clock.offset_hz},
          {"drift_hz_s", config.rover_clock.drift_hz_s},
          {"random_walk_hz_per_sqrt_s", config.rover_clock.random_walk_hz_sqrt_s}}},
        {"base_clock",
         {{"offset_hz", config.base_clock.offset_hz},
          {"drift_hz_s", config.base_clock.drift_hz_s},
          {"random_walk_hz_per_sqrt_s", config.base_clock.random_walk_hz_sqrt_s}}},
        {"ephemeris_perturbation",
         {{"along_track_m", config.ephemeris_perturbation.along_track_m},
          {"cross_track_m", config.ephemeris_perturbation.cross_track_m},
          {"radial_m", config.ephemeris_perturbation.radial_m}}},
        {"elevation_mask_deg", config.elevation_mask_deg},
        {"min_common_satellites", config.min_common_satellites},
        {"seed", config.seed}};
    return root.dump(2) + "\n";
}

std::string solve_result_to_json(const SolveResult& result) {
    return solve_result_to_json_obj(result).dump(2) + "\n";
}

std::string differential_result_to_json(const DifferentialResult& result) {
    json applied = json::array();
    for (const auto& entry : result.corrections.applied) {
        applied.push_back(json{{"index", entry.input_index},
                               {"norad_id", entry.norad_id},
                               {"time_unix_s", entry.time_unix_s},
                               {"correction_hz", entry.correction_hz}});
    }
    json skipped = json::array();
    for (const auto& entry : result.corrections.skipped) {
        skipped.push_back(json{{"index", entry.input_index}, {"reason", entry.reason}});
    }
    json series = json::object();
    for (const auto& [norad, s] : result.error_series) {
        series[std::to_string(norad)] = s.samples.size();
    }
    const json root{{"schema_version", kSchemaVersion},
                    {"solve", solve_result_to_json_obj(result.solve)},
                    {"corrections",
                     {{"applied", applied},
                      {"applied_count", result.corrections.applied.size()},
                      {"skipped", skipped}}},
                    {"error_series_sample_counts", series}};
    return root.dump(2) + "\n";
}

std::string truth_to_json(const ScenarioTruth& truth) {
    auto clock_to_json = [](const ClockTruth& clock) {
        json walk = json::array();
        for (const auto& [t, value] : clock.random_walk) {
            walk.push_back(json::array({t, value}));
        }
        return json{{"offset_hz", clock.offset_hz},
                    {"drift_hz_s", clock.drift_hz_s},
                    {"reference_unix_s", clock.reference_unix_s},
                    {"random_walk", walk}};
    };
    json perturbations = json::array();
    for (const auto& p : truth.perturbations) {
        perturbations.push_back(json{{"norad_id", p.norad_id},
                                     {"along_track_m", p.along_track_m},
                                     {"cross_track_m", p.cross_track_m},
                                     {"radial_m", p.radial_m}});
    }
    auto series_to_json = [](const std::map<int, std::vector<SatStateEcef>>& series_map) {
        json out = json::object();
        for (const auto& [norad, series] : series_map) {
            json rows = json::array();
            for (const auto& state : series) {
                rows.push_back(json::array({state.time_unix_s, state.position_m.x,
                                            state.position_m.y, state.position_m.z,
                                            state.velocity_m_s.x, state.velocity_m_s.y,
                                            state.velocity_m_s.z}));
            }
            out[std::to_string(norad)] = std::move(rows);
        }
        return out;
    };
    json true_tles = json::array();
    for (const auto& rec : truth.config.tle_set) {
        const auto [l1, l2] = serialize_tle(rec);
        true_tles.push_back(l1);
        true_tles.push_back(l2);
    }
    const json root{{"schema_version", kSchemaVersion},
                    {"config", json::parse(scenario_config_to_json(truth.config))},
                    {"true_tle_set", true_tles},
                    {"broadcast_tle_text", truth.broadcast_tle_text},
                    {"perturbations", perturbations},
                    {"rover_clock", clock_to_json(truth.rover_clock)},
                    {"base_clock", clock_to_json(truth.base_clock)},
                    {"true_series", series_to_json(truth.true_series)},
                    {"broadcast_series", series_to_json(truth.broadcast_series)}};
    return root.dump(2) + "\n";
}

std::string monte_carlo_summary_to_json(const MonteCarloSummary& summary) {
    const json root{{"schema_version", kSchemaVersion},
                    {"n_trials", summary.n_trials},
                    {"failures", summary.failures},
                    {"median_standalone_m", summary.median_standalone_m},
                    {"median_differential_m", summary.median_differential_m},
                    {"mean_standalone_m", summary.mean_standalone_m},
                    {"mean_differential_m", summary.mean_differential_m},
                    {"p10_standalone_m", summary.p10_standalone_m},
                    {"p90_standalone_m", summary.p90_standalone_m},
                    {"p10_differential_m", summary.p10_differential_m},
                    {"p90_differential_m", summary.p90_differential_m},
                    {"median_reduction", summary.median_reduction},
                    {"mean_reduction", summary.mean_reduction},
                    {"differential_win_fraction", summary.differential_win_fraction},
                    {"mean_standalone_rmse_hz", summary.mean_standalone_rmse_hz},
                    {"mean_differential_rmse_hz", summary.mean_differential_rmse_hz}};
    return root.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& content) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : content) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace snapdop
