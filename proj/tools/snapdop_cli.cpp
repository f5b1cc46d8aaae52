// Command-line front end for the snapdop shared library. All domain work
// goes through the C API in snapdop/snapdop.h; this file only parses
// arguments, moves files and assembles run reports.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "snapdop/snapdop.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitGenerationError = 3;
constexpr int kExitNoCommonSatellite = 4;
constexpr int kExitNotConverged = 5;

struct StringGuard {
    char* value = nullptr;
    ~StringGuard() { snapdop_string_free(value); }
    std::string str() const { return value != nullptr ? std::string(value) : std::string(); }
};

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

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

json digest_inputs(const std::vector<std::string>& paths) {
    json digests = json::object();
    for (const auto& path : paths) {
        if (path.empty()) continue;
        const auto content = read_file(path);
        digests[path] = content ? fnv1a_hex(*content) : "unreadable";
    }
    return digests;
}

// One report per run; wall time is the only wall-clock-dependent field.
class ReportBuilder {
public:
    ReportBuilder(std::string command, const std::vector<std::string>& inputs)
        : start_(std::chrono::steady_clock::now()) {
        report_["schema_version"] = 1;
        report_["command"] = std::move(command);
        report_["inputs"] = digest_inputs(inputs);
        report_["warnings"] = json::array();
    }

    void set(const std::string& key, json value) { report_[key] = std::move(value); }

    void warn(const std::string& message) { report_["warnings"].push_back(message); }

    bool write(const std::string& path) {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        report_["wall_time_s"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        return write_file(path, report_.dump(2) + "\n");
    }

private:
    json report_;
    std::chrono::steady_clock::time_point start_;
};

int fail(int code, const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return code;
}

// Missing or malformed inputs exit 2; failures while producing outputs exit 3
// (callers handle their write paths explicitly).
int fail_status(snapdop_status status, const std::string& what) {
    const std::string message =
        what + ": " + snapdop_status_name(status) + ": " + snapdop_last_error();
    switch (status) {
        case SNAPDOP_E_NO_COMMON_SATELLITE:
            return fail(kExitNoCommonSatellite, message);
        case SNAPDOP_E_INSUFFICIENT_COMMON_VISIBILITY:
        case SNAPDOP_E_PROPAGATION_DIVERGED:
            return fail(kExitGenerationError, message);
        default:
            return fail(kExitBadInput, message);
    }
}

std::optional<std::uint64_t> seed_override(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return flag_seed;
    const char* env = std::getenv("SNAPDOP_SEED");
    if (env != nullptr && *env != '\0') {
        return std::strtoull(env, nullptr, 10);
    }
    return std::nullopt;
}

std::string command_echo(int argc, char** argv) {
    std::string echo;
    for (int i = 0; i < argc; ++i) {
        if (i) echo += ' ';
        echo += argv[i];
    }
    return echo;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::optional<std::uint64_t>& seed_flag, const std::string& echo) {
    snapdop_scenario* scenario = nullptr;
    snapdop_status status = snapdop_scenario_load(config_path.c_str(), &scenario);
    if (status != SNAPDOP_OK) return fail_status(status, "loading config");

    const auto seed = seed_override(seed_flag);
    if (seed) snapdop_scenario_set_seed(scenario, *seed);

    ReportBuilder report(echo, {config_path});
    StringGuard config_echo;
    snapdop_scenario_config_json(scenario, &config_echo.value);
    report.set("config", json::parse(config_echo.str()));

    StringGuard generation;
    status = snapdop_simulate(scenario, out_dir.c_str(), &generation.value);
    snapdop_scenario_free(scenario);
    if (status != SNAPDOP_OK) {
        if (status == SNAPDOP_E_CONFIG || status == SNAPDOP_E_INVALID_ARGUMENT) {
            return fail_status(status, "validating config");
        }
        return fail(kExitGenerationError,
                    std::string("generating scenario: ") + snapdop_last_error());
    }
    const json generation_doc = json::parse(generation.str());
    report.set("results", generation_doc);
    if (!report.write(out_dir + "/report.json")) {
        return fail(kExitGenerationError, "cannot write report to '" + out_dir + "'");
    }
    std::cout << "simulated scenario: " << generation_doc["rover_observations"]
              << " rover and " << generation_doc["base_observations"]
              << " base observations from " << generation_doc["satellites"]
              << " satellites -> " << out_dir << "\n";
    return kExitOk;
}

struct SolveArgs {
    std::string rover_path;
    std::string base_path;
    std::string stations_path;
    std::string tle_path;
    std::string truth_path;
    std::string out_dir = ".";
    bool differential = false;
    std::optional<double> fix_altitude_m;
    double max_extrapolation_s = 10.0;
    double match_max_distance_m = 100000.0;
    double match_ambiguity_ratio = 2.0;
    bool estimate_base_clock = false;
};

int cmd_solve(const SolveArgs& args, const std::string& echo) {
    if (args.differential && args.base_path.empty()) {
        return fail(kExitBadInput, "--differential requires --base");
    }

    snapdop_tleset* tles = nullptr;
    snapdop_status status = snapdop_tleset_load(args.tle_path.c_str(), 0, &tles);
    if (status != SNAPDOP_OK) return fail_status(status, "loading TLEs");

    const char* stations = args.stations_path.empty() ? nullptr : args.stations_path.c_str();
    snapdop_dataset* rover = nullptr;
    status = snapdop_dataset_load(args.rover_path.c_str(), stations, &rover);
    if (status != SNAPDOP_OK) {
        snapdop_tleset_free(tles);
        return fail_status(status, "loading rover observations");
    }

    ReportBuilder report(echo,
                         {args.rover_path, args.base_path, args.stations_path, args.tle_path});

    // Spatial matching for any rows without a NORAD identity.
    StringGuard match_report;
    status = snapdop_dataset_match(rover, tles, args.match_max_distance_m,
                                   args.match_ambiguity_ratio, &match_report.value);
    if (status != SNAPDOP_OK) {
        snapdop_dataset_free(rover);
        snapdop_tleset_free(tles);
        return fail_status(status, "matching rover observations");
    }
    report.set("rover_matching", json::parse(match_report.str()));

    snapdop_dataset* base = nullptr;
    if (args.differential) {
        status = snapdop_dataset_load(args.base_path.c_str(), stations, &base);
        if (status != SNAPDOP_OK) {
            snapdop_dataset_free(rover);
            snapdop_tleset_free(tles);
            return fail_status(status, "loading base observations");
        }
        StringGuard base_match;
        status = snapdop_dataset_match(base, tles, args.match_max_distance_m,
                                       args.match_ambiguity_ratio, &base_match.value);
        if (status != SNAPDOP_OK) {
            snapdop_dataset_free(base);
            snapdop_dataset_free(rover);
            snapdop_tleset_free(tles);
            return fail_status(status, "matching base observations");
        }
        report.set("base_matching", json::parse(base_match.str()));
    }

    snapdop_solver_options options;
    snapdop_solver_options_init(&options);
    if (args.fix_altitude_m) {
        options.fix_altitude = 1;
        options.fixed_altitude_m = *args.fix_altitude_m;
    }
    options.estimate_base_clock = args.estimate_base_clock ? 1 : 0;

    snapdop_result* result = nullptr;
    if (args.differential) {
        status = snapdop_solve_differential(rover, base, tles, &options,
                                            args.max_extrapolation_s, &result);
    } else {
        status = snapdop_solve_standalone(rover, tles, &options, &result);
    }
    snapdop_dataset_free(base);
    snapdop_dataset_free(rover);
    snapdop_tleset_free(tles);
    if (status != SNAPDOP_OK) return fail_status(status, "solving");

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);

    StringGuard result_json, residual_csv;
    snapdop_result_to_json(result, &result_json.value);
    snapdop_result_residual_csv(result, &residual_csv.value);
    bool wrote = write_file(args.out_dir + "/result.json", result_json.str()) &&
                 write_file(args.out_dir + "/residuals.csv", residual_csv.str());
    if (args.differential) {
        StringGuard series_csv;
        snapdop_result_error_series_csv(result, &series_csv.value);
        wrote = wrote && write_file(args.out_dir + "/error_series.csv", series_csv.str());
    }
    if (!wrote) {
        snapdop_result_free(result);
        return fail(kExitGenerationError, "cannot write results to '" + args.out_dir + "'");
    }

    double lat, lon, alt, f_o, f_drift, t_ref, rmse;
    int converged, iterations;
    snapdop_result_state(result, &lat, &lon, &alt, &f_o, &f_drift, &t_ref);
    snapdop_result_stats(result, &converged, &iterations, &rmse);
    snapdop_result_free(result);

    json results{{"mode", args.differential ? "differential" : "standalone"},
                 {"lat_deg", lat},
                 {"lon_deg", lon},
                 {"alt_m", alt},
                 {"clock_offset_hz", f_o},
                 {"clock_drift_hz_s", f_drift},
                 {"reference_epoch_unix_s", t_ref},
                 {"converged", converged != 0},
                 {"iterations", iterations},
                 {"final_rmse_hz", rmse}};

    std::printf("%s fix: lat %.6f deg, lon %.6f deg, alt %.1f m, clock %.2f Hz %+.4f Hz/s, "
                "rmse %.2f Hz, %s in %d iterations\n",
                args.differential ? "differential" : "standalone", lat, lon, alt, f_o,
                f_drift, rmse, converged != 0 ? "converged" : "NOT converged", iterations);

    if (!args.truth_path.empty()) {
        const auto truth_text = read_file(args.truth_path);
        if (truth_text) {
            try {
                const json truth = json::parse(*truth_text);
                const json& rt = truth.at("config").at("rover_truth");
                double err = 0.0;
                if (snapdop_horizontal_error(lat, lon, alt, rt.at("lat_deg").get<double>(),
                                             rt.at("lon_deg").get<double>(),
                                             rt.at("alt_m").get<double>(),
                                             &err) == SNAPDOP_OK) {
                    std::printf("horizontal error vs truth: %.1f m\n", err);
                    results["horizontal_error_vs_truth_m"] = err;
                }
            } catch (const json::exception& e) {
                report.warn(std::string("cannot read truth file: ") + e.what());
            }
        } else {
            report.warn("truth file not readable: " + args.truth_path);
        }
    }

    report.set("results", results);
    if (!report.write(args.out_dir + "/report.json")) {
        return fail(kExitGenerationError, "cannot write report to '" + args.out_dir + "'");
    }
    return converged != 0 ? kExitOk : kExitNotConverged;
}

int cmd_montecarlo(const std::string& config_path, int trials, int threads,
                   const std::string& out_dir, const std::optional<std::uint64_t>& seed_flag,
                   const std::string& echo) {
    if (trials < 1) return fail(kExitBadInput, "--trials must be >= 1");
    snapdop_scenario* scenario = nullptr;
    snapdop_status status = snapdop_scenario_load(config_path.c_str(), &scenario);
    if (status != SNAPDOP_OK) return fail_status(status, "loading config");
    const auto seed = seed_override(seed_flag);
    if (seed) snapdop_scenario_set_seed(scenario, *seed);

    ReportBuilder report(echo, {config_path});
    StringGuard config_echo;
    snapdop_scenario_config_json(scenario, &config_echo.value);
    report.set("config", json::parse(config_echo.str()));

    StringGuard summary;
    status = snapdop_monte_carlo(scenario, trials, threads, out_dir.c_str(), &summary.value);
    snapdop_scenario_free(scenario);
    if (status == SNAPDOP_E_IO) {
        return fail(kExitGenerationError,
                    std::string("writing Monte Carlo outputs: ") + snapdop_last_error());
    }
    if (status != SNAPDOP_OK) return fail_status(status, "running Monte Carlo");

    const json summary_doc = json::parse(summary.str());
    report.set("results", summary_doc);
    if (!report.write(out_dir + "/report.json")) {
        return fail(kExitGenerationError, "cannot write report to '" + out_dir + "'");
    }

    const int failures = summary_doc["failures"].get<int>();
    std::printf("monte carlo: %d trials, %d failures\n", trials, failures);
    std::printf("  median standalone error   %.1f m\n",
                summary_doc["median_standalone_m"].get<double>());
    std::printf("  median differential error %.1f m\n",
                summary_doc["median_differential_m"].get<double>());
    std::printf("  median reduction          %.3f\n",
                summary_doc["median_reduction"].get<double>());
    std::printf("  differential wins         %.2f\n",
                summary_doc["differential_win_fraction"].get<double>());
    if (failures >= trials) {
        return fail(kExitGenerationError, "all trials failed");
    }
    return kExitOk;
}

int cmd_match(const std::string& obs_path, const std::string& tle_path,
              const std::string& out_path, double max_distance_m, double ambiguity_ratio,
              const std::string& echo) {
    snapdop_tleset* tles = nullptr;
    snapdop_status status = snapdop_tleset_load(tle_path.c_str(), 0, &tles);
    if (status != SNAPDOP_OK) return fail_status(status, "loading TLEs");
    snapdop_dataset* dataset = nullptr;
    status = snapdop_dataset_load(obs_path.c_str(), nullptr, &dataset);
    if (status != SNAPDOP_OK) {
        snapdop_tleset_free(tles);
        return fail_status(status, "loading observations");
    }
    ReportBuilder report(echo, {obs_path, tle_path});
    StringGuard match_report;
    status = snapdop_dataset_match(dataset, tles, max_distance_m, ambiguity_ratio,
                                   &match_report.value);
    snapdop_tleset_free(tles);
    if (status != SNAPDOP_OK) {
        snapdop_dataset_free(dataset);
        return fail_status(status, "matching");
    }
    StringGuard csv;
    snapdop_dataset_to_csv(dataset, &csv.value);
    snapdop_dataset_free(dataset);
    if (!write_file(out_path, csv.str())) {
        return fail(kExitGenerationError, "cannot write '" + out_path + "'");
    }
    const json match_doc = json::parse(match_report.str());
    report.set("results", match_doc);
    if (!report.write(out_path + ".report.json")) {
        return fail(kExitGenerationError, "cannot write sidecar report");
    }
    std::cout << "matched " << match_doc["matched"] << " observations ("
              << match_doc["already_matched"] << " already matched, "
              << match_doc["failures"].size() << " flagged) -> " << out_path << "\n";
    return kExitOk;
}

int cmd_export_plot(const std::string& result_dir, const std::string& out_path,
                    const std::string& echo) {
    const std::string residuals_path = result_dir + "/residuals.csv";
    const auto content = read_file(residuals_path);
    if (!content) {
        return fail(kExitBadInput, "no residuals.csv under '" + result_dir +
                                       "' (run solve first)");
    }
    const std::string expected_header = "norad_id,time_unix_s,f_meas_hz,f_pred_hz,residual_hz";
    if (content->rfind(expected_header, 0) != 0) {
        return fail(kExitBadInput, "unexpected residuals.csv header in '" + residuals_path +
                                       "'");
    }
    ReportBuilder report(echo, {residuals_path});
    if (!write_file(out_path, *content)) {
        return fail(kExitGenerationError, "cannot write '" + out_path + "'");
    }
    report.set("results", json{{"rows", std::count(content->begin(), content->end(), '\n') - 1},
                               {"output", out_path}});
    if (!report.write(out_path + ".report.json")) {
        return fail(kExitGenerationError, "cannot write sidecar report");
    }
    std::cout << "exported plot data -> " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"snapshot differential Doppler positioning with LEO signals of opportunity"};
    app.require_subcommand(1);
    const std::string echo = command_echo(argc, argv);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario");
    std::string sim_config, sim_out = ".";
    std::optional<std::uint64_t> sim_seed;
    simulate->add_option("--config", sim_config, "scenario config JSON")->required();
    simulate->add_option("--out", sim_out, "output directory")->required();
    simulate->add_option("--seed", sim_seed, "override the config seed");

    // solve
    auto* solve = app.add_subcommand("solve", "estimate a rover position from observations");
    SolveArgs solve_args;
    solve->add_option("--rover", solve_args.rover_path, "rover observations CSV")->required();
    solve->add_option("--base", solve_args.base_path, "base observations CSV");
    solve->add_option("--stations", solve_args.stations_path, "station metadata CSV");
    solve->add_option("--tle", solve_args.tle_path, "TLE file")->required();
    solve->add_flag("--differential", solve_args.differential,
                    "apply base-station differential corrections");
    solve->add_option("--fix-altitude", solve_args.fix_altitude_m,
                      "fix the altitude parameter to this value [m]");
    solve->add_option("--max-extrapolation", solve_args.max_extrapolation_s,
                      "error series extrapolation limit [s]");
    solve->add_flag("--estimate-base-clock", solve_args.estimate_base_clock,
                    "estimate a constant base clock offset from the error series");
    solve->add_option("--truth", solve_args.truth_path,
                      "truth.json from simulate; prints horizontal error");
    solve->add_option("--out", solve_args.out_dir, "output directory");
    solve->add_option("--match-max-distance", solve_args.match_max_distance_m,
                      "satellite matching distance limit [m]");
    solve->add_option("--match-ambiguity-ratio", solve_args.match_ambiguity_ratio,
                      "satellite matching ambiguity ratio");

    // montecarlo
    auto* montecarlo = app.add_subcommand("montecarlo", "run seeded end-to-end trials");
    std::string mc_config, mc_out = ".";
    int mc_trials = 100;
    int mc_threads = 1;
    std::optional<std::uint64_t> mc_seed;
    montecarlo->add_option("--config", mc_config, "scenario config JSON")->required();
    montecarlo->add_option("--trials", mc_trials, "number of trials")->required();
    montecarlo->add_option("--threads", mc_threads, "worker threads");
    montecarlo->add_option("--out", mc_out, "output directory")->required();
    montecarlo->add_option("--seed", mc_seed, "override the config seed");

    // match
    auto* match = app.add_subcommand("match", "assign NORAD ids from reported positions");
    std::string match_obs, match_tle, match_out;
    double match_distance = 100000.0, match_ratio = 2.0;
    match->add_option("--obs", match_obs, "observations CSV")->required();
    match->add_option("--tle", match_tle, "TLE file")->required();
    match->add_option("--out", match_out, "matched observations CSV")->required();
    match->add_option("--max-distance", match_distance, "distance limit [m]");
    match->add_option("--ambiguity-ratio", match_ratio, "ambiguity ratio");

    // export-plot
    auto* export_plot = app.add_subcommand("export-plot", "emit plot-ready Doppler series");
    std::string plot_result, plot_out;
    export_plot->add_option("--result", plot_result, "solve output directory")->required();
    export_plot->add_option("--out", plot_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    if (simulate->parsed()) return cmd_simulate(sim_config, sim_out, sim_seed, echo);
    if (solve->parsed()) return cmd_solve(solve_args, echo);
    if (montecarlo->parsed()) {
        return cmd_montecarlo(mc_config, mc_trials, mc_threads, mc_out, mc_seed, echo);
    }
    if (match->parsed()) return cmd_match(match_obs, match_tle, match_out, match_distance,
                                          match_ratio, echo);
    if (export_plot->parsed()) return cmd_export_plot(plot_result, plot_out, echo);
    return kExitBadInput;
}
