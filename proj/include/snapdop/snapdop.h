/*
 * snapdop - snapshot differential Doppler positioning with LEO signals of
 * opportunity.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns a status
 * code from snapdop_status, with a human-readable message available from
 * snapdop_last_error() (thread local) immediately after a failure.
 *
 * Strings returned through char** out-parameters are heap allocated and must
 * be released with snapdop_string_free().
 */
#ifndef SNAPDOP_H
#define SNAPDOP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SNAPDOP_API __declspec(dllexport)
#else
#define SNAPDOP_API __attribute__((visibility("default")))
#endif

typedef enum snapdop_status {
    SNAPDOP_OK = 0,
    SNAPDOP_E_INVALID_ARGUMENT,
    SNAPDOP_E_CHECKSUM_MISMATCH,
    SNAPDOP_E_MALFORMED_LINE,
    SNAPDOP_E_PROPAGATION_DIVERGED,
    SNAPDOP_E_STALE_EPOCH,
    SNAPDOP_E_DEEP_SPACE_UNSUPPORTED,
    SNAPDOP_E_DEGENERATE_INPUT,
    SNAPDOP_E_DEGENERATE_GEOMETRY,
    SNAPDOP_E_SCHEMA_MISMATCH,
    SNAPDOP_E_ROW_PARSE,
    SNAPDOP_E_INVARIANT_VIOLATION,
    SNAPDOP_E_NO_CANDIDATE,
    SNAPDOP_E_AMBIGUOUS_MATCH,
    SNAPDOP_E_MISSING_EPHEMERIS,
    SNAPDOP_E_UNKNOWN_BASE_POSITION,
    SNAPDOP_E_UNMATCHED_OBSERVATION,
    SNAPDOP_E_OUT_OF_COVERAGE,
    SNAPDOP_E_NO_COMMON_SATELLITE,
    SNAPDOP_E_NO_CROSSING,
    SNAPDOP_E_INSUFFICIENT_DATA,
    SNAPDOP_E_SINGULAR_NORMAL_MATRIX,
    SNAPDOP_E_EMPTY_INPUT,
    SNAPDOP_E_INSUFFICIENT_COMMON_VISIBILITY,
    SNAPDOP_E_CONFIG,
    SNAPDOP_E_IO,
    SNAPDOP_E_INTERNAL
} snapdop_status;

typedef struct snapdop_tleset snapdop_tleset;
typedef struct snapdop_dataset snapdop_dataset;
typedef struct snapdop_result snapdop_result;
typedef struct snapdop_scenario snapdop_scenario;

SNAPDOP_API const char* snapdop_version(void);
SNAPDOP_API const char* snapdop_status_name(snapdop_status status);

/* Message describing the most recent failure on this thread. */
SNAPDOP_API const char* snapdop_last_error(void);

SNAPDOP_API void snapdop_string_free(char* text);

/* ---- TLE sets and propagation ------------------------------------------ */

/* strict != 0: abort on the first malformed set; otherwise skip and count. */
SNAPDOP_API snapdop_status snapdop_tleset_parse(const char* text, int strict,
                                                snapdop_tleset** out);
SNAPDOP_API snapdop_status snapdop_tleset_load(const char* path, int strict,
                                               snapdop_tleset** out);
SNAPDOP_API size_t snapdop_tleset_count(const snapdop_tleset* set);
SNAPDOP_API int snapdop_tleset_skipped(const snapdop_tleset* set);
SNAPDOP_API snapdop_status snapdop_tleset_norad_at(const snapdop_tleset* set, size_t index,
                                                   int* norad_out);
SNAPDOP_API void snapdop_tleset_free(snapdop_tleset* set);

/* TEME state at a UTC Unix instant; meters and meters/second. */
SNAPDOP_API snapdop_status snapdop_propagate_teme(const snapdop_tleset* set, int norad,
                                                  double t_unix_s, double pos_m[3],
                                                  double vel_m_s[3]);
/* Earth-fixed state (TEME rotated by GMST). */
SNAPDOP_API snapdop_status snapdop_propagate_ecef(const snapdop_tleset* set, int norad,
                                                  double t_unix_s, double pos_m[3],
                                                  double vel_m_s[3]);
/* Greenwich mean sidereal time, radians in [0, 2*pi). */
SNAPDOP_API snapdop_status snapdop_gmst(double t_unix_s, double* rad_out);

/* ---- Geodesy ------------------------------------------------------------ */

SNAPDOP_API snapdop_status snapdop_geodetic_to_ecef(double lat_deg, double lon_deg,
                                                    double alt_m, double ecef_m[3]);
SNAPDOP_API snapdop_status snapdop_ecef_to_geodetic(const double ecef_m[3], double* lat_deg,
                                                    double* lon_deg, double* alt_m);
SNAPDOP_API snapdop_status snapdop_horizontal_error(double lat1_deg, double lon1_deg,
                                                    double alt1_m, double lat2_deg,
                                                    double lon2_deg, double alt2_m,
                                                    double* error_m);

/* ---- Observation datasets ----------------------------------------------- */

/* stations_csv_path may be NULL when no station metadata is needed. */
SNAPDOP_API snapdop_status snapdop_dataset_load(const char* observations_csv_path,
                                                const char* stations_csv_path,
                                                snapdop_dataset** out);
SNAPDOP_API size_t snapdop_dataset_count(const snapdop_dataset* dataset);
SNAPDOP_API snapdop_status snapdop_dataset_to_csv(const snapdop_dataset* dataset,
                                                  char** csv_out);
SNAPDOP_API void snapdop_dataset_free(snapdop_dataset* dataset);

/* Fills sat_norad for rows carrying reported positions; *report_json_out
 * (optional) receives a summary of matched/ambiguous/unmatched rows. */
SNAPDOP_API snapdop_status snapdop_dataset_match(snapdop_dataset* dataset,
                                                 const snapdop_tleset* tles,
                                                 double max_distance_m,
                                                 double ambiguity_ratio,
                                                 char** report_json_out);

/* ---- Solving ------------------------------------------------------------ */

typedef struct snapdop_solver_options {
    int max_iterations;         /* default 50 */
    double step_tolerance;      /* scaled step norm, default 1e-8 */
    double cost_tolerance;      /* relative cost change, default 1e-10 */
    double initial_damping;     /* default 1e-3 */
    int fix_altitude;           /* nonzero: pin altitude to fixed_altitude_m */
    double fixed_altitude_m;
    double robust_loss_delta_hz; /* <= 0 disables the Huber loss */
    int estimate_base_clock;     /* differential: estimate a constant base
                                    clock offset from the error series */
} snapdop_solver_options;

SNAPDOP_API void snapdop_solver_options_init(snapdop_solver_options* options);

SNAPDOP_API snapdop_status snapdop_solve_standalone(const snapdop_dataset* rover,
                                                    const snapdop_tleset* tles,
                                                    const snapdop_solver_options* options,
                                                    snapdop_result** out);

/* base must contain exactly one base station with a known position in its
 * station metadata. */
SNAPDOP_API snapdop_status snapdop_solve_differential(const snapdop_dataset* rover,
                                                      const snapdop_dataset* base,
                                                      const snapdop_tleset* tles,
                                                      const snapdop_solver_options* options,
                                                      double max_extrapolation_s,
                                                      snapdop_result** out);

SNAPDOP_API snapdop_status snapdop_result_state(const snapdop_result* result, double* lat_deg,
                                                double* lon_deg, double* alt_m,
                                                double* clock_offset_hz,
                                                double* clock_drift_hz_s,
                                                double* reference_epoch_unix_s);
SNAPDOP_API snapdop_status snapdop_result_stats(const snapdop_result* result, int* converged,
                                                int* iterations, double* final_rmse_hz);
SNAPDOP_API snapdop_status snapdop_result_to_json(const snapdop_result* result,
                                                  char** json_out);
SNAPDOP_API snapdop_status snapdop_result_residual_csv(const snapdop_result* result,
                                                       char** csv_out);
/* Differential solves only; standalone results return SNAPDOP_E_EMPTY_INPUT. */
SNAPDOP_API snapdop_status snapdop_result_error_series_csv(const snapdop_result* result,
                                                           char** csv_out);
SNAPDOP_API void snapdop_result_free(snapdop_result* result);

/* ---- Scenario simulation ------------------------------------------------ */

SNAPDOP_API snapdop_status snapdop_scenario_load(const char* config_json_path,
                                                 snapdop_scenario** out);
SNAPDOP_API snapdop_status snapdop_scenario_parse(const char* config_json_text,
                                                  const char* base_dir,
                                                  snapdop_scenario** out);
SNAPDOP_API snapdop_status snapdop_scenario_set_seed(snapdop_scenario* scenario,
                                                     uint64_t seed);
SNAPDOP_API snapdop_status snapdop_scenario_config_json(const snapdop_scenario* scenario,
                                                        char** json_out);

/* Writes rover_observations.csv, base_observations.csv, stations.csv,
 * broadcast.tle and truth.json into out_dir; *report_json_out (optional)
 * receives a generation summary. */
SNAPDOP_API snapdop_status snapdop_simulate(const snapdop_scenario* scenario,
                                            const char* out_dir, char** report_json_out);

/* Runs n_trials seeded generate+solve trials; writes trials.csv and
 * summary.json into out_dir when it is non-NULL. *summary_json_out (optional)
 * receives the summary document. */
SNAPDOP_API snapdop_status snapdop_monte_carlo(const snapdop_scenario* scenario, int n_trials,
                                               int threads, const char* out_dir,
                                               char** summary_json_out);

SNAPDOP_API void snapdop_scenario_free(snapdop_scenario* scenario);

#ifdef __cplusplus
}
#endif

#endif /* SNAPDOP_H */
