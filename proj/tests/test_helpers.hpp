#ifndef SNAPDOP_TESTS_HELPERS_HPP
#define SNAPDOP_TESTS_HELPERS_HPP

#include <string>
#include <vector>

#include "core/simulator.hpp"
#include "core/time_utils.hpp"

namespace snapdop::test {

inline double scenario_epoch() {
    return time_utils::unix_from_civil(2025, 3, 8, 0, 0, 0.0);
}

// Iridium-like synthetic constellation shared by the scenario tests.
inline const std::vector<TleRecord>& test_constellation() {
    static const std::vector<TleRecord> tles =
        make_walker_constellation(6, 11, 86.4, 14.3421, scenario_epoch(), 90001);
    return tles;
}

inline ScenarioConfig default_test_config() {
    ScenarioConfig config;
    config.tle_set = test_constellation();
    config.window_start_unix_s = scenario_epoch();
    config.seed = 424242;
    return config;
}

inline std::string test_data_dir() { return SNAPDOP_TEST_DATA_DIR; }

struct PassInfo {
    std::size_t sat_index = 0;
    double time_of_max_elevation = 0.0;
    double max_elevation_deg = -90.0;
};

// Highest-elevation pass over the site within the window (coarse 10 s scan).
inline PassInfo find_best_pass(const std::vector<TleRecord>& tles,
                               const GeodeticPosition& site, double t0, double duration) {
    PassInfo best;
    for (std::size_t s = 0; s < tles.size(); ++s) {
        const Propagator prop(tles[s]);
        for (double t = t0; t <= t0 + duration; t += 10.0) {
            const double elev = elevation_angle(prop.ecef_at(t).position_m, site);
            if (elev > best.max_elevation_deg) {
                best.max_elevation_deg = elev;
                best.time_of_max_elevation = t;
                best.sat_index = s;
            }
        }
    }
    return best;
}

}  // namespace snapdop::test

#endif
