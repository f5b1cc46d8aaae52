#ifndef SNAPDOP_CORE_TLE_HPP
#define SNAPDOP_CORE_TLE_HPP

#include <optional>
#include <string>
#include <vector>

namespace snapdop {

// One parsed two-line element set. Drag fields hold the values as encoded in
// the standard layout (first derivative field is n-dot/2 in rev/day^2, second
// derivative field is n-ddot/6 in rev/day^3).
struct TleRecord {
    int norad_id = 0;
    std::optional<std::string> name;
    double epoch_unix_s = 0.0;
    double mean_motion_rev_day = 0.0;
    double eccentricity = 0.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double arg_perigee_deg = 0.0;
    double mean_anomaly_deg = 0.0;
    double bstar = 0.0;
    double mean_motion_dot = 0.0;
    double mean_motion_ddot = 0.0;

    // Carried through for faithful serialization.
    char classification = 'U';
    std::string intl_designator;
    int ephemeris_type = 0;
    int element_set_number = 0;
    int revolution_number = 0;
};

struct TleParseIssue {
    int line_number = 0;  // 1-based line of the offending text
    std::string message;
};

struct TleParseResult {
    std::vector<TleRecord> records;
    int skipped_sets = 0;
    std::vector<TleParseIssue> issues;
};

// Modulo-10 checksum over the first 68 characters (digits count, '-' counts 1).
int tle_line_checksum(const std::string& line);

// Parses zero or more 2-line (or name-prefixed 3-line) element sets. In
// strict mode the first malformed or checksum-failing set throws
// (ChecksumMismatch / MalformedLine, message carries the line number);
// otherwise the set is skipped and counted.
TleParseResult parse_tles(const std::string& text, bool strict = false);

TleParseResult parse_tle_file(const std::string& path, bool strict = false);

// Renders the record back to the standard two 69-character lines with valid
// checksums. Field values survive a serialize/parse round trip exactly
// because the column precision matches the parse precision.
std::pair<std::string, std::string> serialize_tle(const TleRecord& record);

}  // namespace snapdop

#endif
