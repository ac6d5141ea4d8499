#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vkd {

/// Seconds since epoch. Fractional values are allowed.
using Seconds = double;

/// One raw GPS fix after ingestion. Coordinates are meters relative to the
/// configured reference point; the original lon/lat are kept for provenance.
struct GpsPoint {
    std::string vehicle_id;
    Seconds timestamp = 0;
    double x = 0;  // meters east of the reference point
    double y = 0;  // meters north of the reference point
    std::optional<double> raw_lon;
    std::optional<double> raw_lat;
    std::optional<int> status;  // occupancy flag when the feed carries one
};

/// Directed space-time segment between two consecutive fixes of one vehicle.
/// Invariant: end_t > start_t. Zero spatial length is valid (stationary vehicle).
struct TravelVector {
    double start_x = 0, start_y = 0;
    double end_x = 0, end_y = 0;
    Seconds start_t = 0, end_t = 0;
    std::string vehicle_id;

    double dx() const { return end_x - start_x; }
    double dy() const { return end_y - start_y; }
    double duration() const { return end_t - start_t; }
    double length() const { return std::hypot(dx(), dy()); }
};

/// Half-open time slot [start_t, end_t). Consecutive indices tile the horizon.
struct TimeSlot {
    std::size_t index = 0;
    Seconds start_t = 0;
    Seconds end_t = 0;

    double duration() const { return end_t - start_t; }
};

/// Analysis horizon [start_t, end_t].
struct TimeRange {
    Seconds start_t = 0;
    Seconds end_t = 0;
};

inline constexpr double kMetersPerDegree = 111320.0;

/// Local equirectangular projection around a reference point:
///   x = (lon - ref_lon) * cos(ref_lat) * 111320
///   y = (lat - ref_lat) * 111320
/// Caller guarantees |lat| < 90.
std::pair<double, double> project_coords(double lon, double lat,
                                         double ref_lon, double ref_lat);

/// Inverse of project_coords (used when writing synthetic fixes as lon/lat).
std::pair<double, double> unproject_coords(double x, double y,
                                           double ref_lon, double ref_lat);

enum class TimestampFormat { epoch_seconds, iso8601 };

/// Maps delimited-text columns onto GpsPoint fields. Column indices are
/// 0-based; status_col = -1 means the feed has no status column.
struct SchemaConfig {
    char delimiter = ',';
    int vehicle_col = 0;
    int time_col = 1;
    int lon_col = 2;
    int lat_col = 3;
    int status_col = 4;
    TimestampFormat time_format = TimestampFormat::epoch_seconds;
    double ref_lon = 0;
    double ref_lat = 0;
};

struct ParseReport {
    std::size_t lines_total = 0;
    std::size_t points_parsed = 0;
    std::size_t skipped = 0;
    std::vector<std::size_t> first_bad_lines;  // 1-based, capped at 10
};

/// Parses one GPS fix per line. Malformed rows are skipped and counted,
/// never fatal; a stream that cannot be read at all throws std::runtime_error.
std::vector<GpsPoint> parse_points(std::istream& in, const SchemaConfig& schema,
                                   ParseReport& report);

/// Groups points by vehicle, sorts each group by timestamp and drops
/// duplicate timestamps (first occurrence wins).
std::map<std::string, std::vector<GpsPoint>> group_by_vehicle(
    std::vector<GpsPoint> points);

/// Pair filters. nullopt disables a filter entirely.
struct FilterConfig {
    std::optional<double> max_gap_seconds = 600.0;
    std::optional<double> max_speed_mps = 50.0;
    bool occupied_only = false;  // require status == 1 on both endpoints
};

struct FilterReport {
    std::size_t vectors_built = 0;
    std::size_t gap_rejected = 0;
    std::size_t speed_rejected = 0;
    std::size_t status_rejected = 0;
};

/// One TravelVector per consecutive point pair, minus filtered pairs.
std::vector<TravelVector> build_travel_vectors(
    const std::map<std::string, std::vector<GpsPoint>>& per_vehicle,
    const FilterConfig& filter, FilterReport& report);

/// Clips a vector to a slot by time ratio, interpolating both space and time.
/// Returns nullopt when the time intersection is empty or a single instant.
/// A vector already inside the slot is returned unchanged, bit for bit.
std::optional<TravelVector> clip_to_slot(const TravelVector& v, const TimeSlot& slot);

}  // namespace vkd
