#include "vkd/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <istream>
#include <stdexcept>

namespace vkd {

namespace {

constexpr std::size_t kMaxReportedBadLines = 10;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    return std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = static_cast<int>(v);
    return true;
}

// Accepts "YYYY-MM-DD HH:MM:SS" or "YYYY-MM-DDTHH:MM:SS", optional
// fractional seconds and trailing 'Z'. Interpreted as UTC.
bool parse_iso8601(const std::string& s, double& out) {
    int year, mon, day, hour, min;
    double sec;
    char sep;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%lf%n", &year, &mon, &day,
                    &sep, &hour, &min, &sec, &consumed) != 7)
        return false;
    if (sep != 'T' && sep != ' ') return false;
    std::string rest = s.substr(consumed);
    if (!rest.empty() && rest != "Z") return false;
    if (mon < 1 || mon > 12 || day < 1 || day > 31) return false;
    if (hour < 0 || hour > 23 || min < 0 || min > 59 || sec < 0 || sec >= 61)
        return false;

    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = mon - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = min;
    tm.tm_sec = 0;
    std::time_t base = timegm(&tm);
    if (base == static_cast<std::time_t>(-1)) return false;
    out = static_cast<double>(base) + sec;
    return true;
}

void split_line(const std::string& line, char delim, std::vector<std::string>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::pair<double, double> project_coords(double lon, double lat,
                                         double ref_lon, double ref_lat) {
    double x = (lon - ref_lon) * std::cos(ref_lat * kDegToRad) * kMetersPerDegree;
    double y = (lat - ref_lat) * kMetersPerDegree;
    return {x, y};
}

std::pair<double, double> unproject_coords(double x, double y,
                                           double ref_lon, double ref_lat) {
    double lon = ref_lon + x / (std::cos(ref_lat * kDegToRad) * kMetersPerDegree);
    double lat = ref_lat + y / kMetersPerDegree;
    return {lon, lat};
}

std::vector<GpsPoint> parse_points(std::istream& in, const SchemaConfig& schema,
                                   ParseReport& report) {
    if (in.fail()) throw std::runtime_error("parse_points: unreadable input stream");

    report = ParseReport{};
    std::vector<GpsPoint> points;
    std::string line;
    std::vector<std::string> cols;

    int max_col = std::max({schema.vehicle_col, schema.time_col, schema.lon_col,
                            schema.lat_col, schema.status_col});

    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++report.lines_total;

        auto reject = [&] {
            ++report.skipped;
            if (report.first_bad_lines.size() < kMaxReportedBadLines)
                report.first_bad_lines.push_back(line_no);
        };

        split_line(line, schema.delimiter, cols);
        if (static_cast<int>(cols.size()) <= max_col) {
            reject();
            continue;
        }

        GpsPoint p;
        p.vehicle_id = cols[schema.vehicle_col];
        if (p.vehicle_id.empty()) {
            reject();
            continue;
        }

        double ts = 0;
        bool ts_ok = schema.time_format == TimestampFormat::epoch_seconds
                         ? parse_double(cols[schema.time_col], ts)
                         : parse_iso8601(cols[schema.time_col], ts);
        if (!ts_ok) {
            reject();
            continue;
        }
        p.timestamp = ts;

        double lon = 0, lat = 0;
        if (!parse_double(cols[schema.lon_col], lon) ||
            !parse_double(cols[schema.lat_col], lat) || std::abs(lat) >= 90.0) {
            reject();
            continue;
        }
        p.raw_lon = lon;
        p.raw_lat = lat;
        auto [x, y] = project_coords(lon, lat, schema.ref_lon, schema.ref_lat);
        p.x = x;
        p.y = y;

        if (schema.status_col >= 0) {
            int st = 0;
            if (!parse_int(cols[schema.status_col], st)) {
                reject();
                continue;
            }
            p.status = st;
        }

        points.push_back(std::move(p));
        ++report.points_parsed;
    }
    return points;
}

std::map<std::string, std::vector<GpsPoint>> group_by_vehicle(
    std::vector<GpsPoint> points) {
    std::map<std::string, std::vector<GpsPoint>> groups;
    for (auto& p : points) groups[p.vehicle_id].push_back(std::move(p));
    for (auto& [id, seq] : groups) {
        std::stable_sort(seq.begin(), seq.end(),
                         [](const GpsPoint& a, const GpsPoint& b) {
                             return a.timestamp < b.timestamp;
                         });
        seq.erase(std::unique(seq.begin(), seq.end(),
                              [](const GpsPoint& a, const GpsPoint& b) {
                                  return a.timestamp == b.timestamp;
                              }),
                  seq.end());
    }
    return groups;
}

std::vector<TravelVector> build_travel_vectors(
    const std::map<std::string, std::vector<GpsPoint>>& per_vehicle,
    const FilterConfig& filter, FilterReport& report) {
    report = FilterReport{};
    std::vector<TravelVector> vectors;

    for (const auto& [id, seq] : per_vehicle) {
        for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
            const GpsPoint& a = seq[k];
            const GpsPoint& b = seq[k + 1];
            double dt = b.timestamp - a.timestamp;
            if (!(dt > 0)) continue;  // duplicates are dropped upstream

            if (filter.occupied_only &&
                (a.status.value_or(0) != 1 || b.status.value_or(0) != 1)) {
                ++report.status_rejected;
                continue;
            }
            if (filter.max_gap_seconds && dt > *filter.max_gap_seconds) {
                ++report.gap_rejected;
                continue;
            }
            if (filter.max_speed_mps) {
                double dist = std::hypot(b.x - a.x, b.y - a.y);
                if (dist / dt > *filter.max_speed_mps) {
                    ++report.speed_rejected;
                    continue;
                }
            }

            TravelVector v;
            v.start_x = a.x;
            v.start_y = a.y;
            v.end_x = b.x;
            v.end_y = b.y;
            v.start_t = a.timestamp;
            v.end_t = b.timestamp;
            v.vehicle_id = id;
            vectors.push_back(std::move(v));
            ++report.vectors_built;
        }
    }
    return vectors;
}

std::optional<TravelVector> clip_to_slot(const TravelVector& v, const TimeSlot& slot) {
    // Already inside: return unchanged so clipping is exactly idempotent.
    if (v.start_t >= slot.start_t && v.end_t <= slot.end_t) return v;

    double lo = std::max(v.start_t, slot.start_t);
    double hi = std::min(v.end_t, slot.end_t);
    if (!(hi > lo)) return std::nullopt;

    auto lerp = [&](double t, double& x, double& y) {
        double a = (t - v.start_t) / (v.end_t - v.start_t);
        x = v.start_x + a * (v.end_x - v.start_x);
        y = v.start_y + a * (v.end_y - v.start_y);
    };

    TravelVector out;
    out.vehicle_id = v.vehicle_id;
    out.start_t = lo;
    out.end_t = hi;
    if (lo == v.start_t) {
        out.start_x = v.start_x;
        out.start_y = v.start_y;
    } else {
        lerp(lo, out.start_x, out.start_y);
    }
    if (hi == v.end_t) {
        out.end_x = v.end_x;
        out.end_y = v.end_y;
    } else {
        lerp(hi, out.end_x, out.end_y);
    }
    return out;
}

}  // namespace vkd
