#include "vkd/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vkd {

namespace {

// Signed squared distance to the disk boundary along the segment,
// parameterized by t in [0, 1]: negative inside, positive outside.
struct DiskQuadratic {
    double a, b, c;

    double eval(double t) const { return (a * t + b) * t + c; }
};

DiskQuadratic make_quadratic(const TravelVector& v, const Poi& poi, double radius) {
    double sx = v.start_x - poi.x;
    double sy = v.start_y - poi.y;
    double dx = v.dx();
    double dy = v.dy();
    return {dx * dx + dy * dy, 2 * (sx * dx + sy * dy),
            sx * sx + sy * sy - radius * radius};
}

// Roots of the quadratic strictly inside (0, 1), ascending.
int roots_in_unit_interval(const DiskQuadratic& q, double out[2]) {
    int n = 0;
    if (q.a == 0) {
        if (q.b != 0) {
            double t = -q.c / q.b;
            if (t > 0 && t < 1) out[n++] = t;
        }
        return n;
    }
    double disc = q.b * q.b - 4 * q.a * q.c;
    if (disc <= 0) return 0;
    double sq = std::sqrt(disc);
    // Citardauq form for the root nearest zero keeps precision.
    double r1 = (-q.b - sq) / (2 * q.a);
    double r2 = (-q.b + sq) / (2 * q.a);
    if (r1 > r2) std::swap(r1, r2);
    if (r1 > 0 && r1 < 1) out[n++] = r1;
    if (r2 > 0 && r2 < 1) out[n++] = r2;
    return n;
}

}  // namespace

CrossingCounts filter_trajectories(std::span<const TravelVector> vectors,
                                   const Poi& poi, double radius,
                                   const TimeSlot& window) {
    if (!(radius > 0))
        throw std::invalid_argument("filter_trajectories: radius must be > 0");

    CrossingCounts counts;
    for (std::size_t idx = 0; idx < vectors.size(); ++idx) {
        auto clipped = clip_to_slot(vectors[idx], window);
        if (!clipped) continue;

        DiskQuadratic q = make_quadratic(*clipped, poi, radius);
        double roots[2];
        int n = roots_in_unit_interval(q, roots);

        // Interval statuses at midpoints between boundary crossings; a
        // status flip across a root is one crossing.
        double edges[4] = {0, 0, 0, 1};
        int m = 0;
        edges[m++] = 0;
        for (int k = 0; k < n; ++k) edges[m++] = roots[k];
        edges[m++] = 1;

        bool prev_inside = q.eval((edges[0] + edges[1]) / 2) < 0;
        for (int k = 1; k + 1 < m; ++k) {
            bool inside = q.eval((edges[k] + edges[k + 1]) / 2) < 0;
            if (inside != prev_inside) {
                if (inside)
                    ++counts.inbound_crossings;
                else
                    ++counts.outbound_crossings;
                counts.matched_vector_ids.push_back(idx);
            }
            prev_inside = inside;
        }
    }
    return counts;
}

namespace {

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    if (n == 0) return 0;
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

BenchmarkReport run_benchmark(std::span<const TravelVector> vectors,
                              std::span<const Poi> pois, TimeRange horizon,
                              double slot_duration, const GridSpec& grid,
                              const KernelParams& kernel, WeightingMode weighting,
                              const ProjectionParams& projection,
                              const BenchmarkOptions& options) {
    if (vectors.empty()) throw std::invalid_argument("benchmark: empty dataset");
    if (pois.empty()) throw std::invalid_argument("benchmark: no POIs");
    if (options.repetitions < 3)
        throw std::invalid_argument("benchmark: repetitions must be >= 3");

    BenchmarkReport report;
    report.vector_count = vectors.size();
    report.repetitions = options.repetitions;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<FieldSlice> field =
        build_field(vectors, horizon, slot_duration, grid, kernel, weighting);
    report.build_seconds = seconds_since(t0);
    report.slice_count = field.size();

    std::vector<TimeSlot> slots = make_slots(horizon, slot_duration);

    volatile double sink = 0;  // keep the timed work observable
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        for (const Poi& poi : pois) {
            t0 = std::chrono::steady_clock::now();
            ProjectionProfile profile = build_profile(field, poi, projection);
            double dt = seconds_since(t0);
            for (const auto& s : profile.samples) sink = sink + s.net;
            report.projection_samples.push_back({poi.id, rep, dt});
        }
        for (const Poi& poi : pois) {
            t0 = std::chrono::steady_clock::now();
            std::uint64_t total = 0;
            for (const TimeSlot& slot : slots) {
                CrossingCounts c =
                    filter_trajectories(vectors, poi, options.baseline_radius, slot);
                total += c.inbound_crossings + c.outbound_crossings;
            }
            double dt = seconds_since(t0);
            sink = sink + double(total);
            report.filter_samples.push_back({poi.id, rep, dt});
        }
    }

    std::vector<double> proj_times, filt_times;
    for (const auto& s : report.projection_samples) proj_times.push_back(s.seconds);
    for (const auto& s : report.filter_samples) filt_times.push_back(s.seconds);
    report.projection_median_seconds = median(std::move(proj_times));
    report.filter_median_seconds = median(std::move(filt_times));
    report.speedup = report.projection_median_seconds > 0
                         ? report.filter_median_seconds / report.projection_median_seconds
                         : 0;
    return report;
}

std::string BenchmarkReport::to_key_values() const {
    std::string out;
    out += "point_count = " + std::to_string(point_count) + "\n";
    out += "vector_count = " + std::to_string(vector_count) + "\n";
    out += "slice_count = " + std::to_string(slice_count) + "\n";
    out += "repetitions = " + std::to_string(repetitions) + "\n";
    out += "build_seconds = " + fmt(build_seconds) + "\n";
    out += "projection_median_seconds = " + fmt(projection_median_seconds) + "\n";
    out += "filter_median_seconds = " + fmt(filter_median_seconds) + "\n";
    out += "speedup = " + fmt(speedup) + "\n";
    return out;
}

std::string BenchmarkReport::to_table() const {
    std::string out = "operation,poi,repetition,seconds\n";
    for (const auto& s : projection_samples)
        out += "projection," + s.poi_id + "," + std::to_string(s.repetition) + "," +
               fmt(s.seconds) + "\n";
    for (const auto& s : filter_samples)
        out += "filter," + s.poi_id + "," + std::to_string(s.repetition) + "," +
               fmt(s.seconds) + "\n";
    return out;
}

}  // namespace vkd
