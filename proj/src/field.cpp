#include "vkd/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vkd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

GridSpec GridSpec::from_bounds(double min_x, double min_y, double max_x,
                               double max_y, double cell_size) {
    if (!(cell_size > 0)) throw std::invalid_argument("GridSpec: cell_size must be > 0");
    if (!(max_x > min_x) || !(max_y > min_y))
        throw std::invalid_argument("GridSpec: max bounds must exceed min bounds");
    GridSpec g;
    g.min_x = min_x;
    g.min_y = min_y;
    g.cell_size = cell_size;
    g.cols = static_cast<std::uint32_t>(std::ceil((max_x - min_x) / cell_size));
    g.rows = static_cast<std::uint32_t>(std::ceil((max_y - min_y) / cell_size));
    return g;
}

double point_segment_distance(double px, double py, double ax, double ay,
                              double bx, double by) {
    double abx = bx - ax;
    double aby = by - ay;
    double len2 = abx * abx + aby * aby;
    if (len2 == 0) return std::hypot(px - ax, py - ay);
    double t = ((px - ax) * abx + (py - ay) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * abx), py - (ay + t * aby));
}

double kernel_value(double r, const KernelParams& params) {
    double R = params.bandwidth;
    if (r >= R) return 0.0;
    double u = std::max(0.0, 1.0 - (r * r) / (R * R));
    return params.constant / (kPi * R * R) * u * u;
}

namespace {

// Adds one segment into the cell array, visiting only cells whose centers
// fall inside the segment's bounding box expanded by the bandwidth.
void accumulate_segment(const TravelVector& v, const GridSpec& grid,
                        const KernelParams& kernel, WeightingMode weighting,
                        std::vector<CellDensity>& cells) {
    double R = kernel.bandwidth;
    double lo_x = std::min(v.start_x, v.end_x) - R;
    double hi_x = std::max(v.start_x, v.end_x) + R;
    double lo_y = std::min(v.start_y, v.end_y) - R;
    double hi_y = std::max(v.start_y, v.end_y) + R;

    // Cell centers are at min + (i + 0.5) * cell; find the index range whose
    // centers lie within [lo, hi], clamped to the grid. Clamp in double space
    // so wild coordinates cannot overflow the integer cast.
    auto first_idx = [&](double lo, double grid_min, std::uint32_t n) -> std::int64_t {
        double f = std::ceil((lo - grid_min) / grid.cell_size - 0.5);
        if (!(f > 0)) return 0;
        if (f > double(n)) return n;
        return static_cast<std::int64_t>(f);
    };
    auto last_idx = [&](double hi, double grid_min, std::uint32_t n) -> std::int64_t {
        double f = std::floor((hi - grid_min) / grid.cell_size - 0.5);
        if (!(f > -1)) return -1;
        if (f > double(n) - 1) return std::int64_t(n) - 1;
        return static_cast<std::int64_t>(f);
    };

    std::int64_t i0 = first_idx(lo_x, grid.min_x, grid.cols);
    std::int64_t i1 = last_idx(hi_x, grid.min_x, grid.cols);
    std::int64_t j0 = first_idx(lo_y, grid.min_y, grid.rows);
    std::int64_t j1 = last_idx(hi_y, grid.min_y, grid.rows);
    if (i0 > i1 || j0 > j1) return;

    double seg_dx = v.dx();
    double seg_dy = v.dy();
    double seg_len = std::hypot(seg_dx, seg_dy);
    double ux = 0, uy = 0;
    if (seg_len > 0) {
        ux = seg_dx / seg_len;
        uy = seg_dy / seg_len;
    }
    double r_floor = grid.cell_size / 100.0;  // literal-mode clamp

    for (std::int64_t j = j0; j <= j1; ++j) {
        double cy = grid.center_y(static_cast<std::uint32_t>(j));
        for (std::int64_t i = i0; i <= i1; ++i) {
            double cx = grid.center_x(static_cast<std::uint32_t>(i));
            double r = point_segment_distance(cx, cy, v.start_x, v.start_y,
                                              v.end_x, v.end_y);
            if (r > kernel.bandwidth) continue;
            double kde = kernel_value(r, kernel);
            CellDensity& cell =
                cells[grid.cell_index(static_cast<std::uint32_t>(i),
                                      static_cast<std::uint32_t>(j))];
            cell.density += kde;
            if (seg_len > 0 && kde > 0) {
                if (weighting == WeightingMode::kernel_weighted) {
                    cell.vx += kde * ux;
                    cell.vy += kde * uy;
                } else {
                    double r_eff = std::max(r, r_floor);
                    cell.vx += seg_dx / r_eff;
                    cell.vy += seg_dy / r_eff;
                }
            }
        }
    }
}

}  // namespace

FieldSlice build_slice(std::span<const TravelVector> clipped_vectors,
                       const GridSpec& grid, const TimeSlot& slot,
                       const KernelParams& kernel, WeightingMode weighting) {
    FieldSlice slice;
    slice.slot = slot;
    slice.grid = grid;
    slice.kernel = kernel;
    slice.weighting = weighting;
    slice.cells.assign(grid.cell_count(), CellDensity{});
    for (const TravelVector& v : clipped_vectors)
        accumulate_segment(v, grid, kernel, weighting, slice.cells);
    slice.contributing_vector_count = clipped_vectors.size();
    return slice;
}

FieldSlice update_slice(const FieldSlice& slice,
                        std::span<const TravelVector> new_vectors,
                        const KernelParams& kernel, WeightingMode weighting) {
    if (!(kernel == slice.kernel))
        throw std::invalid_argument("update_slice: kernel params differ from the slice's");
    if (weighting != slice.weighting)
        throw std::invalid_argument("update_slice: weighting mode differs from the slice's");

    FieldSlice out = slice;
    for (const TravelVector& v : new_vectors)
        accumulate_segment(v, out.grid, kernel, weighting, out.cells);
    out.contributing_vector_count += new_vectors.size();
    return out;
}

std::vector<TimeSlot> make_slots(TimeRange horizon, double slot_duration) {
    if (!(slot_duration > 0))
        throw std::invalid_argument("make_slots: slot_duration must be > 0");
    if (!(horizon.end_t >= horizon.start_t))
        throw std::invalid_argument("make_slots: horizon end precedes start");

    double span = horizon.end_t - horizon.start_t;
    std::size_t count = static_cast<std::size_t>(std::ceil(span / slot_duration));
    if (count == 0) count = 1;

    std::vector<TimeSlot> slots;
    slots.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        TimeSlot s;
        s.index = k;
        s.start_t = horizon.start_t + double(k) * slot_duration;
        s.end_t = horizon.start_t + double(k + 1) * slot_duration;
        slots.push_back(s);
    }
    return slots;
}

std::vector<FieldSlice> build_field(std::span<const TravelVector> vectors,
                                    TimeRange horizon, double slot_duration,
                                    const GridSpec& grid,
                                    const KernelParams& kernel,
                                    WeightingMode weighting) {
    std::vector<TimeSlot> slots = make_slots(horizon, slot_duration);

    // Bucket vectors by the slot range they can overlap; clip_to_slot still
    // decides membership, so the result is identical to testing every pair.
    std::vector<std::vector<const TravelVector*>> buckets(slots.size());
    double h0 = horizon.start_t;
    for (const TravelVector& v : vectors) {
        if (v.end_t <= slots.front().start_t || v.start_t >= slots.back().end_t)
            continue;
        auto slot_of = [&](double t) -> std::int64_t {
            double f = std::floor((t - h0) / slot_duration);
            if (!(f > 0)) return 0;
            if (f > double(slots.size()) - 1) return std::int64_t(slots.size()) - 1;
            return static_cast<std::int64_t>(f);
        };
        std::int64_t lo = slot_of(v.start_t);
        std::int64_t hi = slot_of(v.end_t);
        for (std::int64_t k = lo; k <= hi; ++k) buckets[k].push_back(&v);
    }

    std::vector<FieldSlice> field;
    field.reserve(slots.size());
    std::vector<TravelVector> clipped;
    for (std::size_t k = 0; k < slots.size(); ++k) {
        clipped.clear();
        for (const TravelVector* v : buckets[k])
            if (auto c = clip_to_slot(*v, slots[k])) clipped.push_back(std::move(*c));
        field.push_back(build_slice(clipped, grid, slots[k], kernel, weighting));
    }
    return field;
}

}  // namespace vkd
