#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vkd/ingest.hpp"

namespace vkd {

/// Raster over [min_x, max_x) x [min_y, max_y). cols cells along x, rows
/// along y; cell (i, j) center = (min_x + (i+0.5)*cell_size,
/// min_y + (j+0.5)*cell_size). Built via from_bounds so that
/// cols = ceil((max_x - min_x)/cell_size) and likewise for rows.
struct GridSpec {
    double min_x = 0;
    double min_y = 0;
    double cell_size = 0;
    std::uint32_t cols = 0;  // m, along x
    std::uint32_t rows = 0;  // n, along y

    static GridSpec from_bounds(double min_x, double min_y, double max_x,
                                double max_y, double cell_size);

    double max_x() const { return min_x + cols * cell_size; }
    double max_y() const { return min_y + rows * cell_size; }
    double center_x(std::uint32_t i) const { return min_x + (i + 0.5) * cell_size; }
    double center_y(std::uint32_t j) const { return min_y + (j + 0.5) * cell_size; }
    std::size_t cell_count() const { return std::size_t(cols) * rows; }
    // Row-major storage, y rows outer: index = j * cols + i.
    std::size_t cell_index(std::uint32_t i, std::uint32_t j) const {
        return std::size_t(j) * cols + i;
    }

    bool operator==(const GridSpec&) const = default;
};

/// Quartic kernel parameters: KDE(r) = constant / (pi R^2) * (max(0, 1 - r^2/R^2))^2.
/// The default constant 21.75 is carried as-is; the choice only rescales
/// every density uniformly (3 would normalize the kernel to unit integral),
/// so projections and profile comparisons are unaffected.
struct KernelParams {
    double bandwidth = 1000.0;  // R, meters
    double constant = 21.75;
    enum class Kind : std::uint8_t { quartic = 0 };
    Kind kind = Kind::quartic;

    bool operator==(const KernelParams&) const = default;
};

/// How a travel vector's direction is accumulated into a cell.
///  kernel_weighted: unit segment direction scaled by the kernel value, so
///    the vector field has the same smoothness and compact support as the
///    density. Default.
///  literal: segment displacement divided by the cell-to-segment distance r
///    (r clamped below by cell_size/100). Magnitudes then scale with segment
///    length, i.e. with vehicle speed at a fixed sampling interval.
enum class WeightingMode : std::uint8_t { kernel_weighted = 0, literal = 1 };

/// One cell's accumulated state: scalar kernel density plus the summed
/// direction vector, stored as a displacement from the cell center.
/// density == 0 implies vx == vy == 0.
struct CellDensity {
    double density = 0;
    double vx = 0;
    double vy = 0;

    bool operator==(const CellDensity&) const = default;
};

/// One time slot's grid of cell densities.
struct FieldSlice {
    TimeSlot slot;
    GridSpec grid;
    KernelParams kernel;
    WeightingMode weighting = WeightingMode::kernel_weighted;
    std::uint64_t contributing_vector_count = 0;
    std::vector<CellDensity> cells;  // rows * cols, row-major (see GridSpec)

    const CellDensity& at(std::uint32_t i, std::uint32_t j) const {
        return cells[grid.cell_index(i, j)];
    }
};

/// Euclidean distance from (px, py) to the closed segment (ax,ay)-(bx,by).
/// A degenerate segment (A == B) gives the point-to-point distance.
double point_segment_distance(double px, double py, double ax, double ay,
                              double bx, double by);

/// Quartic kernel density at distance r; exactly zero for r >= bandwidth.
double kernel_value(double r, const KernelParams& params);

/// Rasterizes clipped travel vectors into a slice. Vectors must already be
/// clipped to the slot in time; they may lie partly or wholly outside the
/// grid. Candidate cells are pruned per segment by a bandwidth-expanded
/// bounding box; the result matches the unpruned triple loop exactly.
FieldSlice build_slice(std::span<const TravelVector> clipped_vectors,
                       const GridSpec& grid, const TimeSlot& slot,
                       const KernelParams& kernel, WeightingMode weighting);

/// Accumulates additional (already clipped) vectors into a copy of the
/// slice. Equivalent to rebuilding from the union of both inputs; only
/// cells within bandwidth of a new segment are touched. Throws
/// std::invalid_argument when kernel or weighting differ from the slice's.
FieldSlice update_slice(const FieldSlice& slice,
                        std::span<const TravelVector> new_vectors,
                        const KernelParams& kernel, WeightingMode weighting);

/// Clips every vector to each slot of the horizon and builds one slice per
/// slot, ordered by slot index. Slots all have width slot_duration; the
/// count is ceil(horizon span / slot_duration). Throws std::invalid_argument
/// for a nonpositive slot_duration.
std::vector<FieldSlice> build_field(std::span<const TravelVector> vectors,
                                    TimeRange horizon, double slot_duration,
                                    const GridSpec& grid,
                                    const KernelParams& kernel,
                                    WeightingMode weighting);

/// The slot tiling used by build_field.
std::vector<TimeSlot> make_slots(TimeRange horizon, double slot_duration);

}  // namespace vkd
