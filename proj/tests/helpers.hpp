#pragma once

// Shared test utilities: a deterministic RNG, random instance generators,
// and an independent brute-force implementation of the vector kernel
// density triple loop used as the oracle for build_slice.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vkd/field.hpp"
#include "vkd/ingest.hpp"

namespace vkdtest {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : rng_(seed) {}

    double u01() { return double(rng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + std::int64_t(rng_() % std::uint64_t(hi - lo + 1));
    }
    std::uint64_t raw() { return rng_(); }

  private:
    std::mt19937_64 rng_;
};

inline bool rel_close(double a, double b, double tol = 1e-9) {
    if (a == b) return true;
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Deliberately naive cell-major triple loop with its own distance and
// kernel formulas; build_slice must match it regardless of pruning.
inline vkd::FieldSlice brute_force_slice(const std::vector<vkd::TravelVector>& vectors,
                                         const vkd::GridSpec& grid,
                                         const vkd::TimeSlot& slot,
                                         const vkd::KernelParams& kernel,
                                         vkd::WeightingMode weighting) {
    constexpr double pi = 3.14159265358979323846;
    vkd::FieldSlice slice;
    slice.slot = slot;
    slice.grid = grid;
    slice.kernel = kernel;
    slice.weighting = weighting;
    slice.contributing_vector_count = vectors.size();
    slice.cells.assign(grid.cell_count(), vkd::CellDensity{});

    double R = kernel.bandwidth;
    for (std::uint32_t j = 0; j < grid.rows; ++j) {
        for (std::uint32_t i = 0; i < grid.cols; ++i) {
            double cx = grid.min_x + (i + 0.5) * grid.cell_size;
            double cy = grid.min_y + (j + 0.5) * grid.cell_size;
            vkd::CellDensity& cell = slice.cells[std::size_t(j) * grid.cols + i];
            for (const vkd::TravelVector& v : vectors) {
                double abx = v.end_x - v.start_x;
                double aby = v.end_y - v.start_y;
                double len2 = abx * abx + aby * aby;
                double r;
                if (len2 == 0) {
                    r = std::hypot(cx - v.start_x, cy - v.start_y);
                } else {
                    double t = ((cx - v.start_x) * abx + (cy - v.start_y) * aby) / len2;
                    if (t < 0) t = 0;
                    if (t > 1) t = 1;
                    r = std::hypot(cx - (v.start_x + t * abx), cy - (v.start_y + t * aby));
                }
                if (r > R) continue;
                double u = 1.0 - (r * r) / (R * R);
                if (u < 0) u = 0;
                double kde = kernel.constant / (pi * R * R) * u * u;
                cell.density += kde;
                if (len2 > 0 && kde > 0) {
                    if (weighting == vkd::WeightingMode::kernel_weighted) {
                        double len = std::sqrt(len2);
                        cell.vx += kde * abx / len;
                        cell.vy += kde * aby / len;
                    } else {
                        double r_eff = std::max(r, grid.cell_size / 100.0);
                        cell.vx += abx / r_eff;
                        cell.vy += aby / r_eff;
                    }
                }
            }
        }
    }
    return slice;
}

inline bool cells_close(const std::vector<vkd::CellDensity>& a,
                        const std::vector<vkd::CellDensity>& b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!rel_close(a[k].density, b[k].density, tol)) return false;
        if (!rel_close(a[k].vx, b[k].vx, tol)) return false;
        if (!rel_close(a[k].vy, b[k].vy, tol)) return false;
    }
    return true;
}

// A random grid no larger than max_cols x max_rows, around the origin.
inline vkd::GridSpec random_grid(Rng& rng, std::uint32_t max_cols = 20,
                                 std::uint32_t max_rows = 20) {
    double cell = rng.uniform(20, 250);
    std::uint32_t cols = std::uint32_t(rng.uniform_int(1, max_cols));
    std::uint32_t rows = std::uint32_t(rng.uniform_int(1, max_rows));
    double min_x = rng.uniform(-1000, 1000);
    double min_y = rng.uniform(-1000, 1000);
    return vkd::GridSpec::from_bounds(min_x, min_y, min_x + cols * cell,
                                      min_y + rows * cell, cell);
}

// Random vectors around (and partly outside) the grid, clipped-to-slot by
// construction: their time span lies within the slot.
inline std::vector<vkd::TravelVector> random_vectors(Rng& rng, std::size_t count,
                                                     const vkd::GridSpec& grid,
                                                     const vkd::TimeSlot& slot) {
    std::vector<vkd::TravelVector> out;
    out.reserve(count);
    double pad = 2 * grid.cell_size + 500;
    for (std::size_t k = 0; k < count; ++k) {
        vkd::TravelVector v;
        v.start_x = rng.uniform(grid.min_x - pad, grid.max_x() + pad);
        v.start_y = rng.uniform(grid.min_y - pad, grid.max_y() + pad);
        if (rng.u01() < 0.05) {  // occasional stationary vehicle
            v.end_x = v.start_x;
            v.end_y = v.start_y;
        } else {
            v.end_x = v.start_x + rng.uniform(-800, 800);
            v.end_y = v.start_y + rng.uniform(-800, 800);
        }
        double t0 = rng.uniform(slot.start_t, slot.end_t - 1);
        v.start_t = t0;
        v.end_t = t0 + rng.uniform(0.5, slot.end_t - t0);
        v.vehicle_id = "T" + std::to_string(k);
        out.push_back(std::move(v));
    }
    return out;
}

inline vkd::FieldSlice random_slice(Rng& rng) {
    vkd::TimeSlot slot{std::size_t(rng.uniform_int(0, 40)), 0, 3600};
    slot.start_t = rng.uniform(0, 1e6);
    slot.end_t = slot.start_t + rng.uniform(60, 7200);
    vkd::GridSpec grid = random_grid(rng, 12, 12);
    vkd::KernelParams kernel;
    kernel.bandwidth = rng.uniform(50, 1500);
    kernel.constant = rng.uniform(0.5, 40);
    auto mode = rng.u01() < 0.5 ? vkd::WeightingMode::kernel_weighted
                                : vkd::WeightingMode::literal;
    auto vectors = random_vectors(rng, std::size_t(rng.uniform_int(0, 30)), grid, slot);
    return vkd::build_slice(vectors, grid, slot, kernel, mode);
}

}  // namespace vkdtest
