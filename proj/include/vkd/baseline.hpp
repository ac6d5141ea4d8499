#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vkd/field.hpp"
#include "vkd/projection.hpp"

namespace vkd {

/// Result of the trajectory-filter query around one POI for one window.
/// Every crossing contributes one entry to matched_vector_ids (the index of
/// the vector within the scanned sequence), so inbound_crossings +
/// outbound_crossings == matched_vector_ids.size().
struct CrossingCounts {
    std::uint64_t inbound_crossings = 0;
    std::uint64_t outbound_crossings = 0;
    std::vector<std::size_t> matched_vector_ids;
};

/// The traditional full-scan query: clips every vector to the window and
/// counts crossings of the radius-disk boundary around the POI. A segment
/// entering the disk counts inbound, one leaving counts outbound; a segment
/// passing straight through counts one of each. No indexing, no
/// precomputation -- this is deliberately the strawman the field approach
/// is benchmarked against.
CrossingCounts filter_trajectories(std::span<const TravelVector> vectors,
                                   const Poi& poi, double radius,
                                   const TimeSlot& window);

struct BenchmarkOptions {
    std::size_t repetitions = 5;
    double baseline_radius = 1000.0;  // disk radius for the filter query
};

struct BenchmarkSample {
    std::string poi_id;
    std::size_t repetition = 0;
    double seconds = 0;
};

struct BenchmarkReport {
    std::size_t point_count = 0;  // informational; set by the caller if known
    std::size_t vector_count = 0;
    std::size_t slice_count = 0;
    std::size_t repetitions = 0;
    double build_seconds = 0;
    std::vector<BenchmarkSample> projection_samples;
    std::vector<BenchmarkSample> filter_samples;
    double projection_median_seconds = 0;
    double filter_median_seconds = 0;
    double speedup = 0;  // filter_median / projection_median

    /// One `key = value` metric per line.
    std::string to_key_values() const;
    /// The raw samples as `operation,poi,repetition,seconds` rows.
    std::string to_table() const;
};

/// Times (a) the one-time field build, (b) the per-POI profile over the
/// prebuilt field, and (c) the per-POI trajectory filter over the raw
/// vectors run once per slot, so both queries answer the same question.
/// Single-threaded. Throws std::invalid_argument for an empty dataset or
/// fewer than 3 repetitions.
BenchmarkReport run_benchmark(std::span<const TravelVector> vectors,
                              std::span<const Poi> pois, TimeRange horizon,
                              double slot_duration, const GridSpec& grid,
                              const KernelParams& kernel, WeightingMode weighting,
                              const ProjectionParams& projection,
                              const BenchmarkOptions& options);

}  // namespace vkd
