#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vkd/field.hpp"

namespace vkd {

/// A query location, in grid meters.
struct Poi {
    std::string id;
    double x = 0;
    double y = 0;
};

enum class DistanceDecay : std::uint8_t {
    none,     // weight 1
    linear,   // 1 - d/D (requires a bounded search radius)
    inverse,  // 1 / (1 + d)
};

/// How the cell-to-POI direction enters the dot product.
///  unit: normalized direction, combined with the configured decay.
///  literal: the raw cell-to-POI displacement enters the dot product
///    unnormalized, so distant cells weigh more.
enum class CellPoiNormalization : std::uint8_t { unit = 0, literal = 1 };

struct ProjectionParams {
    std::optional<double> search_radius;  // nullopt: whole grid
    DistanceDecay decay = DistanceDecay::none;
    CellPoiNormalization normalization = CellPoiNormalization::unit;
};

/// Per-slot projection split. net == inbound - outbound exactly.
struct ProjectionSample {
    std::size_t slot_index = 0;
    double inbound = 0;
    double outbound = 0;
    double net = 0;
};

/// Inbound/outbound momentum series for one POI over consecutive slots.
struct ProjectionProfile {
    Poi poi;
    ProjectionParams params;
    double slot_width = 0;  // W, seconds
    std::vector<ProjectionSample> samples;
    std::vector<double> slot_starts;  // aligned with samples
};

/// Signed contribution of a single cell's vector toward the POI; positive
/// means momentum toward it. Returns 0 for a zero vector, for a cell center
/// coinciding with the POI, and outside the search radius.
double project_cell(double cx, double cy, double vx, double vy, const Poi& poi,
                    const ProjectionParams& params);

/// Projects a slice onto a POI: positive cell contributions accumulate into
/// inbound, magnitudes of negative ones into outbound. Read-only.
std::pair<double, double> project_slice(const FieldSlice& slice, const Poi& poi,
                                        const ProjectionParams& params);

/// One sample per slice, in slot order. Slices must share a grid and a
/// uniform slot width; otherwise throws std::invalid_argument.
ProjectionProfile build_profile(std::span<const FieldSlice> field, const Poi& poi,
                                const ProjectionParams& params);

/// Trapezoidal area under a sampled curve: sum of widths[t] *
/// (values[t] + values[t+1]) / 2. widths must have length |values| - 1.
double demand_area(std::span<const double> values, std::span<const double> widths);

/// (d_tt - d_ta) / d_ta, or nullopt when d_ta == 0 (never an infinity).
std::optional<double> change_rate(double d_tt, double d_ta);

enum class SlotClassification : std::uint8_t {
    inbound_queue,        // outbound exceeds inbound beyond tolerance
    outbound_congestion,  // inbound exceeds outbound beyond tolerance
    balanced,
};

const char* to_string(SlotClassification c);

struct SlotGap {
    std::size_t slot_index = 0;
    SlotClassification classification = SlotClassification::balanced;
    double gap = 0;  // |inbound - outbound|
};

/// Gap areas between the inbound and outbound curves and their per-slot
/// classification.
struct DelayReport {
    double d_tt = 0;  // area under the inbound curve
    double d_ta = 0;  // area under the outbound curve
    std::optional<double> rate;
    std::vector<SlotGap> intervals;
};

/// Builds the delay report for a profile. tolerance = nullopt uses the
/// per-slot default 1e-9 * max(|inbound|, |outbound|, 1). Throws
/// std::invalid_argument for profiles with fewer than two samples.
DelayReport delay_report(const ProjectionProfile& profile,
                         std::optional<double> tolerance = std::nullopt);

/// Delimited text: header `slot_index,slot_start,inbound,outbound,net`.
std::string profile_to_text(const ProjectionProfile& profile);

/// Header block `D_tt,D_ta,rate` (rate printed as `undefined` when flagged)
/// followed by per-slot rows `slot_index,classification,gap`.
std::string delay_report_to_text(const DelayReport& report);

}  // namespace vkd
