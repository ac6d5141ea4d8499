#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vkd/ingest.hpp"

namespace vkd {

/// Trajectory shapes the generator can produce.
///  free_roam: vehicles drive straight between uniform random waypoints
///    inside the area bounds.
///  circulate: a closed fleet orbits a POI -- radial leg in, radial leg out
///    on a fresh bearing, then an arc along the ring to the next approach.
enum class ScenarioKind : std::uint8_t { free_roam = 0, circulate = 1 };

/// Inbound-slowdown ring around the POI: vehicles on an inbound leg whose
/// distance to the POI lies inside [inner_radius, outer_radius] drive at
/// speed_factor times their nominal speed while the effect is active.
struct QueueEffect {
    double inner_radius = 200;
    double outer_radius = 800;
    double speed_factor = 1.0;
    std::optional<Seconds> active_start;  // default: the whole run
    std::optional<Seconds> active_end;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::free_roam;
    std::size_t fleet_size = 1;
    Seconds start_time = 0;
    double duration_seconds = 3600;
    double sampling_interval = 60;
    double speed_mps = 10;
    double speed_jitter = 0;  // per-vehicle speed drawn U[v*(1-j), v*(1+j)]

    // free_roam area
    double area_min_x = 0, area_min_y = 0;
    double area_max_x = 10000, area_max_y = 10000;

    // circulate geometry
    double poi_x = 0, poi_y = 0;
    double ring_radius = 2000;
    std::optional<QueueEffect> queue;

    int status_value = 1;  // emitted occupancy flag
};

/// Deterministic for a fixed (config, seed); every emitted point satisfies
/// the GpsPoint invariants. Points are ordered by vehicle, then timestamp.
/// Throws std::invalid_argument for invalid configs (nonpositive fleet
/// size, interval, duration, speed, or a malformed queue annulus).
std::vector<GpsPoint> generate_synthetic(const ScenarioConfig& config,
                                         std::uint64_t seed);

}  // namespace vkd
