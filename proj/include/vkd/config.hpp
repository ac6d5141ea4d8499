#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "vkd/baseline.hpp"
#include "vkd/field.hpp"
#include "vkd/ingest.hpp"
#include "vkd/projection.hpp"
#include "vkd/synth.hpp"

namespace vkd {

/// Invalid, unknown, or inconsistent configuration. The message always
/// names the offending key.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The full effective configuration of a run. Flat `key = value` text with
/// `#` comments; flags override file values; unknown keys are rejected.
/// Defaults: 200 m cells, 1 h slots, 1000 m bandwidth.
struct RunConfig {
    // grid.*
    double grid_min_x = 0, grid_min_y = 0;
    double grid_max_x = 30000, grid_max_y = 30000;
    double cell_size = 200;

    // slot.* / horizon.* (horizon defaults to the data span)
    double slot_duration = 3600;
    std::optional<double> horizon_start, horizon_end;

    // kernel.*
    double kernel_radius = 1000;
    double kernel_constant = 21.75;
    WeightingMode weighting = WeightingMode::kernel_weighted;

    // projection.* / delay.*
    std::optional<double> projection_radius;  // nullopt = unbounded
    DistanceDecay decay = DistanceDecay::none;
    CellPoiNormalization normalization = CellPoiNormalization::unit;
    std::optional<double> delay_tolerance;  // nullopt = auto

    // ingest.* / filter.* / ref.*
    char delimiter = ',';
    std::string columns = "vehicle_id,timestamp,lon,lat,status";
    TimestampFormat timestamp_format = TimestampFormat::epoch_seconds;
    std::optional<double> max_gap_seconds = 600;
    std::optional<double> max_speed_mps = 50;
    bool occupied_only = false;
    double ref_lon = 0, ref_lat = 0;

    // path.*
    std::string input_path, field_path, out_dir;

    // synth.*  (roam area follows the grid bounds)
    ScenarioKind scenario = ScenarioKind::free_roam;
    std::size_t fleet_size = 10;
    double synth_duration = 3600;
    double synth_interval = 60;
    double synth_start_time = 0;
    double synth_speed = 10;
    double synth_speed_jitter = 0;
    double ring_radius = 2000;
    double synth_poi_x = 15000, synth_poi_y = 15000;
    double queue_inner = 200, queue_outer = 800;
    double queue_factor = 1.0;  // 1 disables the queue effect
    std::optional<double> queue_start, queue_end;
    int synth_status = 1;

    std::uint64_t seed = 1;

    // bench.*
    std::size_t bench_repetitions = 5;
    double baseline_radius = 1000;

    GridSpec grid() const;
    KernelParams kernel() const;
    ProjectionParams projection() const;
    SchemaConfig schema() const;
    FilterConfig filter() const;
    ScenarioConfig scenario_config() const;
};

/// Applies one key/value pair. Throws ConfigError for unknown keys or
/// unparsable values.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

/// Parses a flat key = value file into config. `#` starts a comment.
void load_config_file(RunConfig& config, const std::string& path);

/// Cross-field validation; throws ConfigError naming the offending key.
void validate_config(const RunConfig& config);

/// The full effective config as `key = value` lines, in a fixed order.
std::string echo_config(const RunConfig& config);

}  // namespace vkd
