#include "vkd/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace vkd {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double require_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(value.c_str(), &end);
    if (value.empty() || errno != 0 || end != value.c_str() + value.size() ||
        !std::isfinite(v))
        throw ConfigError(key + ": expected a number, got \"" + value + "\"");
    return v;
}

std::uint64_t require_count(const std::string& key, const std::string& value) {
    double v = require_number(key, value);
    if (v < 0 || v != std::floor(v))
        throw ConfigError(key + ": expected a nonnegative integer, got \"" + value + "\"");
    return static_cast<std::uint64_t>(v);
}

bool require_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key + ": expected true/false, got \"" + value + "\"");
}

std::optional<double> number_or(const std::string& key, const std::string& value,
                                const std::string& sentinel) {
    if (value == sentinel) return std::nullopt;
    return require_number(key, value);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt_fmt(const std::optional<double>& v, const char* sentinel) {
    return v ? fmt(*v) : std::string(sentinel);
}

}  // namespace

GridSpec RunConfig::grid() const {
    return GridSpec::from_bounds(grid_min_x, grid_min_y, grid_max_x, grid_max_y,
                                 cell_size);
}

KernelParams RunConfig::kernel() const {
    KernelParams k;
    k.bandwidth = kernel_radius;
    k.constant = kernel_constant;
    return k;
}

ProjectionParams RunConfig::projection() const {
    ProjectionParams p;
    p.search_radius = projection_radius;
    p.decay = decay;
    p.normalization = normalization;
    return p;
}

SchemaConfig RunConfig::schema() const {
    SchemaConfig s;
    s.delimiter = delimiter;
    s.time_format = timestamp_format;
    s.ref_lon = ref_lon;
    s.ref_lat = ref_lat;
    s.vehicle_col = s.time_col = s.lon_col = s.lat_col = -1;
    s.status_col = -1;

    std::stringstream ss(columns);
    std::string name;
    int idx = 0;
    while (std::getline(ss, name, ',')) {
        name = trim(name);
        if (name == "vehicle_id")
            s.vehicle_col = idx;
        else if (name == "timestamp")
            s.time_col = idx;
        else if (name == "lon")
            s.lon_col = idx;
        else if (name == "lat")
            s.lat_col = idx;
        else if (name == "status")
            s.status_col = idx;
        else if (name != "_")
            throw ConfigError("ingest.columns: unknown column name \"" + name + "\"");
        ++idx;
    }
    if (s.vehicle_col < 0 || s.time_col < 0 || s.lon_col < 0 || s.lat_col < 0)
        throw ConfigError(
            "ingest.columns: vehicle_id, timestamp, lon and lat are required");
    return s;
}

FilterConfig RunConfig::filter() const {
    FilterConfig f;
    f.max_gap_seconds = max_gap_seconds;
    f.max_speed_mps = max_speed_mps;
    f.occupied_only = occupied_only;
    return f;
}

ScenarioConfig RunConfig::scenario_config() const {
    ScenarioConfig s;
    s.kind = scenario;
    s.fleet_size = fleet_size;
    s.start_time = synth_start_time;
    s.duration_seconds = synth_duration;
    s.sampling_interval = synth_interval;
    s.speed_mps = synth_speed;
    s.speed_jitter = synth_speed_jitter;
    s.area_min_x = grid_min_x;
    s.area_min_y = grid_min_y;
    s.area_max_x = grid_max_x;
    s.area_max_y = grid_max_y;
    s.poi_x = synth_poi_x;
    s.poi_y = synth_poi_y;
    s.ring_radius = ring_radius;
    if (queue_factor < 1.0) {
        QueueEffect q;
        q.inner_radius = queue_inner;
        q.outer_radius = queue_outer;
        q.speed_factor = queue_factor;
        q.active_start = queue_start;
        q.active_end = queue_end;
        s.queue = q;
    }
    s.status_value = synth_status;
    return s;
}

void apply_config_value(RunConfig& c, const std::string& key,
                        const std::string& value) {
    if (key == "grid.min_x")
        c.grid_min_x = require_number(key, value);
    else if (key == "grid.min_y")
        c.grid_min_y = require_number(key, value);
    else if (key == "grid.max_x")
        c.grid_max_x = require_number(key, value);
    else if (key == "grid.max_y")
        c.grid_max_y = require_number(key, value);
    else if (key == "grid.cell_size")
        c.cell_size = require_number(key, value);
    else if (key == "slot.duration")
        c.slot_duration = require_number(key, value);
    else if (key == "horizon.start")
        c.horizon_start = number_or(key, value, "auto");
    else if (key == "horizon.end")
        c.horizon_end = number_or(key, value, "auto");
    else if (key == "kernel.radius")
        c.kernel_radius = require_number(key, value);
    else if (key == "kernel.constant")
        c.kernel_constant = require_number(key, value);
    else if (key == "kernel.weighting") {
        if (value == "kernel_weighted")
            c.weighting = WeightingMode::kernel_weighted;
        else if (value == "literal")
            c.weighting = WeightingMode::literal;
        else
            throw ConfigError(key + ": expected kernel_weighted or literal");
    } else if (key == "projection.radius")
        c.projection_radius = number_or(key, value, "unbounded");
    else if (key == "projection.decay") {
        if (value == "none")
            c.decay = DistanceDecay::none;
        else if (value == "linear")
            c.decay = DistanceDecay::linear;
        else if (value == "inverse")
            c.decay = DistanceDecay::inverse;
        else
            throw ConfigError(key + ": expected none, linear or inverse");
    } else if (key == "projection.normalization") {
        if (value == "unit")
            c.normalization = CellPoiNormalization::unit;
        else if (value == "literal")
            c.normalization = CellPoiNormalization::literal;
        else
            throw ConfigError(key + ": expected unit or literal");
    } else if (key == "delay.tolerance")
        c.delay_tolerance = number_or(key, value, "auto");
    else if (key == "ingest.delimiter") {
        if (value == "comma")
            c.delimiter = ',';
        else if (value == "tab")
            c.delimiter = '\t';
        else
            throw ConfigError(key + ": expected comma or tab");
    } else if (key == "ingest.columns")
        c.columns = value;
    else if (key == "ingest.timestamp_format") {
        if (value == "epoch")
            c.timestamp_format = TimestampFormat::epoch_seconds;
        else if (value == "iso8601")
            c.timestamp_format = TimestampFormat::iso8601;
        else
            throw ConfigError(key + ": expected epoch or iso8601");
    } else if (key == "filter.max_gap")
        c.max_gap_seconds = number_or(key, value, "off");
    else if (key == "filter.max_speed")
        c.max_speed_mps = number_or(key, value, "off");
    else if (key == "filter.occupied_only")
        c.occupied_only = require_bool(key, value);
    else if (key == "ref.lon")
        c.ref_lon = require_number(key, value);
    else if (key == "ref.lat")
        c.ref_lat = require_number(key, value);
    else if (key == "path.input")
        c.input_path = value;
    else if (key == "path.field")
        c.field_path = value;
    else if (key == "path.out")
        c.out_dir = value;
    else if (key == "synth.scenario") {
        if (value == "free_roam")
            c.scenario = ScenarioKind::free_roam;
        else if (value == "circulate")
            c.scenario = ScenarioKind::circulate;
        else
            throw ConfigError(key + ": expected free_roam or circulate");
    } else if (key == "synth.fleet")
        c.fleet_size = require_count(key, value);
    else if (key == "synth.duration")
        c.synth_duration = require_number(key, value);
    else if (key == "synth.interval")
        c.synth_interval = require_number(key, value);
    else if (key == "synth.start_time")
        c.synth_start_time = require_number(key, value);
    else if (key == "synth.speed")
        c.synth_speed = require_number(key, value);
    else if (key == "synth.speed_jitter")
        c.synth_speed_jitter = require_number(key, value);
    else if (key == "synth.ring_radius")
        c.ring_radius = require_number(key, value);
    else if (key == "synth.poi_x")
        c.synth_poi_x = require_number(key, value);
    else if (key == "synth.poi_y")
        c.synth_poi_y = require_number(key, value);
    else if (key == "synth.queue.inner")
        c.queue_inner = require_number(key, value);
    else if (key == "synth.queue.outer")
        c.queue_outer = require_number(key, value);
    else if (key == "synth.queue.factor")
        c.queue_factor = require_number(key, value);
    else if (key == "synth.queue.start")
        c.queue_start = number_or(key, value, "always");
    else if (key == "synth.queue.end")
        c.queue_end = number_or(key, value, "always");
    else if (key == "synth.status")
        c.synth_status = static_cast<int>(require_count(key, value));
    else if (key == "seed")
        c.seed = require_count(key, value);
    else if (key == "bench.repetitions")
        c.bench_repetitions = require_count(key, value);
    else if (key == "bench.baseline_radius")
        c.baseline_radius = require_number(key, value);
    else
        throw ConfigError("unknown config key: " + key);
}

void load_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key = value");
        apply_config_value(config, trim(line.substr(0, eq)),
                           trim(line.substr(eq + 1)));
    }
}

void validate_config(const RunConfig& c) {
    if (!(c.cell_size > 0)) throw ConfigError("grid.cell_size must be > 0");
    if (!(c.grid_max_x > c.grid_min_x))
        throw ConfigError("grid.max_x must exceed grid.min_x");
    if (!(c.grid_max_y > c.grid_min_y))
        throw ConfigError("grid.max_y must exceed grid.min_y");
    if (!(c.slot_duration > 0)) throw ConfigError("slot.duration must be > 0");
    if (c.horizon_start && c.horizon_end && !(*c.horizon_end > *c.horizon_start))
        throw ConfigError("horizon.end must exceed horizon.start");
    if (!(c.kernel_radius > 0)) throw ConfigError("kernel.radius must be > 0");
    if (!(c.kernel_constant > 0)) throw ConfigError("kernel.constant must be > 0");
    if (c.projection_radius && !(*c.projection_radius > 0))
        throw ConfigError("projection.radius must be > 0 or unbounded");
    if (c.decay == DistanceDecay::linear && !c.projection_radius)
        throw ConfigError("projection.decay: linear decay requires a bounded projection.radius");
    if (c.delay_tolerance && *c.delay_tolerance < 0)
        throw ConfigError("delay.tolerance must be >= 0 or auto");
    if (c.max_gap_seconds && !(*c.max_gap_seconds > 0))
        throw ConfigError("filter.max_gap must be > 0 or off");
    if (c.max_speed_mps && !(*c.max_speed_mps > 0))
        throw ConfigError("filter.max_speed must be > 0 or off");
    if (c.fleet_size == 0) throw ConfigError("synth.fleet must be > 0");
    if (!(c.synth_interval > 0)) throw ConfigError("synth.interval must be > 0");
    if (!(c.synth_duration > 0)) throw ConfigError("synth.duration must be > 0");
    if (!(c.synth_speed > 0)) throw ConfigError("synth.speed must be > 0");
    if (c.synth_speed_jitter < 0 || c.synth_speed_jitter >= 1)
        throw ConfigError("synth.speed_jitter must be in [0, 1)");
    if (!(c.ring_radius > 0)) throw ConfigError("synth.ring_radius must be > 0");
    if (c.queue_factor < 1.0) {
        if (!(c.queue_factor > 0)) throw ConfigError("synth.queue.factor must be in (0, 1]");
        if (!(c.queue_outer > c.queue_inner) || c.queue_inner < 0)
            throw ConfigError("synth.queue.inner/outer must satisfy 0 <= inner < outer");
    }
    if (c.bench_repetitions < 3) throw ConfigError("bench.repetitions must be >= 3");
    if (!(c.baseline_radius > 0)) throw ConfigError("bench.baseline_radius must be > 0");
    c.schema();  // validates ingest.columns
}

std::string echo_config(const RunConfig& c) {
    std::ostringstream out;
    out << "grid.min_x = " << fmt(c.grid_min_x) << "\n";
    out << "grid.min_y = " << fmt(c.grid_min_y) << "\n";
    out << "grid.max_x = " << fmt(c.grid_max_x) << "\n";
    out << "grid.max_y = " << fmt(c.grid_max_y) << "\n";
    out << "grid.cell_size = " << fmt(c.cell_size) << "\n";
    out << "slot.duration = " << fmt(c.slot_duration) << "\n";
    out << "horizon.start = " << opt_fmt(c.horizon_start, "auto") << "\n";
    out << "horizon.end = " << opt_fmt(c.horizon_end, "auto") << "\n";
    out << "kernel.radius = " << fmt(c.kernel_radius) << "\n";
    out << "kernel.constant = " << fmt(c.kernel_constant) << "\n";
    out << "kernel.weighting = "
        << (c.weighting == WeightingMode::kernel_weighted ? "kernel_weighted"
                                                          : "literal")
        << "\n";
    out << "projection.radius = " << opt_fmt(c.projection_radius, "unbounded") << "\n";
    out << "projection.decay = "
        << (c.decay == DistanceDecay::none
                ? "none"
                : c.decay == DistanceDecay::linear ? "linear" : "inverse")
        << "\n";
    out << "projection.normalization = "
        << (c.normalization == CellPoiNormalization::unit ? "unit" : "literal")
        << "\n";
    out << "delay.tolerance = " << opt_fmt(c.delay_tolerance, "auto") << "\n";
    out << "ingest.delimiter = " << (c.delimiter == '\t' ? "tab" : "comma") << "\n";
    out << "ingest.columns = " << c.columns << "\n";
    out << "ingest.timestamp_format = "
        << (c.timestamp_format == TimestampFormat::epoch_seconds ? "epoch"
                                                                 : "iso8601")
        << "\n";
    out << "filter.max_gap = " << opt_fmt(c.max_gap_seconds, "off") << "\n";
    out << "filter.max_speed = " << opt_fmt(c.max_speed_mps, "off") << "\n";
    out << "filter.occupied_only = " << (c.occupied_only ? "true" : "false") << "\n";
    out << "ref.lon = " << fmt(c.ref_lon) << "\n";
    out << "ref.lat = " << fmt(c.ref_lat) << "\n";
    out << "path.input = " << c.input_path << "\n";
    out << "path.field = " << c.field_path << "\n";
    out << "path.out = " << c.out_dir << "\n";
    out << "synth.scenario = "
        << (c.scenario == ScenarioKind::free_roam ? "free_roam" : "circulate")
        << "\n";
    out << "synth.fleet = " << c.fleet_size << "\n";
    out << "synth.duration = " << fmt(c.synth_duration) << "\n";
    out << "synth.interval = " << fmt(c.synth_interval) << "\n";
    out << "synth.start_time = " << fmt(c.synth_start_time) << "\n";
    out << "synth.speed = " << fmt(c.synth_speed) << "\n";
    out << "synth.speed_jitter = " << fmt(c.synth_speed_jitter) << "\n";
    out << "synth.ring_radius = " << fmt(c.ring_radius) << "\n";
    out << "synth.poi_x = " << fmt(c.synth_poi_x) << "\n";
    out << "synth.poi_y = " << fmt(c.synth_poi_y) << "\n";
    out << "synth.queue.inner = " << fmt(c.queue_inner) << "\n";
    out << "synth.queue.outer = " << fmt(c.queue_outer) << "\n";
    out << "synth.queue.factor = " << fmt(c.queue_factor) << "\n";
    out << "synth.queue.start = " << opt_fmt(c.queue_start, "always") << "\n";
    out << "synth.queue.end = " << opt_fmt(c.queue_end, "always") << "\n";
    out << "synth.status = " << c.synth_status << "\n";
    out << "seed = " << c.seed << "\n";
    out << "bench.repetitions = " << c.bench_repetitions << "\n";
    out << "bench.baseline_radius = " << fmt(c.baseline_radius) << "\n";
    return out.str();
}

}  // namespace vkd
