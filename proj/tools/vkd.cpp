// vkd: per-slot vector kernel density fields from GPS trajectory streams,
// with POI projection queries, a trajectory-filter baseline, and a
// synthetic fleet generator.

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vkd/baseline.hpp"
#include "vkd/config.hpp"
#include "vkd/field_io.hpp"
#include "vkd/synth.hpp"

namespace {

using namespace vkd;

std::string fmt(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::string input_path;
    std::string field_path;
    std::vector<std::string> poi_args;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--set", args.sets, "override a config key, e.g. --set kernel.radius=500")
        ->take_all();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--input", args.input_path, "input points file");
    cmd->add_option("--field", args.field_path, "field file");
    cmd->add_option("--poi", args.poi_args, "POI as \"id,x,y\" in grid meters (repeatable)")
        ->take_all();
    cmd->add_option("--seed", args.seed, "RNG seed");
}

RunConfig make_config(const CommonArgs& args) {
    RunConfig config;
    if (!args.config_path.empty()) load_config_file(config, args.config_path);
    for (const std::string& kv : args.sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got \"" + kv + "\"");
        std::string key = kv.substr(0, eq);
        std::string value = kv.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(0, 1);
        apply_config_value(config, key, value);
    }
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    if (!args.input_path.empty()) config.input_path = args.input_path;
    if (!args.field_path.empty()) config.field_path = args.field_path;
    if (args.seed) config.seed = *args.seed;
    validate_config(config);
    return config;
}

std::vector<Poi> parse_pois(const std::vector<std::string>& poi_args) {
    std::vector<Poi> pois;
    for (const std::string& arg : poi_args) {
        std::stringstream ss(arg);
        std::string id, xs, ys;
        if (!std::getline(ss, id, ',') || !std::getline(ss, xs, ',') ||
            !std::getline(ss, ys) || id.empty())
            throw ConfigError("--poi expects \"id,x,y\", got \"" + arg + "\"");
        auto number = [&](const std::string& s) {
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
                throw ConfigError("--poi expects numeric x,y, got \"" + arg + "\"");
            return v;
        };
        Poi p;
        p.id = id;
        p.x = number(xs);
        p.y = number(ys);
        pois.push_back(std::move(p));
    }
    return pois;
}

// POI ids appear in output filenames.
std::string safe_name(const std::string& id) {
    std::string out = id;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' &&
            c != '.')
            c = '_';
    return out;
}

std::string comment_block(const std::string& text) {
    std::string out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out += "# " + line + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string out_path(const RunConfig& config, const std::string& name) {
    if (config.out_dir.empty()) return name;
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / name).string();
}

std::string field_path_or(const RunConfig& config) {
    if (!config.field_path.empty()) return config.field_path;
    return out_path(config, "field.vkdf");
}

std::string format_timestamp(double t, TimestampFormat format) {
    if (format == TimestampFormat::epoch_seconds) return fmt(t);
    std::time_t whole = static_cast<std::time_t>(std::floor(t));
    double frac = t - std::floor(t);
    std::tm tm{};
    gmtime_r(&whole, &tm);
    char buf[48];
    std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    std::string s(buf, n);
    if (frac > 0) {
        char fbuf[16];
        std::snprintf(fbuf, sizeof fbuf, "%.3f", frac);
        s += std::string(fbuf + 1);  // drop the leading 0
    }
    return s + "Z";
}

struct IngestResult {
    std::vector<GpsPoint> points;
    ParseReport parse_report;
    FilterReport filter_report;
    std::vector<TravelVector> vectors;
};

IngestResult ingest_points_file(const RunConfig& config) {
    if (config.input_path.empty()) throw ConfigError("path.input is required");
    std::ifstream in(config.input_path);
    if (!in) throw std::runtime_error("cannot open input: " + config.input_path);

    IngestResult r;
    r.points = parse_points(in, config.schema(), r.parse_report);
    auto grouped = group_by_vehicle(r.points);
    r.vectors = build_travel_vectors(grouped, config.filter(), r.filter_report);
    return r;
}

TimeRange resolve_horizon(const RunConfig& config, std::span<const GpsPoint> points) {
    TimeRange h;
    if (config.horizon_start && config.horizon_end) {
        h.start_t = *config.horizon_start;
        h.end_t = *config.horizon_end;
        return h;
    }
    if (points.empty())
        throw std::runtime_error("empty corpus and no horizon.start/horizon.end configured");
    double lo = points.front().timestamp, hi = lo;
    for (const GpsPoint& p : points) {
        lo = std::min(lo, p.timestamp);
        hi = std::max(hi, p.timestamp);
    }
    h.start_t = config.horizon_start.value_or(lo);
    h.end_t = config.horizon_end.value_or(hi);
    if (!(h.end_t > h.start_t)) h.end_t = h.start_t + config.slot_duration;
    return h;
}

std::string ingest_summary(const IngestResult& r) {
    std::string s;
    s += "points_parsed = " + std::to_string(r.parse_report.points_parsed) + "\n";
    s += "points_skipped = " + std::to_string(r.parse_report.skipped) + "\n";
    s += "vectors_built = " + std::to_string(r.filter_report.vectors_built) + "\n";
    s += "gap_rejected = " + std::to_string(r.filter_report.gap_rejected) + "\n";
    s += "speed_rejected = " + std::to_string(r.filter_report.speed_rejected) + "\n";
    s += "status_rejected = " + std::to_string(r.filter_report.status_rejected) + "\n";
    return s;
}

int cmd_gen(const CommonArgs& args) {
    RunConfig config = make_config(args);
    std::vector<GpsPoint> points = generate_synthetic(config.scenario_config(), config.seed);

    // Emit columns in the configured schema order so the same config reads
    // the file back.
    SchemaConfig schema = config.schema();
    int width = std::max({schema.vehicle_col, schema.time_col, schema.lon_col,
                          schema.lat_col, schema.status_col}) +
                1;
    std::string path = out_path(config, "points.csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    std::vector<std::string> row(width);
    for (const GpsPoint& p : points) {
        for (auto& f : row) f.clear();
        auto [lon, lat] = unproject_coords(p.x, p.y, config.ref_lon, config.ref_lat);
        row[schema.vehicle_col] = p.vehicle_id;
        row[schema.time_col] = format_timestamp(p.timestamp, config.timestamp_format);
        row[schema.lon_col] = fmt(lon);
        row[schema.lat_col] = fmt(lat);
        if (schema.status_col >= 0)
            row[schema.status_col] = std::to_string(p.status.value_or(0));
        for (int k = 0; k < width; ++k) {
            if (k) out << config.delimiter;
            out << row[k];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);

    std::cout << echo_config(config) << "points_written = " << points.size()
              << "\noutput = " << path << "\n";
    return 0;
}

int cmd_build(const CommonArgs& args) {
    RunConfig config = make_config(args);
    double t0 = now_seconds();
    IngestResult ingest = ingest_points_file(config);
    TimeRange horizon = resolve_horizon(config, ingest.points);

    std::vector<FieldSlice> field =
        build_field(ingest.vectors, horizon, config.slot_duration, config.grid(),
                    config.kernel(), config.weighting);
    std::string path = field_path_or(config);
    write_field_file(path, field);
    double wall = now_seconds() - t0;

    std::string summary = echo_config(config) + ingest_summary(ingest);
    summary += "slices = " + std::to_string(field.size()) + "\n";
    summary += "field_file = " + path + "\n";
    summary += "wall_seconds = " + fmt(wall) + "\n";
    std::cout << summary;
    write_text_file(path + ".summary.txt", summary);
    return 0;
}

// Refuses to mix parameters: the stored field and the configured run must
// agree before an incremental update is meaningful.
void check_field_matches_config(const std::vector<FieldSlice>& field,
                                const RunConfig& config) {
    if (field.empty()) return;
    for (std::size_t k = 1; k < field.size(); ++k)
        if (!(field[k].grid == field[0].grid) || !(field[k].kernel == field[0].kernel) ||
            field[k].weighting != field[0].weighting)
            throw std::runtime_error("field file has mixed parameters across slices");
    const FieldSlice& s = field.front();
    std::string diff;
    GridSpec grid = config.grid();
    if (!(s.grid == grid)) {
        diff += "  grid: stored [" + fmt(s.grid.min_x) + "," + fmt(s.grid.min_y) +
                " cell " + fmt(s.grid.cell_size) + " " + std::to_string(s.grid.cols) +
                "x" + std::to_string(s.grid.rows) + "] vs configured [" +
                fmt(grid.min_x) + "," + fmt(grid.min_y) + " cell " +
                fmt(grid.cell_size) + " " + std::to_string(grid.cols) + "x" +
                std::to_string(grid.rows) + "]\n";
    }
    if (s.kernel.bandwidth != config.kernel_radius)
        diff += "  kernel.radius: stored " + fmt(s.kernel.bandwidth) +
                " vs configured " + fmt(config.kernel_radius) + "\n";
    if (s.kernel.constant != config.kernel_constant)
        diff += "  kernel.constant: stored " + fmt(s.kernel.constant) +
                " vs configured " + fmt(config.kernel_constant) + "\n";
    if (s.weighting != config.weighting)
        diff += std::string("  kernel.weighting: stored ") +
                (s.weighting == WeightingMode::kernel_weighted ? "kernel_weighted"
                                                               : "literal") +
                " vs configured " +
                (config.weighting == WeightingMode::kernel_weighted
                     ? "kernel_weighted"
                     : "literal") +
                "\n";
    double stored_width = s.slot.duration();
    if (std::abs(stored_width - config.slot_duration) >
        1e-9 * std::max(1.0, std::abs(stored_width)))
        diff += "  slot.duration: stored " + fmt(stored_width) + " vs configured " +
                fmt(config.slot_duration) + "\n";
    if (!diff.empty())
        throw ConfigError("field file parameters do not match the configuration:\n" + diff);
}

int cmd_update(const CommonArgs& args) {
    RunConfig config = make_config(args);
    if (config.field_path.empty()) throw ConfigError("path.field is required");
    double t0 = now_seconds();

    std::vector<FieldSlice> field = read_field_file(config.field_path);
    check_field_matches_config(field, config);

    IngestResult ingest = ingest_points_file(config);

    std::size_t touched = 0;
    for (FieldSlice& slice : field) {
        std::vector<TravelVector> clipped;
        for (const TravelVector& v : ingest.vectors)
            if (auto c = clip_to_slot(v, slice.slot)) clipped.push_back(std::move(*c));
        if (clipped.empty()) continue;
        slice = update_slice(slice, clipped, slice.kernel, slice.weighting);
        ++touched;
    }

    std::string path = config.out_dir.empty() ? config.field_path
                                              : out_path(config, "field.vkdf");
    write_field_file(path, field);
    double wall = now_seconds() - t0;

    std::string summary = echo_config(config) + ingest_summary(ingest);
    summary += "slices = " + std::to_string(field.size()) + "\n";
    summary += "slices_touched = " + std::to_string(touched) + "\n";
    summary += "field_file = " + path + "\n";
    summary += "wall_seconds = " + fmt(wall) + "\n";
    std::cout << summary;
    return 0;
}

int cmd_project(const CommonArgs& args) {
    RunConfig config = make_config(args);
    std::vector<Poi> pois = parse_pois(args.poi_args);
    if (pois.empty()) throw ConfigError("--poi is required (at least one)");
    if (config.field_path.empty()) throw ConfigError("path.field is required");

    std::vector<FieldSlice> field = read_field_file(config.field_path);
    if (field.empty()) throw std::runtime_error("field file contains no slices");

    std::string echo = comment_block(echo_config(config));
    for (const Poi& poi : pois) {
        double t0 = now_seconds();
        ProjectionProfile profile = build_profile(field, poi, config.projection());
        DelayReport report = delay_report(profile, config.delay_tolerance);
        double dt = now_seconds() - t0;

        std::string poi_line = "# poi = " + poi.id + "," + fmt(poi.x) + "," + fmt(poi.y) + "\n";
        write_text_file(out_path(config, "profile_" + safe_name(poi.id) + ".csv"),
                        echo + poi_line + profile_to_text(profile));
        write_text_file(out_path(config, "delay_" + safe_name(poi.id) + ".txt"),
                        echo + poi_line + delay_report_to_text(report));
        std::cout << "poi " << poi.id << ": projection " << fmt(dt * 1e3) << " ms over "
                  << field.size() << " slices\n";
    }
    return 0;
}

int cmd_baseline(const CommonArgs& args) {
    RunConfig config = make_config(args);
    std::vector<Poi> pois = parse_pois(args.poi_args);
    if (pois.empty()) throw ConfigError("--poi is required (at least one)");

    IngestResult ingest = ingest_points_file(config);
    TimeRange horizon = resolve_horizon(config, ingest.points);
    std::vector<TimeSlot> slots = make_slots(horizon, config.slot_duration);

    std::string echo = comment_block(echo_config(config));
    for (const Poi& poi : pois) {
        double t0 = now_seconds();
        std::string text = echo + "slot_index,slot_start,inbound_crossings,outbound_crossings\n";
        for (const TimeSlot& slot : slots) {
            CrossingCounts c = filter_trajectories(ingest.vectors, poi,
                                                   config.baseline_radius, slot);
            text += std::to_string(slot.index) + "," + fmt(slot.start_t) + "," +
                    std::to_string(c.inbound_crossings) + "," +
                    std::to_string(c.outbound_crossings) + "\n";
        }
        double dt = now_seconds() - t0;
        write_text_file(out_path(config, "baseline_" + safe_name(poi.id) + ".csv"), text);
        std::cout << "poi " << poi.id << ": filter scan " << fmt(dt * 1e3) << " ms over "
                  << slots.size() << " windows\n";
    }
    return 0;
}

int cmd_bench(const CommonArgs& args) {
    RunConfig config = make_config(args);
    std::vector<Poi> pois = parse_pois(args.poi_args);
    if (pois.empty()) throw ConfigError("--poi is required (at least one)");

    std::vector<GpsPoint> points;
    std::vector<TravelVector> vectors;
    if (!config.input_path.empty()) {
        IngestResult ingest = ingest_points_file(config);
        points = std::move(ingest.points);
        vectors = std::move(ingest.vectors);
    } else {
        points = generate_synthetic(config.scenario_config(), config.seed);
        FilterReport fr;
        vectors = build_travel_vectors(group_by_vehicle(points), config.filter(), fr);
    }
    TimeRange horizon = resolve_horizon(config, points);

    BenchmarkOptions options;
    options.repetitions = config.bench_repetitions;
    options.baseline_radius = config.baseline_radius;
    BenchmarkReport report =
        run_benchmark(vectors, pois, horizon, config.slot_duration, config.grid(),
                      config.kernel(), config.weighting, config.projection(), options);
    report.point_count = points.size();

    std::string echo = comment_block(echo_config(config));
    write_text_file(out_path(config, "bench_report.txt"), echo + report.to_key_values());
    write_text_file(out_path(config, "bench_report.csv"), echo + report.to_table());
    std::cout << report.to_key_values();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vector kernel density fields over GPS trajectories"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;

    auto wire = [&](CLI::App* cmd, int (*fn)(const CommonArgs&)) {
        add_common(cmd, args);
        cmd->callback([&handler, fn] { handler = fn; });
    };
    wire(app.add_subcommand("gen", "generate a synthetic GPS corpus"), cmd_gen);
    wire(app.add_subcommand("build", "build a field file from a points file"), cmd_build);
    wire(app.add_subcommand("update", "fold new points into an existing field file"),
         cmd_update);
    wire(app.add_subcommand("project", "project a field onto POIs"), cmd_project);
    wire(app.add_subcommand("baseline", "run the trajectory-filter query per slot"),
         cmd_baseline);
    wire(app.add_subcommand("bench", "compare projection vs trajectory filtering"),
         cmd_bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return handler ? handler(args) : 1;
    } catch (const vkd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const vkd::DecodeError& e) {
        std::cerr << "decode error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
