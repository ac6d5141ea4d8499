#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vkd/config.hpp"

using namespace vkd;

namespace {

// Round-trips a config file through a temp path.
std::string write_temp(const std::string& text) {
    static int counter = 0;
    std::string path = "/tmp/vkd_config_test_" + std::to_string(counter++) + ".cfg";
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("defaults are a valid configuration") {
    RunConfig config;
    CHECK_NOTHROW(validate_config(config));
    CHECK(config.cell_size == 200);
    CHECK(config.slot_duration == 3600);
    CHECK(config.kernel_radius == 1000);
    CHECK(config.kernel_constant == 21.75);
}

TEST_CASE("config file parsing with comments and overrides") {
    std::string path = write_temp(
        "# a comment\n"
        "\n"
        "grid.cell_size = 100   # trailing comment\n"
        "kernel.radius = 500\n"
        "kernel.weighting = literal\n"
        "projection.radius = unbounded\n"
        "filter.max_gap = off\n"
        "synth.scenario = circulate\n");
    RunConfig config;
    load_config_file(config, path);
    CHECK(config.cell_size == 100);
    CHECK(config.kernel_radius == 500);
    CHECK(config.weighting == WeightingMode::literal);
    CHECK(!config.projection_radius.has_value());
    CHECK(!config.max_gap_seconds.has_value());
    CHECK(config.scenario == ScenarioKind::circulate);
    std::remove(path.c_str());
}

TEST_CASE("unknown keys are rejected by name") {
    RunConfig config;
    try {
        apply_config_value(config, "grid.cellsize", "100");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid.cellsize") != std::string::npos);
    }
}

TEST_CASE("bad values name the key") {
    RunConfig config;
    try {
        apply_config_value(config, "kernel.radius", "wide");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("kernel.radius") != std::string::npos);
    }
    CHECK_THROWS_AS(apply_config_value(config, "kernel.weighting", "both"), ConfigError);
    CHECK_THROWS_AS(apply_config_value(config, "projection.decay", "exp"), ConfigError);
    CHECK_THROWS_AS(apply_config_value(config, "filter.occupied_only", "maybe"), ConfigError);
}

TEST_CASE("validation names the offending key") {
    RunConfig config;
    config.cell_size = 0;
    try {
        validate_config(config);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("grid.cell_size") != std::string::npos);
    }

    RunConfig bad_decay;
    bad_decay.decay = DistanceDecay::linear;  // without a bounded radius
    CHECK_THROWS_AS(validate_config(bad_decay), ConfigError);

    RunConfig bad_reps;
    bad_reps.bench_repetitions = 1;
    CHECK_THROWS_AS(validate_config(bad_reps), ConfigError);
}

TEST_CASE("echo parses back to the same configuration") {
    RunConfig config;
    config.cell_size = 123;
    config.kernel_radius = 777;
    config.projection_radius = 2500;
    config.decay = DistanceDecay::inverse;
    config.max_speed_mps = std::nullopt;
    config.queue_factor = 0.5;
    config.input_path = "/tmp/points.csv";

    std::string echoed = echo_config(config);
    RunConfig back;
    std::istringstream lines(echoed);
    std::string line;
    while (std::getline(lines, line)) {
        auto eq = line.find(" = ");
        REQUIRE(eq != std::string::npos);
        apply_config_value(back, line.substr(0, eq), line.substr(eq + 3));
    }
    CHECK(echo_config(back) == echoed);
}

TEST_CASE("column schema parsing") {
    RunConfig config;
    config.columns = "timestamp,vehicle_id,lat,lon";
    SchemaConfig schema = config.schema();
    CHECK(schema.time_col == 0);
    CHECK(schema.vehicle_col == 1);
    CHECK(schema.lat_col == 2);
    CHECK(schema.lon_col == 3);
    CHECK(schema.status_col == -1);

    config.columns = "vehicle_id,_,timestamp,lon,lat,status";
    schema = config.schema();
    CHECK(schema.time_col == 2);
    CHECK(schema.status_col == 5);

    config.columns = "vehicle_id,timestamp,lon";
    CHECK_THROWS_AS(config.schema(), ConfigError);
    config.columns = "vehicle_id,timestamp,lon,lat,speedometer";
    CHECK_THROWS_AS(config.schema(), ConfigError);
}

TEST_CASE("scenario config wiring") {
    RunConfig config;
    config.scenario = ScenarioKind::circulate;
    config.queue_factor = 0.5;
    config.queue_inner = 300;
    config.queue_outer = 900;
    ScenarioConfig s = config.scenario_config();
    REQUIRE(s.queue.has_value());
    CHECK(s.queue->speed_factor == 0.5);
    CHECK(s.queue->inner_radius == 300);

    config.queue_factor = 1.0;
    CHECK(!config.scenario_config().queue.has_value());
}
