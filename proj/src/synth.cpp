#include "vkd/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace vkd {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

void validate(const ScenarioConfig& c) {
    if (c.fleet_size == 0)
        throw std::invalid_argument("scenario: fleet size must be positive");
    if (!(c.sampling_interval > 0))
        throw std::invalid_argument("scenario: sampling interval must be positive");
    if (!(c.duration_seconds > 0))
        throw std::invalid_argument("scenario: duration must be positive");
    if (!(c.speed_mps > 0)) throw std::invalid_argument("scenario: speed must be positive");
    if (c.speed_jitter < 0 || c.speed_jitter >= 1)
        throw std::invalid_argument("scenario: speed jitter must be in [0, 1)");
    if (c.kind == ScenarioKind::free_roam &&
        (!(c.area_max_x > c.area_min_x) || !(c.area_max_y > c.area_min_y)))
        throw std::invalid_argument("scenario: empty roam area");
    if (c.kind == ScenarioKind::circulate && !(c.ring_radius > 0))
        throw std::invalid_argument("scenario: ring radius must be positive");
    if (c.queue) {
        const QueueEffect& q = *c.queue;
        if (!(q.outer_radius > q.inner_radius) || q.inner_radius < 0)
            throw std::invalid_argument("scenario: queue annulus must satisfy 0 <= inner < outer");
        if (!(q.speed_factor > 0) || q.speed_factor > 1)
            throw std::invalid_argument("scenario: queue speed factor must be in (0, 1]");
    }
}

// A vehicle's motion program. Legs are straight lines except the ring arc;
// the queue effect modulates speed only on inbound legs.
class Vehicle {
  public:
    Vehicle(const ScenarioConfig& config, std::uint64_t seed, std::size_t index)
        : cfg_(config), rng_(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1))) {
        speed_ = cfg_.speed_mps;
        if (cfg_.speed_jitter > 0)
            speed_ *= uniform(rng_, 1.0 - cfg_.speed_jitter, 1.0 + cfg_.speed_jitter);

        if (cfg_.kind == ScenarioKind::free_roam) {
            x_ = uniform(rng_, cfg_.area_min_x, cfg_.area_max_x);
            y_ = uniform(rng_, cfg_.area_min_y, cfg_.area_max_y);
            pick_waypoint();
        } else {
            // Start mid-leg at a uniform position so the fleet is close to
            // its steady-state layout from the first sample.
            double bearing = uniform(rng_, 0, kTwoPi);
            double r = uniform(rng_, 0.05, 1.0) * cfg_.ring_radius;
            x_ = cfg_.poi_x + r * std::cos(bearing);
            y_ = cfg_.poi_y + r * std::sin(bearing);
            inbound_ = uniform01(rng_) < 0.5;
            if (inbound_)
                set_target(cfg_.poi_x, cfg_.poi_y);
            else
                set_target(cfg_.poi_x + cfg_.ring_radius * std::cos(bearing),
                           cfg_.poi_y + cfg_.ring_radius * std::sin(bearing));
        }
    }

    double x() const { return x_; }
    double y() const { return y_; }

    // Advances the vehicle by dt seconds of simulated time starting at t.
    void advance(double t, double dt) {
        while (dt > 1e-12) {
            if (arc_remaining_ > 0) {
                double omega = speed_ / cfg_.ring_radius;
                double step = std::min(dt, arc_remaining_ / omega);
                arc_angle_ += arc_dir_ * omega * step;
                arc_remaining_ -= omega * step;
                x_ = cfg_.poi_x + cfg_.ring_radius * std::cos(arc_angle_);
                y_ = cfg_.poi_y + cfg_.ring_radius * std::sin(arc_angle_);
                t += step;
                dt -= step;
                if (arc_remaining_ <= 1e-12) begin_inbound(arc_angle_);
                continue;
            }

            double dist = std::hypot(target_x_ - x_, target_y_ - y_);
            if (dist <= 1e-9) {
                next_leg();
                continue;
            }
            double ux = (target_x_ - x_) / dist;
            double uy = (target_y_ - y_) / dist;

            double v = current_speed(t);
            double step_time = dt;
            // Stop at whichever comes first: the leg end, a queue-annulus
            // radius, or a queue-window edge, so speed stays piecewise
            // constant within each integrated step.
            step_time = std::min(step_time, dist / v);
            if (inbound_ && cfg_.queue) {
                double boundary = distance_to_annulus_boundary();
                if (boundary > 0) step_time = std::min(step_time, boundary / v);
                double window = time_to_window_edge(t);
                if (window > 1e-12) step_time = std::min(step_time, window);
            }

            x_ += ux * v * step_time;
            y_ += uy * v * step_time;
            t += step_time;
            dt -= step_time;
            if (std::hypot(target_x_ - x_, target_y_ - y_) <= 1e-9) next_leg();
        }
    }

  private:
    // Inbound legs are radial, so the annulus splits them into three bands
    // with piecewise-constant speed. A small tolerance keeps a step that
    // lands on a radius from being classified back into the band it left.
    static constexpr double kBandEps = 1e-9;

    double radius() const { return std::hypot(x_ - cfg_.poi_x, y_ - cfg_.poi_y); }

    bool window_active(double t) const {
        const QueueEffect& q = *cfg_.queue;
        return t >= q.active_start.value_or(-1e300) && t < q.active_end.value_or(1e300);
    }

    double current_speed(double t) const {
        if (inbound_ && cfg_.queue && window_active(t)) {
            const QueueEffect& q = *cfg_.queue;
            double r = radius();
            if (r <= q.outer_radius + kBandEps && r > q.inner_radius + kBandEps)
                return speed_ * q.speed_factor;
        }
        return speed_;
    }

    // Distance until the speed band can change; negative when it cannot.
    double distance_to_annulus_boundary() const {
        const QueueEffect& q = *cfg_.queue;
        double r = radius();
        if (r > q.outer_radius + kBandEps) return r - q.outer_radius;
        if (r > q.inner_radius + kBandEps) return r - q.inner_radius;
        return -1;
    }

    double time_to_window_edge(double t) const {
        const QueueEffect& q = *cfg_.queue;
        if (q.active_start && t < *q.active_start) return *q.active_start - t;
        if (q.active_end && t < *q.active_end) return *q.active_end - t;
        return -1;
    }

    void set_target(double tx, double ty) {
        target_x_ = tx;
        target_y_ = ty;
    }

    void pick_waypoint() {
        set_target(uniform(rng_, cfg_.area_min_x, cfg_.area_max_x),
                   uniform(rng_, cfg_.area_min_y, cfg_.area_max_y));
    }

    void begin_inbound(double bearing) {
        inbound_ = true;
        arc_remaining_ = 0;
        x_ = cfg_.poi_x + cfg_.ring_radius * std::cos(bearing);
        y_ = cfg_.poi_y + cfg_.ring_radius * std::sin(bearing);
        set_target(cfg_.poi_x, cfg_.poi_y);
    }

    void next_leg() {
        if (cfg_.kind == ScenarioKind::free_roam) {
            pick_waypoint();
            return;
        }
        if (inbound_) {
            // Reached the POI; leave on a fresh bearing.
            inbound_ = false;
            double bearing = uniform(rng_, 0, kTwoPi);
            x_ = cfg_.poi_x;
            y_ = cfg_.poi_y;
            set_target(cfg_.poi_x + cfg_.ring_radius * std::cos(bearing),
                       cfg_.poi_y + cfg_.ring_radius * std::sin(bearing));
        } else {
            // Reached the ring; follow it to the next approach bearing.
            double dx = x_ - cfg_.poi_x;
            double dy = y_ - cfg_.poi_y;
            arc_angle_ = std::atan2(dy, dx);
            arc_remaining_ = uniform(rng_, kTwoPi / 12, kTwoPi / 2);
            arc_dir_ = uniform01(rng_) < 0.5 ? 1.0 : -1.0;
        }
    }

    const ScenarioConfig& cfg_;
    std::mt19937_64 rng_;
    double speed_ = 0;
    double x_ = 0, y_ = 0;
    double target_x_ = 0, target_y_ = 0;
    bool inbound_ = false;
    double arc_angle_ = 0;
    double arc_remaining_ = 0;  // radians left on the ring arc
    double arc_dir_ = 1.0;
};

}  // namespace

std::vector<GpsPoint> generate_synthetic(const ScenarioConfig& config,
                                         std::uint64_t seed) {
    validate(config);

    std::size_t samples_per_vehicle = static_cast<std::size_t>(std::floor(
                                          config.duration_seconds /
                                              config.sampling_interval +
                                          1e-9)) +
                                      1;

    std::vector<GpsPoint> points;
    points.reserve(samples_per_vehicle * config.fleet_size);

    for (std::size_t v = 0; v < config.fleet_size; ++v) {
        Vehicle vehicle(config, seed, v);
        char id[24];
        std::snprintf(id, sizeof id, "V%05zu", v);

        double t = config.start_time;
        for (std::size_t k = 0; k < samples_per_vehicle; ++k) {
            GpsPoint p;
            p.vehicle_id = id;
            p.timestamp = config.start_time + double(k) * config.sampling_interval;
            p.x = vehicle.x();
            p.y = vehicle.y();
            p.status = config.status_value;
            points.push_back(std::move(p));
            if (k + 1 < samples_per_vehicle) {
                vehicle.advance(t, config.sampling_interval);
                t += config.sampling_interval;
            }
        }
    }
    return points;
}

}  // namespace vkd
