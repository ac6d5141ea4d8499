#include "vkd/projection.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vkd {

namespace {

// Shortest text that round-trips a double; plain integers stay decimal.
std::string fmt_double(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    for (int prec = 1; prec <= 16; ++prec) {
        char trial[40];
        std::snprintf(trial, sizeof trial, "%.*g", prec, v);
        double back = 0;
        std::sscanf(trial, "%lf", &back);
        if (back == v) return trial;
    }
    return buf;
}

double decay_factor(double d, const ProjectionParams& params) {
    switch (params.decay) {
        case DistanceDecay::none:
            return 1.0;
        case DistanceDecay::linear:
            return 1.0 - d / *params.search_radius;
        case DistanceDecay::inverse:
            return 1.0 / (1.0 + d);
    }
    return 1.0;
}

void validate(const ProjectionParams& params) {
    if (params.search_radius && !(*params.search_radius > 0))
        throw std::invalid_argument("projection: search radius must be > 0");
    if (params.decay == DistanceDecay::linear && !params.search_radius)
        throw std::invalid_argument("projection: linear decay requires a bounded search radius");
}

}  // namespace

double project_cell(double cx, double cy, double vx, double vy, const Poi& poi,
                    const ProjectionParams& params) {
    if (vx == 0 && vy == 0) return 0;
    double dx = poi.x - cx;
    double dy = poi.y - cy;
    double d = std::sqrt(dx * dx + dy * dy);
    if (d == 0) return 0;  // direction undefined at the POI itself
    if (params.search_radius && d > *params.search_radius) return 0;

    double ax = dx, ay = dy;
    if (params.normalization == CellPoiNormalization::unit) {
        ax /= d;
        ay /= d;
    }
    return (ax * vx + ay * vy) * decay_factor(d, params);
}

std::pair<double, double> project_slice(const FieldSlice& slice, const Poi& poi,
                                        const ProjectionParams& params) {
    validate(params);
    double inbound = 0, outbound = 0;
    const GridSpec& g = slice.grid;
    for (std::uint32_t j = 0; j < g.rows; ++j) {
        double cy = g.center_y(j);
        const CellDensity* row = slice.cells.data() + g.cell_index(0, j);
        for (std::uint32_t i = 0; i < g.cols; ++i) {
            const CellDensity& c = row[i];
            if (c.vx == 0 && c.vy == 0) continue;
            double s = project_cell(g.center_x(i), cy, c.vx, c.vy, poi, params);
            if (s > 0)
                inbound += s;
            else
                outbound += -s;
        }
    }
    return {inbound, outbound};
}

ProjectionProfile build_profile(std::span<const FieldSlice> field, const Poi& poi,
                                const ProjectionParams& params) {
    validate(params);
    if (field.empty()) throw std::invalid_argument("build_profile: empty field");

    const GridSpec& grid = field.front().grid;
    double width = field.front().slot.duration();
    for (const FieldSlice& s : field) {
        if (!(s.grid == grid))
            throw std::invalid_argument("build_profile: slices use mixed grids");
        double w = s.slot.duration();
        if (std::abs(w - width) > 1e-9 * std::max(std::abs(width), 1.0))
            throw std::invalid_argument("build_profile: slices use mixed slot widths");
    }

    ProjectionProfile profile;
    profile.poi = poi;
    profile.params = params;
    profile.slot_width = width;
    profile.samples.reserve(field.size());
    profile.slot_starts.reserve(field.size());
    for (const FieldSlice& s : field) {
        auto [inbound, outbound] = project_slice(s, poi, params);
        ProjectionSample sample;
        sample.slot_index = s.slot.index;
        sample.inbound = inbound;
        sample.outbound = outbound;
        sample.net = inbound - outbound;
        profile.samples.push_back(sample);
        profile.slot_starts.push_back(s.slot.start_t);
    }
    return profile;
}

double demand_area(std::span<const double> values, std::span<const double> widths) {
    if (values.empty() || widths.size() != values.size() - 1)
        throw std::invalid_argument("demand_area: widths must have length |values| - 1");
    double area = 0;
    for (std::size_t t = 0; t + 1 < values.size(); ++t) {
        if (!(widths[t] > 0))
            throw std::invalid_argument("demand_area: widths must be positive");
        area += widths[t] * (values[t] + values[t + 1]) / 2.0;
    }
    return area;
}

std::optional<double> change_rate(double d_tt, double d_ta) {
    if (d_ta == 0) return std::nullopt;
    return (d_tt - d_ta) / d_ta;
}

const char* to_string(SlotClassification c) {
    switch (c) {
        case SlotClassification::inbound_queue:
            return "inbound_queue";
        case SlotClassification::outbound_congestion:
            return "outbound_congestion";
        case SlotClassification::balanced:
            return "balanced";
    }
    return "balanced";
}

DelayReport delay_report(const ProjectionProfile& profile,
                         std::optional<double> tolerance) {
    const auto& samples = profile.samples;
    if (samples.size() < 2)
        throw std::invalid_argument("delay_report: need at least two samples");

    std::vector<double> inbound(samples.size()), outbound(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        inbound[k] = samples[k].inbound;
        outbound[k] = samples[k].outbound;
    }
    std::vector<double> widths(samples.size() - 1, profile.slot_width);

    DelayReport report;
    report.d_tt = demand_area(inbound, widths);
    report.d_ta = demand_area(outbound, widths);
    report.rate = change_rate(report.d_tt, report.d_ta);

    report.intervals.reserve(samples.size());
    for (const ProjectionSample& s : samples) {
        double tol = tolerance ? *tolerance
                               : 1e-9 * std::max({std::abs(s.inbound),
                                                  std::abs(s.outbound), 1.0});
        SlotGap gap;
        gap.slot_index = s.slot_index;
        gap.gap = std::abs(s.inbound - s.outbound);
        if (s.outbound - s.inbound > tol)
            gap.classification = SlotClassification::inbound_queue;
        else if (s.inbound - s.outbound > tol)
            gap.classification = SlotClassification::outbound_congestion;
        else
            gap.classification = SlotClassification::balanced;
        report.intervals.push_back(gap);
    }
    return report;
}

std::string profile_to_text(const ProjectionProfile& profile) {
    std::string out = "slot_index,slot_start,inbound,outbound,net\n";
    for (std::size_t k = 0; k < profile.samples.size(); ++k) {
        const ProjectionSample& s = profile.samples[k];
        out += std::to_string(s.slot_index);
        out += ',';
        out += fmt_double(profile.slot_starts[k]);
        out += ',';
        out += fmt_double(s.inbound);
        out += ',';
        out += fmt_double(s.outbound);
        out += ',';
        out += fmt_double(s.net);
        out += '\n';
    }
    return out;
}

std::string delay_report_to_text(const DelayReport& report) {
    std::string out = "D_tt,D_ta,rate\n";
    out += fmt_double(report.d_tt);
    out += ',';
    out += fmt_double(report.d_ta);
    out += ',';
    out += report.rate ? fmt_double(*report.rate) : std::string("undefined");
    out += '\n';
    out += "slot_index,classification,gap\n";
    for (const SlotGap& g : report.intervals) {
        out += std::to_string(g.slot_index);
        out += ',';
        out += to_string(g.classification);
        out += ',';
        out += fmt_double(g.gap);
        out += '\n';
    }
    return out;
}

}  // namespace vkd
