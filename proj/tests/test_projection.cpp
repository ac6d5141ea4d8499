#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "helpers.hpp"
#include "vkd/projection.hpp"

using namespace vkd;
using vkdtest::Rng;

namespace {

// A 3x3 grid of 100 m cells around the origin; cell (1,1) center is (50, 50).
FieldSlice blank_slice(std::size_t slot_index = 0) {
    FieldSlice s;
    s.slot = TimeSlot{slot_index, double(slot_index) * 3600, double(slot_index + 1) * 3600};
    s.grid = GridSpec::from_bounds(-100, -100, 200, 200, 100);
    s.cells.assign(s.grid.cell_count(), CellDensity{});
    return s;
}

void set_cell(FieldSlice& s, std::uint32_t i, std::uint32_t j, double vx, double vy) {
    CellDensity& c = s.cells[s.grid.cell_index(i, j)];
    c.density = 1;
    c.vx = vx;
    c.vy = vy;
}

}  // namespace

TEST_CASE("project_slice single-cell cases") {
    ProjectionParams params;

    SUBCASE("vector pointing straight at the POI is all inbound") {
        FieldSlice s = blank_slice();
        set_cell(s, 1, 1, 3.5, 0);            // cell center (50, 50), pointing east
        Poi poi{"P", 250, 50};                // due east of the cell
        auto [inbound, outbound] = project_slice(s, poi, params);
        CHECK(inbound == doctest::Approx(3.5).epsilon(1e-12));
        CHECK(outbound == 0);
    }
    SUBCASE("vector perpendicular to the cell-POI direction contributes nothing") {
        FieldSlice s = blank_slice();
        set_cell(s, 1, 1, 0, 2.0);
        Poi poi{"P", 250, 50};
        auto [inbound, outbound] = project_slice(s, poi, params);
        CHECK(inbound == 0);
        CHECK(outbound == 0);
    }
    SUBCASE("east and west cells with equal vectors split evenly") {
        FieldSlice s = blank_slice();
        set_cell(s, 0, 1, 1, 0);  // center (-50, 50), west of the POI
        set_cell(s, 2, 1, 1, 0);  // center (150, 50), east of the POI
        Poi poi{"P", 50, 50};
        auto [inbound, outbound] = project_slice(s, poi, params);
        CHECK(inbound == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(outbound == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("a cell exactly on the POI is skipped") {
        FieldSlice s = blank_slice();
        set_cell(s, 1, 1, 5, 5);
        Poi poi{"P", 50, 50};
        auto [inbound, outbound] = project_slice(s, poi, params);
        CHECK(inbound == 0);
        CHECK(outbound == 0);
    }
    SUBCASE("search radius excludes distant cells") {
        FieldSlice s = blank_slice();
        set_cell(s, 1, 1, 1, 0);
        Poi poi{"P", 250, 50};  // 200 m away
        ProjectionParams bounded;
        bounded.search_radius = 150;
        auto [inbound, outbound] = project_slice(s, poi, bounded);
        CHECK(inbound == 0);
        CHECK(outbound == 0);
    }
    SUBCASE("literal normalization scales with distance") {
        FieldSlice s = blank_slice();
        set_cell(s, 1, 1, 1, 0);
        Poi poi{"P", 250, 50};
        ProjectionParams literal;
        literal.normalization = CellPoiNormalization::literal;
        auto [inbound, outbound] = project_slice(s, poi, literal);
        CHECK(inbound == doctest::Approx(200.0).epsilon(1e-12));
        CHECK(outbound == 0);
    }
    SUBCASE("decay modes") {
        FieldSlice s = blank_slice();
        set_cell(s, 1, 1, 1, 0);
        Poi poi{"P", 250, 50};
        ProjectionParams linear;
        linear.search_radius = 400;
        linear.decay = DistanceDecay::linear;
        auto [in_lin, out_lin] = project_slice(s, poi, linear);
        CHECK(in_lin == doctest::Approx(0.5).epsilon(1e-12));  // 1 - 200/400
        CHECK(out_lin == 0);

        ProjectionParams inverse;
        inverse.decay = DistanceDecay::inverse;
        auto [in_inv, out_inv] = project_slice(s, poi, inverse);
        CHECK(in_inv == doctest::Approx(1.0 / 201.0).epsilon(1e-12));

        ProjectionParams bad;
        bad.decay = DistanceDecay::linear;  // linear without a radius
        CHECK_THROWS_AS(project_slice(s, poi, bad), std::invalid_argument);
    }
}

TEST_CASE("build_profile") {
    ProjectionParams params;
    SUBCASE("all-zero field gives all-zero samples") {
        std::vector<FieldSlice> field = {blank_slice(0), blank_slice(1), blank_slice(2)};
        ProjectionProfile p = build_profile(field, Poi{"P", 10, 10}, params);
        REQUIRE(p.samples.size() == 3);
        CHECK(p.slot_width == 3600);
        for (const auto& s : p.samples) {
            CHECK(s.inbound == 0);
            CHECK(s.outbound == 0);
            CHECK(s.net == 0);
        }
    }
    SUBCASE("one nonzero slice gives exactly one nonzero sample") {
        std::vector<FieldSlice> field = {blank_slice(0), blank_slice(1), blank_slice(2)};
        set_cell(field[1], 0, 0, 2, 1);
        ProjectionProfile p = build_profile(field, Poi{"P", 10, 10}, params);
        CHECK(p.samples[0].inbound == 0);
        CHECK(p.samples[1].inbound + p.samples[1].outbound > 0);
        CHECK(p.samples[2].inbound == 0);
        CHECK(p.samples[1].slot_index == 1);
    }
    SUBCASE("sample count equals slice count") {
        std::vector<FieldSlice> field;
        for (std::size_t k = 0; k < 24; ++k) field.push_back(blank_slice(k));
        ProjectionProfile p = build_profile(field, Poi{"P", 0, 0}, params);
        CHECK(p.samples.size() == 24);
    }
    SUBCASE("mixed grids are fatal") {
        std::vector<FieldSlice> field = {blank_slice(0), blank_slice(1)};
        field[1].grid = GridSpec::from_bounds(0, 0, 100, 100, 50);
        field[1].cells.assign(field[1].grid.cell_count(), CellDensity{});
        CHECK_THROWS_AS(build_profile(field, Poi{"P", 0, 0}, params),
                        std::invalid_argument);
    }
    SUBCASE("mixed slot widths are fatal") {
        std::vector<FieldSlice> field = {blank_slice(0), blank_slice(1)};
        field[1].slot.end_t = field[1].slot.start_t + 1800;
        CHECK_THROWS_AS(build_profile(field, Poi{"P", 0, 0}, params),
                        std::invalid_argument);
    }
    SUBCASE("empty field is fatal") {
        CHECK_THROWS_AS(build_profile({}, Poi{"P", 0, 0}, params), std::invalid_argument);
    }
}

TEST_CASE("demand_area trapezoid") {
    std::vector<double> w1 = {1, 1, 1};
    std::vector<double> flat = {2, 2, 2, 2};
    CHECK(demand_area(flat, w1) == 6.0);

    std::vector<double> zeros = {0, 0, 0, 0};
    CHECK(demand_area(zeros, w1) == 0.0);

    std::vector<double> ramp = {0, 4};
    std::vector<double> w2 = {2};
    CHECK(demand_area(ramp, w2) == 4.0);

    CHECK_THROWS_AS(demand_area(flat, w2), std::invalid_argument);
}

TEST_CASE("change_rate") {
    CHECK(*change_rate(6, 3) == 1.0);
    CHECK(*change_rate(3, 3) == 0.0);
    CHECK(!change_rate(5, 0).has_value());
}

namespace {

ProjectionProfile profile_from(const std::vector<double>& inbound,
                               const std::vector<double>& outbound, double width) {
    ProjectionProfile p;
    p.slot_width = width;
    for (std::size_t k = 0; k < inbound.size(); ++k) {
        ProjectionSample s;
        s.slot_index = k;
        s.inbound = inbound[k];
        s.outbound = outbound[k];
        s.net = s.inbound - s.outbound;
        p.samples.push_back(s);
        p.slot_starts.push_back(double(k) * width);
    }
    return p;
}

}  // namespace

TEST_CASE("delay_report") {
    SUBCASE("identical curves are balanced with rate 0") {
        auto p = profile_from({1, 2, 3}, {1, 2, 3}, 1);
        DelayReport r = delay_report(p);
        CHECK(r.d_tt == r.d_ta);
        CHECK(*r.rate == 0.0);
        for (const auto& g : r.intervals) {
            CHECK(g.classification == SlotClassification::balanced);
            CHECK(g.gap == 0);
        }
    }
    SUBCASE("outbound-dominant profile is an inbound queue") {
        auto p = profile_from({0, 0, 0}, {2, 2, 2}, 1);
        DelayReport r = delay_report(p);
        CHECK(r.d_tt == 0.0);
        CHECK(r.d_ta == 4.0);
        CHECK(*r.rate == -1.0);
        for (const auto& g : r.intervals)
            CHECK(g.classification == SlotClassification::inbound_queue);
    }
    SUBCASE("inbound-dominant profile is outbound congestion, rate undefined") {
        auto p = profile_from({2, 2}, {0, 0}, 1);
        DelayReport r = delay_report(p);
        CHECK(r.d_tt == 2.0);
        CHECK(r.d_ta == 0.0);
        CHECK(!r.rate.has_value());
        for (const auto& g : r.intervals) {
            CHECK(g.classification == SlotClassification::outbound_congestion);
            CHECK(g.gap == 2.0);
        }
    }
    SUBCASE("fewer than two samples is fatal") {
        auto p = profile_from({1}, {1}, 1);
        CHECK_THROWS_AS(delay_report(p), std::invalid_argument);
    }
    SUBCASE("explicit tolerance widens the balanced band") {
        auto p = profile_from({1.0, 1.0}, {1.05, 1.0}, 1);
        DelayReport strict = delay_report(p);
        CHECK(strict.intervals[0].classification == SlotClassification::inbound_queue);
        DelayReport loose = delay_report(p, 0.1);
        CHECK(loose.intervals[0].classification == SlotClassification::balanced);
    }
}

TEST_CASE("projection properties") {
    Rng rng(29);
    const TimeSlot slot{0, 0, 3600};

    SUBCASE("decomposition: net equals the signed per-cell sum") {
        for (int iter = 0; iter < 100; ++iter) {
            FieldSlice s = vkdtest::random_slice(rng);
            Poi poi{"P", rng.uniform(s.grid.min_x, s.grid.max_x()),
                    rng.uniform(s.grid.min_y, s.grid.max_y())};
            ProjectionParams params;
            auto [inbound, outbound] = project_slice(s, poi, params);
            double signed_sum = 0;
            for (std::uint32_t j = 0; j < s.grid.rows; ++j)
                for (std::uint32_t i = 0; i < s.grid.cols; ++i) {
                    const CellDensity& c = s.at(i, j);
                    signed_sum += project_cell(s.grid.center_x(i), s.grid.center_y(j),
                                               c.vx, c.vy, poi, params);
                }
            CHECK(vkdtest::rel_close(inbound - outbound, signed_sum, 1e-9));
        }
    }

    SUBCASE("joint rotation about the POI preserves the projection") {
        for (int iter = 0; iter < 100; ++iter) {
            Poi poi{"P", rng.uniform(-500, 500), rng.uniform(-500, 500)};
            double angle = rng.uniform(0, 6.28318530717958648);
            double ca = std::cos(angle), sa = std::sin(angle);
            ProjectionParams params;
            if (iter % 3 == 1) params.decay = DistanceDecay::inverse;
            if (iter % 3 == 2) params.normalization = CellPoiNormalization::literal;

            double total_before_in = 0, total_before_out = 0;
            double total_after_in = 0, total_after_out = 0;
            for (int cell = 0; cell < 20; ++cell) {
                double cx = poi.x + rng.uniform(-800, 800);
                double cy = poi.y + rng.uniform(-800, 800);
                double vx = rng.uniform(-3, 3), vy = rng.uniform(-3, 3);
                double s = project_cell(cx, cy, vx, vy, poi, params);
                (s > 0 ? total_before_in : total_before_out) += std::abs(s);

                double rx = poi.x + ca * (cx - poi.x) - sa * (cy - poi.y);
                double ry = poi.y + sa * (cx - poi.x) + ca * (cy - poi.y);
                double rvx = ca * vx - sa * vy;
                double rvy = sa * vx + ca * vy;
                double s2 = project_cell(rx, ry, rvx, rvy, poi, params);
                (s2 > 0 ? total_after_in : total_after_out) += std::abs(s2);
            }
            CHECK(vkdtest::rel_close(total_before_in, total_after_in, 1e-9));
            CHECK(vkdtest::rel_close(total_before_out, total_after_out, 1e-9));
        }
    }

    SUBCASE("positive scaling multiplies both accumulators") {
        for (int iter = 0; iter < 100; ++iter) {
            FieldSlice s = vkdtest::random_slice(rng);
            double k = rng.uniform(0.1, 20);
            FieldSlice scaled = s;
            for (CellDensity& c : scaled.cells) {
                c.vx *= k;
                c.vy *= k;
            }
            Poi poi{"P", rng.uniform(s.grid.min_x, s.grid.max_x()),
                    rng.uniform(s.grid.min_y, s.grid.max_y())};
            ProjectionParams params;
            auto [in1, out1] = project_slice(s, poi, params);
            auto [in2, out2] = project_slice(scaled, poi, params);
            CHECK(vkdtest::rel_close(in2, k * in1, 1e-9));
            CHECK(vkdtest::rel_close(out2, k * out1, 1e-9));
            // Classification (which side dominates) is scale invariant.
            CHECK((in1 > out1) == (in2 > out2));
        }
    }

    SUBCASE("radial sink: vectors aimed at the POI give zero outbound") {
        for (int iter = 0; iter < 100; ++iter) {
            FieldSlice s = blank_slice();
            Poi poi{"P", rng.uniform(-90, 190), rng.uniform(-90, 190)};
            for (std::uint32_t j = 0; j < s.grid.rows; ++j)
                for (std::uint32_t i = 0; i < s.grid.cols; ++i) {
                    double dx = poi.x - s.grid.center_x(i);
                    double dy = poi.y - s.grid.center_y(j);
                    double d = std::hypot(dx, dy);
                    if (d == 0) continue;
                    double mag = rng.uniform(0.1, 5);
                    CellDensity& c = s.cells[s.grid.cell_index(i, j)];
                    c.density = mag;
                    c.vx = mag * dx / d;
                    c.vy = mag * dy / d;
                }
            auto [inbound, outbound] = project_slice(s, poi, ProjectionParams{});
            CHECK(outbound == 0);
            CHECK(inbound > 0);
        }
    }

    SUBCASE("sign antisymmetry: negating vectors swaps the split exactly") {
        for (int iter = 0; iter < 100; ++iter) {
            FieldSlice s = vkdtest::random_slice(rng);
            FieldSlice neg = s;
            for (CellDensity& c : neg.cells) {
                c.vx = -c.vx;
                c.vy = -c.vy;
            }
            Poi poi{"P", rng.uniform(s.grid.min_x, s.grid.max_x()),
                    rng.uniform(s.grid.min_y, s.grid.max_y())};
            ProjectionParams params;
            auto [in1, out1] = project_slice(s, poi, params);
            auto [in2, out2] = project_slice(neg, poi, params);
            CHECK(in2 == out1);
            CHECK(out2 == in1);
        }
    }

    SUBCASE("query purity: repeated queries return identical results") {
        FieldSlice s = vkdtest::random_slice(rng);
        auto cells_before = s.cells;
        Poi poi{"P", 100, 100};
        ProjectionParams params;
        auto [in1, out1] = project_slice(s, poi, params);
        auto [in2, out2] = project_slice(s, poi, params);
        CHECK(in1 == in2);
        CHECK(out1 == out2);
        CHECK(s.cells == cells_before);
    }
    (void)slot;
}

TEST_CASE("report text formats") {
    auto p = profile_from({1.5, 0}, {0.5, 0}, 3600);
    std::string text = profile_to_text(p);
    CHECK(text.find("slot_index,slot_start,inbound,outbound,net") == 0);
    CHECK(text.find("0,0,1.5,0.5,1") != std::string::npos);

    DelayReport r = delay_report(p);
    std::string report = delay_report_to_text(r);
    CHECK(report.find("D_tt,D_ta,rate") == 0);
    CHECK(report.find("slot_index,classification,gap") != std::string::npos);

    auto undef = profile_from({1, 1}, {0, 0}, 1);
    std::string undef_text = delay_report_to_text(delay_report(undef));
    CHECK(undef_text.find("undefined") != std::string::npos);
    CHECK(undef_text.find("outbound_congestion") != std::string::npos);
}
