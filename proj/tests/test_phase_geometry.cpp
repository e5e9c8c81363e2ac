#include <gtest/gtest.h>

#include "support.hpp"

using namespace kgtest;

namespace {

PhaseLoop polygon(std::vector<PhasePoint> pts) { return {0.0, std::move(pts)}; }

TracerTrack arc_track(double from, double to, int samples, PhasePoint c = {}, double r = 1.0) {
    TracerTrack tr{2.0, {}};
    for (int i = 0; i < samples; ++i) {
        const double th = from + (to - from) * i / (samples - 1);
        tr.samples.push_back({static_cast<double>(i), c.u + r * std::cos(th), c.v + r * std::sin(th)});
    }
    return tr;
}

DiagnosticsRow row(double t, double min_left, double max_right) {
    DiagnosticsRow r;
    r.t = t;
    r.u_min_left = min_left;
    r.u_max_left = std::max(min_left, 0.1);
    r.u_min_right = std::min(max_right, -0.1);
    r.u_max_right = max_right;
    return r;
}

}  // namespace

TEST(PhaseLoop, InitialStateIsAxisSegment) {
    SimParams p;
    const auto loop = phase_loop(initial_state(p, make_grid(p)));
    ASSERT_EQ(loop.points.size(), 128u);
    double lo = 1, hi = -1;
    for (const auto& q : loop.points) {
        EXPECT_EQ(q.v, 0.0);
        lo = std::min(lo, q.u);
        hi = std::max(hi, q.u);
    }
    EXPECT_NEAR(lo, -0.04, 1e-17);
    EXPECT_NEAR(hi, 0.04, 1e-17);
}

TEST(PhaseLoop, PointsAreZippedFields) {
    const Grid g = make_grid(16, 8.0);
    FieldState s{3.5, {}, {}};
    for (std::size_t j = 0; j < 16; ++j) {
        s.u.push_back(std::cos(2 * pi * j / 16));
        s.v.push_back(std::sin(2 * pi * j / 16));
    }
    const auto loop = phase_loop(s);
    EXPECT_EQ(loop.t, 3.5);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(loop.points[j], (PhasePoint{s.u[j], s.v[j]}));
    EXPECT_EQ(winding_number(loop, {0, 0}), 1);
    s.v[4] = NAN;
    EXPECT_THROW(phase_loop(s), NonFinite);
}

TEST(Winding, CircleExamples) {
    const auto c = circle(64);
    EXPECT_EQ(winding_number(c, {0, 0}), 1);
    EXPECT_EQ(winding_number(c, {3, 0}), 0);
    EXPECT_EQ(winding_number(c, {0.99, 0}), 1);
    EXPECT_THROW(winding_number(c, {1, 0}), CenterOnLoop);
}

TEST(Winding, GeronoLobes) {
    const auto loop = gerono(400);
    const int right = winding_number(loop, {0.5, 0.0});
    const int left = winding_number(loop, {-0.5, 0.0});
    EXPECT_EQ(std::abs(right), 1);
    EXPECT_EQ(left, -right);  // the figure eight traverses its lobes in opposite senses
    EXPECT_EQ(winding_number(loop, {0.0, 0.3}), 0);
    EXPECT_EQ(std::abs(right) % 2, ray_parity(loop.points, {0.5, 0.0}));
    std::vector<PhasePoint> rev(loop.points.rbegin(), loop.points.rend());
    EXPECT_EQ(winding_number(polygon(rev), {0.5, 0.0}), -right);
}

TEST(Winding, ParityOracleOnRandomPolygons) {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> coord(-1.2, 1.2);
    std::uniform_int_distribution<int> size(3, 40);
    for (int trial = 0; trial < 200; ++trial) {
        const auto poly = random_polygon(rng, size(rng));
        for (int k = 0; k < 5; ++k) {
            const PhasePoint c{coord(rng), coord(rng)};
            const int w = winding_number(polygon(poly), c);
            ASSERT_EQ(std::abs(w) % 2, ray_parity(poly, c)) << "trial " << trial;
        }
    }
}

TEST(Winding, CyclicShiftAndReversal) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto poly = random_polygon(rng, 12);
        const PhasePoint c{coord(rng), coord(rng)};
        const int w = winding_number(polygon(poly), c);
        auto shifted = poly;
        std::rotate(shifted.begin(), shifted.begin() + 5, shifted.end());
        EXPECT_EQ(winding_number(polygon(shifted), c), w);
        std::reverse(poly.begin(), poly.end());
        EXPECT_EQ(winding_number(polygon(poly), c), -w);
    }
}

TEST(Winding, DoubleTraversal) {
    PhaseLoop twice = circle(50);
    const auto once = twice.points;
    twice.points.insert(twice.points.end(), once.begin(), once.end());
    EXPECT_EQ(winding_number(twice, {0.2, -0.1}), 2);
}

TEST(Rotation, Examples) {
    EXPECT_NEAR(cumulative_rotation(arc_track(0, 4 * pi, 201), {0, 0}), 2.0, 1e-12);
    EXPECT_NEAR(cumulative_rotation(arc_track(0, -3 * pi, 151), {0, 0}), -1.5, 1e-12);
    TracerTrack still{2.0, {{0, 0.3, 0.1}, {1, 0.3, 0.1}, {2, 0.3, 0.1}}};
    EXPECT_EQ(cumulative_rotation(still, {0, 0}), 0.0);
    EXPECT_THROW(cumulative_rotation(arc_track(0, pi, 10), {1, 0}), CenterOnTrack);
}

TEST(Rotation, Additive) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> step(0.0, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        TracerTrack whole{2.0, {}};
        PhasePoint p{0.5, 0.5};
        for (int i = 0; i < 80; ++i) {
            p.u += step(rng);
            p.v += step(rng);
            whole.samples.push_back({double(i), p.u, p.v});
        }
        const std::size_t cut = 33;
        TracerTrack a{2.0, {whole.samples.begin(), whole.samples.begin() + cut + 1}};
        TracerTrack b{2.0, {whole.samples.begin() + cut, whole.samples.end()}};
        const PhasePoint c{0.1, -0.2};
        EXPECT_NEAR(cumulative_rotation(whole, c), cumulative_rotation(a, c) + cumulative_rotation(b, c), 1e-12);
    }
}

TEST(Rotation, NonStrictSkipsCenterHits) {
    RotationAccumulator acc({0, 0}, false);
    acc.add({1, 0});
    acc.add({0, 0});
    acc.add({0, 1});
    EXPECT_TRUE(acc.skipped_center());
    EXPECT_NEAR(acc.turns(), 0.25, 1e-15);
}

TEST(Crossings, ConvexCircleHasNone) { EXPECT_TRUE(self_intersections(circle(100)).empty()); }

TEST(Crossings, Bowtie) {
    const auto hits = self_intersections(polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_NEAR(hits[0].point.u, 0.5, 1e-15);
    EXPECT_NEAR(hits[0].point.v, 0.5, 1e-15);
    const std::size_t d = hits[0].edge_b - hits[0].edge_a;
    EXPECT_TRUE(d >= 2 && d <= 2);
}

TEST(Crossings, GeronoNode) {
    for (int m : {40, 101, 400}) {
        const auto loop = gerono(m);
        const auto hits = self_intersections(loop);
        ASSERT_EQ(hits.size(), 1u) << m;
        const double spacing = detail::dist(loop.points[0], loop.points[1]);
        EXPECT_LE(std::hypot(hits[0].point.u, hits[0].point.v), 2.0 * spacing);
    }
}

TEST(Crossings, ThroughSharedVertexCountedOnce) {
    // figure eight whose node is a stored vertex
    const auto hits = self_intersections(polygon({{0, 0}, {1, 1}, {1, -1}, {0, 0}, {-1, 1}, {-1, -1}}));
    EXPECT_EQ(hits.size(), 1u);
}

TEST(Crossings, ReversalAndShiftInvariant) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        auto poly = random_polygon(rng, 10);
        const auto base = self_intersections(polygon(poly));
        auto sorted_points = [](const CrossingSet& s) {
            std::vector<std::pair<double, double>> out;
            for (const auto& c : s) out.push_back({c.point.u, c.point.v});
            std::sort(out.begin(), out.end());
            return out;
        };
        const auto ref = sorted_points(base);
        auto shifted = poly;
        std::rotate(shifted.begin(), shifted.begin() + 3, shifted.end());
        auto reversed = poly;
        std::reverse(reversed.begin(), reversed.end());
        for (const auto& variant : {shifted, reversed}) {
            const auto other = sorted_points(self_intersections(polygon(variant)));
            ASSERT_EQ(other.size(), ref.size());
            for (std::size_t i = 0; i < ref.size(); ++i) {
                EXPECT_NEAR(other[i].first, ref[i].first, 1e-12);
                EXPECT_NEAR(other[i].second, ref[i].second, 1e-12);
            }
        }
        for (const auto& c : base) EXPECT_FALSE(detail::cyclic_near(c.edge_a, c.edge_b, poly.size()));
    }
}

TEST(Crossings, Degenerate) {
    EXPECT_THROW(self_intersections(polygon({{1, 1}, {1, 1}, {1, 1}})), DegenerateLoop);
}

TEST(Split, GeronoIntoTwoLobes) {
    const auto loop = gerono(200);
    const auto parts = split_by_u_sign(loop);
    ASSERT_EQ(parts.size(), 2u);
    for (const auto& part : parts) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& q : part.points) {
            lo = std::min(lo, q.u);
            hi = std::max(hi, q.u);
        }
        EXPECT_TRUE(lo >= 0.0 || hi <= 0.0);
    }
    for (PhasePoint c : {PhasePoint{0.5, 0.0}, PhasePoint{-0.5, 0.01}}) {
        int sum = 0;
        for (const auto& part : parts) sum += winding_number(part, c);
        EXPECT_EQ(sum, winding_number(loop, c));
    }
}

TEST(Split, WindingDecomposesOnRandomPolygons) {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const PhaseLoop loop = polygon(random_polygon(rng, 15));
        const auto parts = split_by_u_sign(loop);
        for (int k = 0; k < 4; ++k) {
            PhasePoint c{coord(rng), coord(rng)};
            if (std::abs(c.u) < 1e-3) continue;
            int sum = 0;
            for (const auto& part : parts) sum += winding_number(part, c);
            ASSERT_EQ(sum, winding_number(loop, c)) << "trial " << trial;
        }
    }
}

TEST(Split, DecomposesSimulatedLoopsAboutTheVacua) {
    SimParams p;
    p.t_end = 1024;
    const auto fp = fixed_points(p);
    int checked = 0;
    RunSinks sinks;
    sinks.snapshot = [&](const FieldState& s) {
        const auto loop = phase_loop(s);
        const auto parts = split_by_u_sign(loop);
        for (PhasePoint c : {fp.plus, fp.minus}) {
            int sum = 0;
            for (const auto& part : parts) sum += winding_number(part, c);
            EXPECT_EQ(sum, winding_number(loop, c)) << "t = " << s.t;
            ++checked;
        }
    };
    integrate(p, sinks);
    EXPECT_EQ(checked, 2 * 65);
}

TEST(Classify, OrdinaryFromOriginCirclingTrack) {
    SimParams p;
    p.t_end = 128;
    // two turns about the origin at radius 0.08 enclose both vacua
    TracerTrack tr{2.0, {}};
    for (int i = 0; i <= 8; ++i) {
        const double th = 4 * pi * i / 8.0 + 0.1;
        tr.samples.push_back({16.0 * i, 0.08 * std::cos(th), 0.08 * std::sin(th)});
    }
    std::vector<DiagnosticsRow> rows;
    for (int i = 0; i <= 8; ++i) rows.push_back(row(16.0 * i, -0.05, 0.05));
    const auto label = classify_mode(std::vector<TracerTrack>{tr}, rows, p);
    EXPECT_EQ(label.kind, ModeKind::ordinary);
    EXPECT_NEAR(label.evidence.rot_origin, 2.0, 1e-12);
    EXPECT_EQ(label.evidence.m_left, -0.05);
    EXPECT_EQ(label.evidence.m_right, 0.05);
    EXPECT_EQ(label.evidence.t_skip, 16.0);
}

TEST(Classify, BreatherRuleOnConstructedInput) {
    SimParams p;
    p.t_end = 128;
    const auto fp = fixed_points(p);
    TracerTrack tr = arc_track(0.0, 2.5 * pi, 9, fp.plus, 0.01);
    for (std::size_t i = 0; i < tr.samples.size(); ++i) tr.samples[i].t = 16.0 * i;
    std::vector<DiagnosticsRow> rows;
    for (int i = 0; i <= 8; ++i) rows.push_back(row(16.0 * i, i == 0 ? -1.0 : 0.01, -0.01));
    const auto label = classify_mode(std::vector<TracerTrack>{tr}, rows, p);
    EXPECT_EQ(label.kind, ModeKind::breather);
    EXPECT_NEAR(label.evidence.rot_vacuum, 1.25, 1e-12);
    EXPECT_LT(std::abs(label.evidence.rot_origin), 1.0);
    EXPECT_EQ(label.evidence.m_left, 0.01);  // the t = 0 row falls before t_skip
}

TEST(Classify, ZeroStateIsIndeterminate) {
    SimParams p;
    p.amplitude = 0.0;
    p.t_end = 128;
    std::vector<DiagnosticsRow> rows;
    std::vector<TracerTrack> tracks{{2.0, {}}, {6.0, {}}};
    RunSinks sinks;
    sinks.diagnostics = [&](const DiagnosticsRow& r) { rows.push_back(r); };
    sinks.tracer = [&](std::size_t k, const TracerSample& s) { tracks[k].samples.push_back(s); };
    integrate(p, sinks);
    const auto label = classify_mode(tracks, rows, p);
    EXPECT_EQ(label.kind, ModeKind::indeterminate);
    EXPECT_EQ(label.evidence.m_left, 0.0);
    EXPECT_EQ(label.evidence.rot_origin, 0.0);
    EXPECT_FALSE(label.evidence.note.empty());
}

TEST(Classify, InsufficientData) {
    SimParams p;
    const TracerTrack tr = arc_track(0, pi, 5);
    const std::vector<TracerTrack> tracks{tr};
    EXPECT_THROW(classify_mode(tracks, std::vector<DiagnosticsRow>{}, p), InsufficientData);
    EXPECT_THROW(classify_mode(tracks, std::vector<DiagnosticsRow>{row(0, 0.1, -0.1)}, p), InsufficientData);
    EXPECT_THROW(classify_mode(std::vector<TracerTrack>{}, std::vector<DiagnosticsRow>{row(2048, 0.1, -0.1)}, p),
                 InsufficientData);
}
