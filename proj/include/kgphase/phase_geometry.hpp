#pragma once

// Geometry of the (u, v) phase plane: the closed loop traced by a field
// snapshot, winding and rotation counts about fixed points, loop
// self-crossings, and the breather / ordinary mode classifier.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgphase/core_state.hpp"
#include "kgphase/dynamics.hpp"

namespace kgphase {

/// Minimum distance a loop or track must keep from a rotation center.
inline constexpr double kCenterEps = 1e-12;

/// Closed polyline {(u_j, v_j)}; the edge (N-1) -> 0 is implied.
struct PhaseLoop {
    double t = 0.0;
    std::vector<PhasePoint> points;
};

inline PhaseLoop phase_loop(const FieldState& state) {
    if (state.u.size() != state.v.size()) throw LengthMismatch("u and v differ in length");
    if (!state.finite()) throw NonFinite("state at t = " + std::to_string(state.t));
    PhaseLoop loop{state.t, {}};
    loop.points.reserve(state.u.size());
    for (std::size_t j = 0; j < state.u.size(); ++j) loop.points.push_back({state.u[j], state.v[j]});
    return loop;
}

struct TracerSample {
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;

    bool operator==(const TracerSample&) const = default;
};

/// Time series of (u, v) at one probe location.
struct TracerTrack {
    double probe_x = 0.0;
    std::vector<TracerSample> samples;
};

namespace detail {

inline double dist(PhasePoint a, PhasePoint b) { return std::hypot(a.u - b.u, a.v - b.v); }

/// Principal-value angle swept from a to b as seen from c, in (-pi, pi].
inline double angle_increment(PhasePoint a, PhasePoint b, PhasePoint c) {
    const double ax = a.u - c.u, ay = a.v - c.v;
    const double bx = b.u - c.u, by = b.v - c.v;
    const double d = std::atan2(ax * by - ay * bx, ax * bx + ay * by);
    return d == -std::numbers::pi ? std::numbers::pi : d;
}

}  // namespace detail

inline constexpr double kWindingIntegerTol = 1e-6;

/// Signed number of turns of the closed loop about `center`.
inline int winding_number(const PhaseLoop& loop, PhasePoint center) {
    const auto& pts = loop.points;
    if (pts.empty()) throw DegenerateLoop("empty loop");
    for (const auto& p : pts)
        if (detail::dist(p, center) <= kCenterEps) throw CenterOnLoop("loop point within 1e-12 of center");
    double total = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
        total += detail::angle_increment(pts[j], pts[(j + 1) % pts.size()], center);
    const double raw = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) >= kWindingIntegerTol)
        throw NonInteger("winding sum " + std::to_string(raw) + " is not an integer");
    return static_cast<int>(rounded);
}

/// Running sum of angle increments about a fixed center, fed one point at a time.
///
/// In strict mode a point within kCenterEps of the center throws CenterOnTrack.
/// Otherwise such points are skipped and the next valid point is measured
/// against the last valid one.
class RotationAccumulator {
public:
    explicit RotationAccumulator(PhasePoint center, bool strict = true) : center_(center), strict_(strict) {}

    void add(PhasePoint p) {
        if (detail::dist(p, center_) <= kCenterEps) {
            if (strict_) throw CenterOnTrack("track sample within 1e-12 of center");
            skipped_ = true;
            return;
        }
        if (last_) radians_ += detail::angle_increment(*last_, p, center_);
        last_ = p;
    }

    double turns() const { return radians_ / (2.0 * std::numbers::pi); }
    bool skipped_center() const { return skipped_; }

private:
    PhasePoint center_;
    bool strict_;
    bool skipped_ = false;
    double radians_ = 0.0;
    std::optional<PhasePoint> last_;
};

/// Real-valued turns swept by an open track about `center`.
inline double cumulative_rotation(const TracerTrack& track, PhasePoint center) {
    RotationAccumulator acc(center);
    for (const auto& s : track.samples) acc.add({s.u, s.v});
    return acc.turns();
}

struct Crossing {
    std::size_t edge_a = 0;  // edge i joins points i and i+1 (mod size)
    std::size_t edge_b = 0;
    double param_a = 0.0;  // position along the loop: edge index + fraction
    double param_b = 0.0;
    PhasePoint point;
};

using CrossingSet = std::vector<Crossing>;

namespace detail {

inline double cross(PhasePoint o, PhasePoint a, PhasePoint b) {
    return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

/// Closest-point parameter of p on segment ab, clamped to [0, 1].
inline double project(PhasePoint p, PhasePoint a, PhasePoint b) {
    const double dx = b.u - a.u, dy = b.v - a.v;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return 0.0;
    return std::clamp(((p.u - a.u) * dx + (p.v - a.v) * dy) / len2, 0.0, 1.0);
}

inline PhasePoint lerp(PhasePoint a, PhasePoint b, double s) {
    return {a.u + s * (b.u - a.u), a.v + s * (b.v - a.v)};
}

/// Intersection of segments ab and cd, counting contact within eps.
/// Returns the parameters along ab and cd.
inline std::optional<std::pair<double, double>> segment_hit(PhasePoint a, PhasePoint b, PhasePoint c, PhasePoint d,
                                                            double eps) {
    const double lab = dist(a, b), lcd = dist(c, d);
    const double d1 = cross(a, b, c) / lab, d2 = cross(a, b, d) / lab;
    const double d3 = cross(c, d, a) / lcd, d4 = cross(c, d, b) / lcd;
    const bool straddle_ab = (d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps);
    const bool straddle_cd = (d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps);
    if (straddle_ab && straddle_cd) {
        const double s = d3 / (d3 - d4);
        const double r = d1 / (d1 - d2);
        return std::make_pair(s, r);
    }
    // Contact: an endpoint of one segment lies within eps of the other.
    struct Candidate {
        double gap, s, r;
    };
    std::optional<Candidate> best;
    auto consider = [&](double gap, double s, double r) {
        if (gap <= eps && (!best || gap < best->gap)) best = Candidate{gap, s, r};
    };
    for (double r : {0.0, 1.0}) {
        const PhasePoint p = r == 0.0 ? c : d;
        const double s = project(p, a, b);
        consider(dist(p, lerp(a, b, s)), s, r);
    }
    for (double s : {0.0, 1.0}) {
        const PhasePoint p = s == 0.0 ? a : b;
        const double r = project(p, c, d);
        consider(dist(p, lerp(c, d, r)), s, r);
    }
    if (best) return std::make_pair(best->s, best->r);
    return std::nullopt;
}

inline bool cyclic_near(std::size_t i, std::size_t j, std::size_t m) {
    const std::size_t d = i > j ? i - j : j - i;
    return d <= 1 || d == m - 1;
}

}  // namespace detail

/// All crossings between non-adjacent loop edges, found by exhaustive pair testing.
///
/// Consecutive duplicate points are merged first. Contact within
/// 1e-12 * (loop diameter) counts as a crossing. Hits at the same point from
/// edge pairs that share a neighbouring edge (the loop passing exactly through
/// a stored vertex, or a multiple point) are reported once.
inline CrossingSet self_intersections(const PhaseLoop& loop) {
    std::vector<PhasePoint> pts;
    for (const auto& p : loop.points) {
        if (!std::isfinite(p.u) || !std::isfinite(p.v)) throw NonFinite("loop point");
        if (pts.empty() || !(p == pts.back())) pts.push_back(p);
    }
    while (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
    if (pts.size() < 2) throw DegenerateLoop("all loop points coincide");

    double diameter = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) diameter = std::max(diameter, detail::dist(pts[i], pts[j]));
    const double eps = 1e-12 * diameter;

    const std::size_t m = pts.size();
    CrossingSet out;
    if (m < 4) return out;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1) continue;
            const auto hit = detail::segment_hit(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m], eps);
            if (!hit) continue;
            Crossing c{i, j, static_cast<double>(i) + hit->first, static_cast<double>(j) + hit->second,
                       detail::lerp(pts[i], pts[(i + 1) % m], hit->first)};
            const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Crossing& o) {
                if (detail::dist(o.point, c.point) > eps) return false;
                for (std::size_t e : {c.edge_a, c.edge_b})
                    if (detail::cyclic_near(e, o.edge_a, m) || detail::cyclic_near(e, o.edge_b, m)) return true;
                return false;
            });
            if (!duplicate) out.push_back(c);
        }
    }
    return out;
}

/// Cuts a loop wherever u changes sign and closes each arc along the line u = 0.
///
/// Every sub-loop lies in a closed half-plane u >= 0 or u <= 0. The closing
/// chords form a degenerate closed path on u = 0, so for any center off that
/// line the sub-loop windings sum to the winding of the whole loop.
inline std::vector<PhaseLoop> split_by_u_sign(const PhaseLoop& loop) {
    const auto& pts = loop.points;
    const std::size_t m = pts.size();
    struct Cut {
        std::size_t edge;
        PhasePoint at;
    };
    std::vector<Cut> cuts;
    for (std::size_t i = 0; i < m; ++i) {
        const PhasePoint a = pts[i], b = pts[(i + 1) % m];
        if ((a.u > 0.0 && b.u <= 0.0) || (a.u <= 0.0 && b.u > 0.0)) {
            const double s = a.u / (a.u - b.u);
            cuts.push_back({i, {0.0, a.v + s * (b.v - a.v)}});
        }
    }
    if (cuts.empty()) return {loop};
    std::vector<PhaseLoop> out;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const Cut& from = cuts[k];
        const Cut& to = cuts[(k + 1) % cuts.size()];
        PhaseLoop sub{loop.t, {from.at}};
        std::size_t i = (from.edge + 1) % m;
        while (true) {
            sub.points.push_back(pts[i]);
            if (i == to.edge) break;
            i = (i + 1) % m;
        }
        sub.points.push_back(to.at);
        out.push_back(std::move(sub));
    }
    return out;
}

enum class ModeKind { ordinary, breather, indeterminate };

inline std::string_view to_string(ModeKind k) {
    switch (k) {
        case ModeKind::ordinary: return "ordinary";
        case ModeKind::breather: return "breather";
        default: return "indeterminate";
    }
}

struct ModeEvidence {
    double t_skip = 0.0;
    double m_left = 0.0;   // min of u_min_left over rows with t >= t_skip
    double m_right = 0.0;  // max of u_max_right over the same rows
    double rot_vacuum = 0.0;  // first tracer about (+sqrt(mu/beta), 0)
    double rot_origin = 0.0;  // first tracer about (0, 0)
    std::string note;
};

struct ModeLabel {
    ModeKind kind = ModeKind::indeterminate;
    ModeEvidence evidence;
};

inline double default_t_skip(const SimParams& p) { return p.t_end / 8.0; }

/// Breather: both half-domains keep their sign after t_skip and the first tracer
/// turns at least once about the positive vacuum. Ordinary: the first tracer
/// turns at least once about the origin and sign confinement fails.
inline ModeLabel classify_mode(std::span<const TracerTrack> tracks, std::span<const DiagnosticsRow> diagnostics,
                               const SimParams& params) {
    if (diagnostics.empty()) throw InsufficientData("no diagnostics rows");
    if (tracks.empty() || tracks.front().samples.empty()) throw InsufficientData("no tracer samples");
    const double covered = diagnostics.back().t;
    if (covered < 4.0 * params.snapshot_every)
        throw InsufficientData("run covers t <= " + std::to_string(covered) + ", need at least 4 snapshot intervals");

    ModeLabel label;
    auto& ev = label.evidence;
    ev.t_skip = default_t_skip(params);
    ev.m_left = INFINITY;
    ev.m_right = -INFINITY;
    bool kept = false;
    for (const auto& row : diagnostics) {
        if (row.t < ev.t_skip) continue;
        kept = true;
        ev.m_left = std::min(ev.m_left, row.u_min_left);
        ev.m_right = std::max(ev.m_right, row.u_max_right);
    }
    if (!kept) throw InsufficientData("no diagnostics rows at or after t_skip");

    const auto fp = fixed_points(params);
    auto rotation = [&](PhasePoint center, const char* name) {
        try {
            return cumulative_rotation(tracks.front(), center);
        } catch (const CenterOnTrack&) {
            ev.note += std::string(ev.note.empty() ? "" : "; ") + "tracer hits " + name + ", rotation taken as 0";
            return 0.0;
        }
    };
    ev.rot_vacuum = rotation(fp.plus, "vacuum");
    ev.rot_origin = rotation(fp.origin, "origin");

    const bool confined = ev.m_left > 0.0 && ev.m_right < 0.0;
    if (confined && std::abs(ev.rot_vacuum) >= 1.0)
        label.kind = ModeKind::breather;
    else if (!confined && std::abs(ev.rot_origin) >= 1.0)
        label.kind = ModeKind::ordinary;
    return label;
}

}  // namespace kgphase
