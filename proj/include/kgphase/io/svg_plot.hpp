#pragma once

// Deterministic SVG renderings of run snapshots: waveform panels u(t, x) with
// the previous snapshot dotted, and phase-plane panels with the (u, v) loop,
// the three fixed points and tracer trails. Identical inputs produce
// byte-identical output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "kgphase/dynamics.hpp"
#include "kgphase/io/config.hpp"
#include "kgphase/phase_geometry.hpp"

namespace kgphase::io {

namespace svg {

inline constexpr double kWidth = 640.0;
inline constexpr double kHeight = 420.0;
inline constexpr double kLeft = 72.0;
inline constexpr double kRight = 24.0;
inline constexpr double kTop = 36.0;
inline constexpr double kBottom = 52.0;

inline std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-300 ? 0.0 : v);
    return buf;
}

struct Range {
    double lo, hi;
};

/// Expands a possibly empty range and pads it by `pad` of its width on both sides.
inline Range padded(double lo, double hi, double pad, double fallback_half_width) {
    if (!(hi > lo)) {
        const double mid = std::isfinite(lo) ? lo : 0.0;
        const double half = fallback_half_width > 0.0 ? fallback_half_width : 1.0;
        return {mid - half, mid + half};
    }
    const double w = hi - lo;
    return {lo - pad * w, hi + pad * w};
}

inline std::vector<double> ticks(Range r) {
    const double raw = (r.hi - r.lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
        step = f * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double k = std::ceil(r.lo / step); k * step <= r.hi + 1e-9 * step; k += 1.0) out.push_back(k * step);
    return out;
}

class Canvas {
public:
    Canvas(Range x, Range y, std::string title) : x_(x), y_(y) {
        body_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
                 "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) + "\">\n";
        body_ += "<rect x=\"0\" y=\"0\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
                 "\" fill=\"white\"/>\n";
        body_ += "<text class=\"title\" x=\"" + px(kWidth / 2) + "\" y=\"" + px(kTop - 12) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
    }

    double map_x(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
    double map_y(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

    void axes(const std::string& x_name, const std::string& y_name) {
        const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
        body_ += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
        body_ += "<rect x=\"" + px(x0) + "\" y=\"" + px(y0) + "\" width=\"" + px(x1 - x0) + "\" height=\"" +
                 px(y1 - y0) + "\"/>\n";
        std::string labels;
        for (double t : ticks(x_)) {
            const double sx = map_x(t);
            body_ += "<line x1=\"" + px(sx) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(sx) + "\" y2=\"" + px(y1 + 5) +
                     "\"/>\n";
            labels += "<text x=\"" + px(sx) + "\" y=\"" + px(y1 + 18) + "\" text-anchor=\"middle\">" + label(t) +
                      "</text>\n";
        }
        for (double t : ticks(y_)) {
            const double sy = map_y(t);
            body_ += "<line x1=\"" + px(x0 - 5) + "\" y1=\"" + px(sy) + "\" x2=\"" + px(x0) + "\" y2=\"" + px(sy) +
                     "\"/>\n";
            labels += "<text x=\"" + px(x0 - 8) + "\" y=\"" + px(sy + 4) + "\" text-anchor=\"end\">" + label(t) +
                      "</text>\n";
        }
        body_ += "</g>\n<g class=\"tick-labels\" font-family=\"sans-serif\" font-size=\"11\">\n" + labels;
        body_ += "<text x=\"" + px((x0 + x1) / 2) + "\" y=\"" + px(kHeight - 12) + "\" text-anchor=\"middle\">" +
                 x_name + "</text>\n";
        body_ += "<text x=\"16\" y=\"" + px((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
                 px((y0 + y1) / 2) + ")\">" + y_name + "</text>\n</g>\n";
    }

    void hline(double y, const std::string& cls) {
        body_ += "<line class=\"" + cls + "\" x1=\"" + px(kLeft) + "\" y1=\"" + px(map_y(y)) + "\" x2=\"" +
                 px(kWidth - kRight) + "\" y2=\"" + px(map_y(y)) + "\" stroke=\"#999999\" stroke-width=\"0.8\"/>\n";
    }

    void vline(double x, const std::string& cls) {
        body_ += "<line class=\"" + cls + "\" x1=\"" + px(map_x(x)) + "\" y1=\"" + px(kTop) + "\" x2=\"" +
                 px(map_x(x)) + "\" y2=\"" + px(kHeight - kBottom) +
                 "\" stroke=\"#999999\" stroke-width=\"0.8\"/>\n";
    }

    /// Polyline through data points; `attrs` carries styling and data-* annotations.
    void polyline(std::span<const PhasePoint> pts, const std::string& attrs) {
        body_ += "<polyline " + attrs + " fill=\"none\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i)
            body_ += (i ? " " : "") + px(map_x(pts[i].u)) + "," + px(map_y(pts[i].v));
        body_ += "\"/>\n";
    }

    void raw(const std::string& s) { body_ += s; }

    std::string finish() { return body_ + "</svg>\n"; }

private:
    Range x_, y_;
    std::string body_;
};

inline std::string bbox_attrs(std::span<const PhasePoint> pts) {
    double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
    for (const auto& p : pts) {
        umin = std::min(umin, p.u);
        umax = std::max(umax, p.u);
        vmin = std::min(vmin, p.v);
        vmax = std::max(vmax, p.v);
    }
    return "data-umin=\"" + format_double(umin) + "\" data-umax=\"" + format_double(umax) + "\" data-vmin=\"" +
           format_double(vmin) + "\" data-vmax=\"" + format_double(vmax) + "\"";
}

}  // namespace svg

/// u(t, x) as a solid line, the snapshot one cadence earlier dotted, and the u = 0 line.
inline std::string render_waveform(std::span<const double> x, double length, const FieldState& current,
                                   const FieldState* previous) {
    auto curve = [&](const FieldState& s) {
        std::vector<PhasePoint> pts;
        for (std::size_t j = 0; j < x.size(); ++j) pts.push_back({x[j], s.u[j]});
        pts.push_back({length, s.u.front()});  // periodic closure at x = L
        return pts;
    };
    const auto now = curve(current);
    std::vector<PhasePoint> before;
    if (previous) before = curve(*previous);

    double peak = 0.0;
    for (const auto& p : now) peak = std::max(peak, std::abs(p.v));
    for (const auto& p : before) peak = std::max(peak, std::abs(p.v));
    const svg::Range yr = svg::padded(-peak, peak, 0.08, 1.0);
    svg::Canvas c({0.0, length}, yr, "u(t, x) at t = " + svg::label(current.t));
    c.axes("x", "u");
    c.hline(0.0, "zero");
    if (previous)
        c.polyline(before, "class=\"previous\" data-t=\"" + format_double(previous->t) +
                               "\" stroke=\"#1f77b4\" stroke-width=\"1.2\" stroke-dasharray=\"2,3\"");
    c.polyline(now, "class=\"current\" data-t=\"" + format_double(current.t) +
                        "\" stroke=\"#1f77b4\" stroke-width=\"1.6\"");
    return c.finish();
}

/// The (u, v) loop at one instant with fixed points and tracer trails up to that instant.
inline std::string render_phase(const PhaseLoop& loop, const FixedPointSet& fp, std::span<const TracerTrack> tracks) {
    std::vector<PhasePoint> closed = loop.points;
    if (!closed.empty()) closed.push_back(closed.front());

    std::vector<std::vector<PhasePoint>> trails;
    for (const auto& tr : tracks) {
        std::vector<PhasePoint> pts;
        for (const auto& s : tr.samples)
            if (s.t <= loop.t) pts.push_back({s.u, s.v});
        trails.push_back(std::move(pts));
    }

    double umin = std::min(fp.minus.u, fp.plus.u), umax = std::max(fp.minus.u, fp.plus.u);
    double vpeak = 0.0;
    auto include = [&](const PhasePoint& p) {
        umin = std::min(umin, p.u);
        umax = std::max(umax, p.u);
        vpeak = std::max(vpeak, std::abs(p.v));
    };
    for (const auto& p : closed) include(p);
    for (const auto& t : trails)
        for (const auto& p : t) include(p);
    const svg::Range ur = svg::padded(umin, umax, 0.08, 1.0);
    const svg::Range vr = svg::padded(-vpeak, vpeak, 0.08, 0.25 * (ur.hi - ur.lo) / 2.0);

    svg::Canvas c(ur, vr, "(u, v) loop at t = " + svg::label(loop.t));
    c.axes("u", "v = du/dt");
    c.hline(0.0, "v-zero");
    c.vline(0.0, "u-zero");
    static constexpr const char* colors[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    for (std::size_t k = 0; k < trails.size(); ++k) {
        c.raw("<g class=\"trail\" data-probe=\"" + format_double(tracks[k].probe_x) + "\" " +
              (trails[k].empty() ? std::string() : svg::bbox_attrs(trails[k])) + " fill=\"" + colors[k % 4] +
              "\">\n");
        for (const auto& p : trails[k])
            c.raw("<circle cx=\"" + svg::px(c.map_x(p.u)) + "\" cy=\"" + svg::px(c.map_y(p.v)) + "\" r=\"1.6\"/>\n");
        c.raw("</g>\n");
    }
    c.polyline(closed, "class=\"loop\" " + svg::bbox_attrs(closed) + " stroke=\"black\" stroke-width=\"1.4\"");
    for (const auto& [p, name] : {std::pair{fp.minus, "minus"}, std::pair{fp.origin, "origin"},
                                  std::pair{fp.plus, "plus"}}) {
        c.raw("<circle class=\"fixed-point\" data-name=\"" + std::string(name) + "\" data-u=\"" + format_double(p.u) +
              "\" cx=\"" + svg::px(c.map_x(p.u)) + "\" cy=\"" + svg::px(c.map_y(p.v)) +
              "\" r=\"4\" fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\"/>\n");
    }
    return c.finish();
}

}  // namespace kgphase::io
