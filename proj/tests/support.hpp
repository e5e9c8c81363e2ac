#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the spectral machinery it is meant to check.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kgphase/kgphase.hpp"

namespace kgtest {

using namespace kgphase;
inline constexpr double pi = std::numbers::pi;

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

template <class F>
std::vector<double> sample(const Grid& g, F f) {
    std::vector<double> out(g.n);
    for (std::size_t j = 0; j < g.n; ++j) out[j] = f(g.nodes[j]);
    return out;
}

// Fourth-order centered finite differences on a periodic grid.
inline std::vector<double> fd4_first(const std::vector<double>& u, double h) {
    const std::size_t n = u.size();
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double um2 = u[(j + n - 2) % n], um1 = u[(j + n - 1) % n];
        const double up1 = u[(j + 1) % n], up2 = u[(j + 2) % n];
        d[j] = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * h);
    }
    return d;
}

inline std::vector<double> fd4_second(const std::vector<double>& u, double h) {
    const std::size_t n = u.size();
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double um2 = u[(j + n - 2) % n], um1 = u[(j + n - 1) % n];
        const double up1 = u[(j + 1) % n], up2 = u[(j + 2) % n];
        d[j] = (-um2 + 16.0 * um1 - 30.0 * u[j] + 16.0 * up1 - up2) / (12.0 * h * h);
    }
    return d;
}

// Linear standing wave u = sin(k x) cos(w t) with beta = 0 and mu = alpha k^2 - w^2
// (negative when w^2 > alpha k^2, i.e. a massive wave), so the dispersion relation gives exactly w.
struct StandingWave {
    double k;
    double omega;
    double alpha = 1.0 / 256.0;

    KgCoefficients coefficients() const {
        KgCoefficients c;
        c.alpha = alpha;
        c.beta = 0.0;
        c.mu = alpha * k * k - omega * omega;
        c.sigma = 1.0;
        c.dealias = Dealias::pad2x;
        return c;
    }

    FieldState exact(const Grid& g, double t) const {
        FieldState s;
        s.t = t;
        s.u = sample(g, [&](double x) { return std::sin(k * x) * std::cos(omega * t); });
        s.v = sample(g, [&](double x) { return -omega * std::sin(k * x) * std::sin(omega * t); });
        return s;
    }
};

// Advances with a fixed step and returns the max-norm error in u against the exact wave.
inline double standing_wave_error(const StandingWave& w, const Grid& g, int stages, double dt, double t_end) {
    const IrkStepper stepper(w.coefficients(), g, gauss_tableau(stages), dt, {1e-13, 50});
    FieldState s = w.exact(g, 0.0);
    const long steps = std::lround(t_end / dt);
    for (long n = 0; n < steps; ++n) s = stepper.step(s).first;
    return max_abs_diff(s.u, w.exact(g, t_end).u);
}

// Least-squares slope of log(err) against log(dt).
inline double loglog_slope(const std::vector<double>& dts, const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(dts.size());
    for (std::size_t i = 0; i < dts.size(); ++i) {
        const double x = std::log(dts[i]), y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Parity of crossings of the ray from `c` toward +u, half-open rule on edge endpoints.
inline int ray_parity(const std::vector<PhasePoint>& poly, PhasePoint c) {
    int count = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const PhasePoint a = poly[i], b = poly[(i + 1) % poly.size()];
        if ((a.v > c.v) != (b.v > c.v)) {
            const double u_at = a.u + (c.v - a.v) * (b.u - a.u) / (b.v - a.v);
            if (u_at > c.u) ++count;
        }
    }
    return count % 2;
}

inline std::vector<PhasePoint> random_polygon(std::mt19937_64& rng, int vertices) {
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::vector<PhasePoint> p(vertices);
    for (auto& q : p) q = {coord(rng), coord(rng)};
    return p;
}

// Lemniscate of Gerono (cos t, sin t cos t): one node at the origin, lobes on
// either side of u = 0. Samples are offset by half a step so none sits on the node.
inline PhaseLoop gerono(int m) {
    PhaseLoop loop;
    for (int j = 0; j < m; ++j) {
        const double t = 2.0 * pi * (j + 0.5) / m;
        loop.points.push_back({std::cos(t), std::sin(t) * std::cos(t)});
    }
    return loop;
}

inline PhaseLoop circle(int m, double r = 1.0, PhasePoint c = {}) {
    PhaseLoop loop;
    for (int j = 0; j < m; ++j) {
        const double t = 2.0 * pi * j / m;
        loop.points.push_back({c.u + r * std::cos(t), c.v + r * std::sin(t)});
    }
    return loop;
}

}  // namespace kgtest
