#pragma once

// Configuration, periodic grid and the value types shared across the solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgphase/errors.hpp"

namespace kgphase {

/// Sign convention of the dispersion term.
///
/// `standard_wave` evolves u_tt = +alpha u_xx + mu u - beta u^3 (hyperbolic).
/// `as_written` flips the sign of alpha u_xx, which makes every mode with
/// alpha k^2 > 2 mu linearly unstable; it is kept for fidelity experiments.
enum class LaplacianSign { standard_wave, as_written };

enum class Dealias { none, pad2x };

inline std::string_view to_string(LaplacianSign s) {
    return s == LaplacianSign::standard_wave ? "standard_wave" : "as_written";
}

inline std::string_view to_string(Dealias d) { return d == Dealias::none ? "none" : "pad2x"; }

inline std::optional<LaplacianSign> parse_laplacian_sign(std::string_view s) {
    if (s == "standard_wave") return LaplacianSign::standard_wave;
    if (s == "as_written") return LaplacianSign::as_written;
    return std::nullopt;
}

inline std::optional<Dealias> parse_dealias(std::string_view s) {
    if (s == "none") return Dealias::none;
    if (s == "pad2x") return Dealias::pad2x;
    return std::nullopt;
}

/// +1 for the standard wave operator, -1 for the literal sign.
inline double sigma(LaplacianSign s) { return s == LaplacianSign::standard_wave ? 1.0 : -1.0; }

struct SimParams {
    double alpha = 1.0 / 256.0;
    double beta = 1.0;
    double mu = 0.00305;
    double amplitude = 0.04;
    double domain_length = 8.0;
    int grid_points = 128;
    double dt = 0.125;
    double t_end = 2048.0;
    double snapshot_every = 16.0;
    LaplacianSign laplacian_sign = LaplacianSign::standard_wave;
    Dealias dealias = Dealias::pad2x;
    int irk_stages = 2;
    double stage_tol = 1e-13;
    int stage_max_iter = 100;
    std::vector<double> probes{2.0, 6.0};

    bool operator==(const SimParams&) const = default;
};

struct Violation {
    std::string field;
    std::string rule;
};

inline constexpr double kIntegralTol = 1e-12;

/// Number of time steps between two snapshots, or 0 when snapshot_every is
/// not a positive multiple of dt.
inline long snapshot_stride(const SimParams& p) {
    if (!(p.dt > 0.0) || !(p.snapshot_every > 0.0)) return 0;
    const double ratio = p.snapshot_every / p.dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > kIntegralTol * ratio) return 0;
    return static_cast<long>(rounded);
}

/// Grid index of a probe coordinate, or nullopt if it is off-grid or outside [0, L).
inline std::optional<std::size_t> probe_node(double x, int n, double length) {
    if (!(x >= 0.0) || !(x < length)) return std::nullopt;
    const double pos = x * n / length;
    const double rounded = std::round(pos);
    if (std::abs(pos - rounded) > kIntegralTol) return std::nullopt;
    return static_cast<std::size_t>(rounded) % static_cast<std::size_t>(n);
}

/// Lists every violated invariant; an empty result means the parameters are usable.
inline std::vector<Violation> validate_params(const SimParams& p) {
    std::vector<Violation> out;
    auto positive = [&](const char* name, double value) {
        if (!(value > 0.0) || !std::isfinite(value)) out.push_back({name, "must be a finite value > 0"});
    };
    positive("alpha", p.alpha);
    positive("beta", p.beta);
    positive("mu", p.mu);
    positive("domain_length", p.domain_length);
    positive("dt", p.dt);
    if (!(p.t_end >= 0.0) || !std::isfinite(p.t_end)) out.push_back({"t_end", "must be a finite value >= 0"});
    if (!std::isfinite(p.amplitude)) out.push_back({"amplitude", "must be finite"});
    if (p.grid_points < 8 || p.grid_points % 2 != 0)
        out.push_back({"grid_points", "must be even and >= 8"});
    if (snapshot_stride(p) == 0)
        out.push_back({"snapshot_every", "must be a positive integer multiple of dt"});
    if (p.irk_stages < 1 || p.irk_stages > 3) out.push_back({"irk_stages", "must be 1, 2 or 3"});
    if (!(p.stage_tol > 0.0)) out.push_back({"stage_tol", "must be > 0"});
    if (p.stage_max_iter < 1) out.push_back({"stage_max_iter", "must be >= 1"});
    const bool grid_ok = p.grid_points >= 8 && p.domain_length > 0.0 && std::isfinite(p.domain_length);
    for (double x : p.probes) {
        if (!(x >= 0.0) || !(x < p.domain_length)) {
            out.push_back({"probes", "probe " + std::to_string(x) + " outside [0, L)"});
        } else if (grid_ok && !probe_node(x, p.grid_points, p.domain_length)) {
            out.push_back({"probes", "probe " + std::to_string(x) + " not on grid node"});
        }
    }
    return out;
}

/// Equispaced periodic grid on [0, L) with FFT-ordered wavenumbers:
/// index j holds k = 2 pi m / L with m = j for j < N/2 and m = j - N otherwise.
struct Grid {
    std::size_t n = 0;
    double length = 0.0;
    std::vector<double> nodes;
    std::vector<double> wavenumbers;

    double dx() const { return length / static_cast<double>(n); }

    /// Signed mode number m in [-N/2, N/2) stored at FFT index j.
    long mode(std::size_t j) const {
        const auto jn = static_cast<long>(j);
        return j < n / 2 ? jn : jn - static_cast<long>(n);
    }

    /// FFT index of signed mode m.
    std::size_t index(long m) const {
        const auto nn = static_cast<long>(n);
        return static_cast<std::size_t>(((m % nn) + nn) % nn);
    }
};

inline Grid make_grid(int n, double length) {
    if (n < 8 || n % 2 != 0) throw InvalidGrid("point count must be even and >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidGrid("length must be > 0");
    Grid g;
    g.n = static_cast<std::size_t>(n);
    g.length = length;
    g.nodes.resize(g.n);
    g.wavenumbers.resize(g.n);
    for (std::size_t j = 0; j < g.n; ++j) {
        g.nodes[j] = static_cast<double>(j) * length / static_cast<double>(n);
        g.wavenumbers[j] = 2.0 * std::numbers::pi * static_cast<double>(g.mode(j)) / length;
    }
    return g;
}

inline Grid make_grid(const SimParams& p) { return make_grid(p.grid_points, p.domain_length); }

/// Collocated samples of u and v = du/dt at time t.
struct FieldState {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v;

    bool operator==(const FieldState&) const = default;

    bool finite() const {
        for (double x : u)
            if (!std::isfinite(x)) return false;
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

inline void require_consistent(const FieldState& s, const Grid& g) {
    if (s.u.size() != g.n || s.v.size() != g.n)
        throw LengthMismatch("state has " + std::to_string(s.u.size()) + "/" + std::to_string(s.v.size()) +
                             " samples, grid has " + std::to_string(g.n));
}

/// u(0, x) = A sin(pi x / 4), v(0, x) = 0.
inline FieldState initial_state(const SimParams& p, const Grid& g) {
    const double periods = g.length / 8.0;
    if (!(periods >= 1.0) || std::abs(periods - std::round(periods)) > kIntegralTol * periods)
        throw IncompatibleDomain("domain length must be a positive multiple of 8, got " + std::to_string(g.length));
    FieldState s;
    s.u.resize(g.n);
    s.v.assign(g.n, 0.0);
    for (std::size_t j = 0; j < g.n; ++j) s.u[j] = p.amplitude * std::sin(std::numbers::pi * g.nodes[j] / 4.0);
    return s;
}

/// A point of the (u, v) phase plane.
struct PhasePoint {
    double u = 0.0;
    double v = 0.0;

    bool operator==(const PhasePoint&) const = default;
};

struct DiagnosticsRow {
    double t = 0.0;
    double energy = 0.0;
    double momentum = 0.0;
    double energy_drift = 0.0;
    double u_min_left = 0.0;
    double u_max_left = 0.0;
    double u_min_right = 0.0;
    double u_max_right = 0.0;
    double rot_origin = 0.0;
    double rot_left = 0.0;
    double rot_right = 0.0;

    bool operator==(const DiagnosticsRow&) const = default;
};

inline constexpr double kEnergyScaleFloor = 1e-30;

inline double energy_drift(double energy, double energy0) {
    return (energy - energy0) / std::max(std::abs(energy0), kEnergyScaleFloor);
}

/// Extrema of u over the open half-domains (0, L/2) and (L/2, L).
struct HalfExtrema {
    double min_left, max_left, min_right, max_right;
};

inline HalfExtrema half_domain_extrema(const FieldState& s, const Grid& g) {
    HalfExtrema e{INFINITY, -INFINITY, INFINITY, -INFINITY};
    const double half = g.length / 2.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double x = g.nodes[j];
        if (x > 0.0 && x < half) {
            e.min_left = std::min(e.min_left, s.u[j]);
            e.max_left = std::max(e.max_left, s.u[j]);
        } else if (x > half) {
            e.min_right = std::min(e.min_right, s.u[j]);
            e.max_right = std::max(e.max_right, s.u[j]);
        }
    }
    return e;
}

}  // namespace kgphase
