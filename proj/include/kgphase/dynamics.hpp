#pragma once

// Right-hand side of the first-order Klein-Gordon system
//   u_t = v,  v_t = sigma alpha u_xx + mu u - beta u^3
// together with its conserved functionals and the double-well fixed points.

#include <cmath>
#include <span>
#include <vector>

#include "kgphase/core_state.hpp"
#include "kgphase/spectral.hpp"

namespace kgphase {

/// Coefficients of the evolution operator.
///
/// Built from SimParams for production runs. Tests may construct it directly
/// to reach coefficient regimes that validate_params rejects (beta = 0 for the
/// linear oracle, mu < 0 for a massive linear wave).
struct KgCoefficients {
    double alpha = 1.0 / 256.0;
    double beta = 1.0;
    double mu = 0.00305;
    double sigma = 1.0;
    Dealias dealias = Dealias::pad2x;

    static KgCoefficients from(const SimParams& p) {
        return {p.alpha, p.beta, p.mu, kgphase::sigma(p.laplacian_sign), p.dealias};
    }

    /// Linear growth coefficient of Fourier mode k: v_t = lambda(k) u + nonlinear.
    double linear_coefficient(double k) const { return mu - sigma * alpha * k * k; }
};

struct StateDerivative {
    std::vector<double> du;
    std::vector<double> dv;
};

namespace detail {

inline void require_finite(std::span<const double> xs, const char* what) {
    for (double x : xs)
        if (!std::isfinite(x)) throw NonFinite(std::string(what) + " contains a non-finite entry");
}

}  // namespace detail

inline StateDerivative rhs(const FieldState& state, const KgCoefficients& c, const Grid& grid) {
    require_consistent(state, grid);
    StateDerivative d{state.v, second_derivative(state.u, grid)};
    const auto cubic = cube_dealiased(state.u, grid, c.dealias);
    for (std::size_t j = 0; j < grid.n; ++j)
        d.dv[j] = c.sigma * c.alpha * d.dv[j] + c.mu * state.u[j] - c.beta * cubic[j];
    detail::require_finite(d.dv, "rhs");
    detail::require_finite(d.du, "rhs");
    return d;
}

inline StateDerivative rhs(const FieldState& state, const SimParams& p, const Grid& grid) {
    return rhs(state, KgCoefficients::from(p), grid);
}

/// E = dx sum_j [v^2/2 + sigma alpha u_x^2/2 - mu u^2/2 + beta u^4/4].
inline double energy(const FieldState& state, const KgCoefficients& c, const Grid& grid) {
    require_consistent(state, grid);
    const auto ux = first_derivative(state.u, grid);
    double sum = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double u = state.u[j];
        const double u2 = u * u;
        sum += 0.5 * state.v[j] * state.v[j] + 0.5 * c.sigma * c.alpha * ux[j] * ux[j] - 0.5 * c.mu * u2 +
               0.25 * c.beta * u2 * u2;
    }
    return grid.dx() * sum;
}

inline double energy(const FieldState& state, const SimParams& p, const Grid& grid) {
    return energy(state, KgCoefficients::from(p), grid);
}

/// P = dx sum_j v_j (u_x)_j.
inline double momentum(const FieldState& state, const Grid& grid) {
    require_consistent(state, grid);
    const auto ux = first_derivative(state.u, grid);
    double sum = 0.0;
    for (std::size_t j = 0; j < grid.n; ++j) sum += state.v[j] * ux[j];
    return grid.dx() * sum;
}

inline double momentum(const FieldState& state, const SimParams&, const Grid& grid) { return momentum(state, grid); }

struct FixedPointSet {
    PhasePoint origin;
    PhasePoint plus;
    PhasePoint minus;
};

/// Equilibria (0, 0) and (+-sqrt(mu / beta), 0) of the double-well force.
inline FixedPointSet fixed_points(double mu, double beta) {
    if (!(mu > 0.0) || !(beta > 0.0)) throw InvalidParams("fixed points need mu > 0 and beta > 0");
    const double vacuum = std::sqrt(mu / beta);
    return {{0.0, 0.0}, {vacuum, 0.0}, {-vacuum, 0.0}};
}

inline FixedPointSet fixed_points(const SimParams& p) { return fixed_points(p.mu, p.beta); }

}  // namespace kgphase
