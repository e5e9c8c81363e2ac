#pragma once

// Gauss-Legendre implicit Runge-Kutta stepping of the pseudospectral system.
//
// Stage equations G_i = X + dt sum_j a_ij F(G_j) are solved by a linearly
// implicit fixed-point iteration: the linear part of F is diagonal in Fourier
// space, so each sweep solves one small real 2s x 2s system per mode exactly
// while the cubic term is lagged from the previous sweep.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "kgphase/core_state.hpp"
#include "kgphase/dynamics.hpp"
#include "kgphase/phase_geometry.hpp"
#include "kgphase/spectral.hpp"

namespace kgphase {

struct ButcherTableau {
    int stages = 0;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> c;
};

namespace detail {

/// Coefficients (lowest degree first) of the Lagrange basis polynomial for node j.
inline std::vector<double> lagrange_basis(const std::vector<double>& nodes, std::size_t j) {
    std::vector<double> poly{1.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (k == j) continue;
        const double scale = 1.0 / (nodes[j] - nodes[k]);
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t d = 0; d < poly.size(); ++d) {
            next[d + 1] += poly[d] * scale;
            next[d] -= poly[d] * nodes[k] * scale;
        }
        poly = std::move(next);
    }
    return poly;
}

inline double integrate_poly(const std::vector<double>& poly, double upper) {
    double sum = 0.0;
    double power = upper;
    for (std::size_t d = 0; d < poly.size(); ++d) {
        sum += poly[d] * power / static_cast<double>(d + 1);
        power *= upper;
    }
    return sum;
}

}  // namespace detail

/// Collocation tableau at the Gauss-Legendre points of (0, 1); order 2s.
inline ButcherTableau gauss_tableau(int s) {
    std::vector<double> nodes;
    switch (s) {
        case 1: nodes = {0.5}; break;
        case 2: nodes = {0.5 - std::sqrt(3.0) / 6.0, 0.5 + std::sqrt(3.0) / 6.0}; break;
        case 3: nodes = {0.5 - std::sqrt(15.0) / 10.0, 0.5, 0.5 + std::sqrt(15.0) / 10.0}; break;
        default: throw Unsupported("Gauss tableau with " + std::to_string(s) + " stages");
    }
    ButcherTableau t;
    t.stages = s;
    t.c = nodes;
    t.a.assign(s, std::vector<double>(s));
    t.b.resize(s);
    for (int j = 0; j < s; ++j) {
        const auto basis = detail::lagrange_basis(nodes, static_cast<std::size_t>(j));
        t.b[j] = detail::integrate_poly(basis, 1.0);
        for (int i = 0; i < s; ++i) t.a[i][j] = detail::integrate_poly(basis, nodes[i]);
    }
    return t;
}

struct StepReport {
    int newton_iters = 0;  // linear sweeps used by the stage solve
    double residual = 0.0;  // max-norm stage residual after the last sweep
    bool accepted = false;
};

struct StageControl {
    double tol = 1e-13;
    int max_iter = 100;
};

/// Stage solver with per-mode factorizations for one (dt, tableau, grid, coefficients).
class IrkStepper {
public:
    IrkStepper(KgCoefficients coeffs, Grid grid, ButcherTableau tableau, double dt, StageControl control = {})
        : coeffs_(coeffs), grid_(std::move(grid)), tableau_(std::move(tableau)), dt_(dt), control_(control) {
        if (!(dt > 0.0)) throw InvalidParams("dt must be > 0");
        factorize();
    }

    static IrkStepper from(const SimParams& p) {
        return IrkStepper(KgCoefficients::from(p), make_grid(p), gauss_tableau(p.irk_stages), p.dt,
                          {p.stage_tol, p.stage_max_iter});
    }

    const Grid& grid() const { return grid_; }
    const KgCoefficients& coefficients() const { return coeffs_; }
    double dt() const { return dt_; }

    std::pair<FieldState, StepReport> step(const FieldState& x) const {
        require_consistent(x, grid_);
        if (!x.finite()) throw NonFinite("input state at t = " + std::to_string(x.t));
        const std::size_t n = grid_.n;
        const int s = tableau_.stages;
        const auto xu_hat = detail::analyze(x.u);
        const auto xv_hat = detail::analyze(x.v);

        std::vector<std::vector<double>> gu(s, x.u), gv(s, x.v);
        std::vector<std::vector<cplx>> gu_hat(s, xu_hat);
        std::vector<std::vector<cplx>> force_hat(s);  // coefficients of -beta u^3 per stage
        std::vector<std::vector<double>> fv(s);  // v-component of F per stage
        for (int i = 0; i < s; ++i) evaluate(gu[i], gu_hat[i], fv[i], force_hat[i]);

        StepReport report;
        double previous = std::numeric_limits<double>::infinity();
        int stalled = 0;
        std::vector<cplx> rhs(2 * s), sol(2 * s);
        while (true) {
            std::vector<std::vector<cplx>> gv_hat(s, std::vector<cplx>(n));
            for (std::size_t m = 0; m < n; ++m) {
                for (int i = 0; i < s; ++i) {
                    cplx lagged{};
                    for (int j = 0; j < s; ++j) lagged += tableau_.a[i][j] * force_hat[j][m];
                    rhs[i] = xu_hat[m];
                    rhs[s + i] = xv_hat[m] + dt_ * lagged;
                }
                solve_mode(m, rhs, sol);
                for (int i = 0; i < s; ++i) {
                    gu_hat[i][m] = sol[i];
                    gv_hat[i][m] = sol[s + i];
                }
            }
            for (int i = 0; i < s; ++i) {
                gu[i] = detail::synthesize(gu_hat[i]);
                gv[i] = detail::synthesize(gv_hat[i]);
                evaluate(gu[i], gu_hat[i], fv[i], force_hat[i]);
            }
            ++report.newton_iters;

            double residual = 0.0;
            for (int i = 0; i < s; ++i) {
                for (std::size_t k = 0; k < n; ++k) {
                    double ru = gu[i][k] - x.u[k], rv = gv[i][k] - x.v[k];
                    for (int j = 0; j < s; ++j) {
                        ru -= dt_ * tableau_.a[i][j] * gv[j][k];
                        rv -= dt_ * tableau_.a[i][j] * fv[j][k];
                    }
                    residual = std::max({residual, std::abs(ru), std::abs(rv)});
                }
            }
            if (!std::isfinite(residual)) throw NonFinite("stage values at t = " + std::to_string(x.t));
            report.residual = residual;
            if (residual <= control_.tol) break;
            if (report.newton_iters >= control_.max_iter)
                throw StageSolveDiverged("iteration cap " + std::to_string(control_.max_iter) + " hit at t = " +
                                         std::to_string(x.t) + ", residual " + std::to_string(residual));
            stalled = residual >= previous ? stalled + 1 : 0;
            if (stalled >= 5)
                throw StageSolveDiverged("residual non-decreasing for 5 sweeps at t = " + std::to_string(x.t));
            previous = residual;
        }
        report.accepted = true;

        FieldState next{x.t + dt_, x.u, x.v};
        for (std::size_t k = 0; k < n; ++k) {
            double du = 0.0, dv = 0.0;
            for (int i = 0; i < s; ++i) {
                du += tableau_.b[i] * gv[i][k];
                dv += tableau_.b[i] * fv[i][k];
            }
            next.u[k] += dt_ * du;
            next.v[k] += dt_ * dv;
        }
        if (!next.finite()) throw NonFinite("state after step from t = " + std::to_string(x.t));
        return {std::move(next), report};
    }

private:
    // v-component of F from physical and spectral u; also returns the
    // coefficients of the cubic force -beta u^3 for the next sweep.
    void evaluate(const std::vector<double>& u, const std::vector<cplx>& u_hat, std::vector<double>& fv,
                  std::vector<cplx>& force_hat) const {
        const std::size_t n = grid_.n;
        std::vector<cplx> cubic_hat;
        if (coeffs_.dealias == Dealias::pad2x) {
            cubic_hat = detail::cube_pad2x_coeffs(u_hat);
        } else {
            std::vector<double> cubed(u);
            for (auto& x : cubed) x = x * x * x;
            cubic_hat = detail::analyze(cubed);
        }
        force_hat.resize(n);
        std::vector<cplx> lap_hat(n);
        for (std::size_t m = 0; m < n; ++m) {
            force_hat[m] = -coeffs_.beta * cubic_hat[m];
            lap_hat[m] = -grid_.wavenumbers[m] * grid_.wavenumbers[m] * u_hat[m];
        }
        const auto lap = detail::synthesize(lap_hat);
        const auto cubic = coeffs_.dealias == Dealias::pad2x ? detail::synthesize(cubic_hat) : std::vector<double>{};
        fv.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double c3 = coeffs_.dealias == Dealias::pad2x ? cubic[k] : u[k] * u[k] * u[k];
            fv[k] = coeffs_.sigma * coeffs_.alpha * lap[k] + coeffs_.mu * u[k] - coeffs_.beta * c3;
        }
    }

    // LU factorization with partial pivoting of I - dt [[0, A], [lambda A, 0]] per mode.
    void factorize() {
        const int s = tableau_.stages;
        const int dim = 2 * s;
        lu_.assign(grid_.n, std::vector<double>(dim * dim));
        pivots_.assign(grid_.n, std::vector<int>(dim));
        for (std::size_t m = 0; m < grid_.n; ++m) {
            const double lambda = coeffs_.linear_coefficient(grid_.wavenumbers[m]);
            auto& mat = lu_[m];
            for (int i = 0; i < dim; ++i) mat[i * dim + i] = 1.0;
            for (int i = 0; i < s; ++i) {
                for (int j = 0; j < s; ++j) {
                    mat[i * dim + (s + j)] -= dt_ * tableau_.a[i][j];
                    mat[(s + i) * dim + j] -= dt_ * lambda * tableau_.a[i][j];
                }
            }
            for (int col = 0; col < dim; ++col) {
                int pivot = col;
                for (int r = col + 1; r < dim; ++r)
                    if (std::abs(mat[r * dim + col]) > std::abs(mat[pivot * dim + col])) pivot = r;
                if (mat[pivot * dim + col] == 0.0) throw InvalidParams("singular stage matrix");
                pivots_[m][col] = pivot;
                if (pivot != col)
                    for (int k = 0; k < dim; ++k) std::swap(mat[col * dim + k], mat[pivot * dim + k]);
                for (int r = col + 1; r < dim; ++r) {
                    const double f = mat[r * dim + col] / mat[col * dim + col];
                    mat[r * dim + col] = f;
                    for (int k = col + 1; k < dim; ++k) mat[r * dim + k] -= f * mat[col * dim + k];
                }
            }
        }
    }

    void solve_mode(std::size_t m, const std::vector<cplx>& rhs, std::vector<cplx>& out) const {
        const int dim = 2 * tableau_.stages;
        const auto& mat = lu_[m];
        out = rhs;
        for (int col = 0; col < dim; ++col) std::swap(out[col], out[pivots_[m][col]]);
        for (int r = 1; r < dim; ++r)
            for (int k = 0; k < r; ++k) out[r] -= mat[r * dim + k] * out[k];
        for (int r = dim - 1; r >= 0; --r) {
            for (int k = r + 1; k < dim; ++k) out[r] -= mat[r * dim + k] * out[k];
            out[r] /= mat[r * dim + r];
        }
    }

    KgCoefficients coeffs_;
    Grid grid_;
    ButcherTableau tableau_;
    double dt_;
    StageControl control_;
    std::vector<std::vector<double>> lu_;
    std::vector<std::vector<int>> pivots_;
};

inline std::pair<FieldState, StepReport> irk_step(const FieldState& state, double dt, const ButcherTableau& tableau,
                                                  const SimParams& params, const Grid& grid) {
    return IrkStepper(KgCoefficients::from(params), grid, tableau, dt, {params.stage_tol, params.stage_max_iter})
        .step(state);
}

/// Consumers of run output; any member may be left empty.
struct RunSinks {
    std::function<void(const FieldState&)> snapshot;
    std::function<void(const DiagnosticsRow&)> diagnostics;
    std::function<void(std::size_t probe, const TracerSample&)> tracer;
};

struct RunSummary {
    FieldState final_state;
    double energy0 = 0.0;
    double max_abs_drift = 0.0;
    double max_residual = 0.0;
    long total_sweeps = 0;
    long steps = 0;
};

/// Raised when a run stops early; `partial` describes the steps that completed.
class IntegrationAborted : public Error {
public:
    IntegrationAborted(double t_fail, RunSummary partial, const std::string& cause)
        : Error("IntegrationAborted: at t = " + std::to_string(t_fail) + ": " + cause),
          t_fail(t_fail),
          partial(std::move(partial)) {}

    double t_fail;
    RunSummary partial;
};

namespace detail {

// Rotation bookkeeping for the diagnostics columns. Samples that land on a
// center are skipped rather than aborting the run.
class TracerRotations {
public:
    TracerRotations(const FixedPointSet& fp, const std::vector<std::size_t>& nodes, const FieldState& start) {
        for (std::size_t p = 0; p < std::min<std::size_t>(nodes.size(), 2); ++p)
            vacuum_.emplace_back(start.u[nodes[p]] >= 0.0 ? fp.plus : fp.minus, false);
        if (!nodes.empty()) origin_.emplace(fp.origin, false);
    }

    void add(const FieldState& s, const std::vector<std::size_t>& nodes) {
        for (std::size_t p = 0; p < vacuum_.size(); ++p) vacuum_[p].add({s.u[nodes[p]], s.v[nodes[p]]});
        if (origin_) origin_->add({s.u[nodes[0]], s.v[nodes[0]]});
    }

    double left() const { return vacuum_.empty() ? 0.0 : vacuum_[0].turns(); }
    double right() const { return vacuum_.size() < 2 ? 0.0 : vacuum_[1].turns(); }
    double origin() const { return origin_ ? origin_->turns() : 0.0; }

private:
    std::vector<RotationAccumulator> vacuum_;
    std::optional<RotationAccumulator> origin_;
};

}  // namespace detail

/// Advances `start` for `duration` time units with fixed dt, emitting a snapshot,
/// tracer samples and a diagnostics row at every multiple of snapshot_every
/// (counted from start.t).
inline RunSummary run(const SimParams& params, const FieldState& start, double duration, const RunSinks& sinks = {}) {
    if (auto v = validate_params(params); !v.empty())
        throw InvalidParams(v.front().field + ": " + v.front().rule);
    const IrkStepper stepper = IrkStepper::from(params);
    const Grid& grid = stepper.grid();
    require_consistent(start, grid);
    const long stride = snapshot_stride(params);
    const long total = static_cast<long>(std::floor(duration / params.dt + 1e-9));

    std::vector<std::size_t> nodes;
    for (double x : params.probes) nodes.push_back(*probe_node(x, params.grid_points, params.domain_length));
    detail::TracerRotations rotations(fixed_points(params), nodes, start);

    RunSummary summary;
    summary.energy0 = energy(start, params, grid);
    FieldState state = start;

    auto emit = [&] {
        const double e = energy(state, params, grid);
        const double drift = energy_drift(e, summary.energy0);
        summary.max_abs_drift = std::max(summary.max_abs_drift, std::abs(drift));
        rotations.add(state, nodes);
        if (sinks.snapshot) sinks.snapshot(state);
        if (sinks.tracer)
            for (std::size_t p = 0; p < nodes.size(); ++p)
                sinks.tracer(p, {state.t, state.u[nodes[p]], state.v[nodes[p]]});
        if (sinks.diagnostics) {
            const auto ext = half_domain_extrema(state, grid);
            sinks.diagnostics({state.t, e, momentum(state, grid), drift, ext.min_left, ext.max_left, ext.min_right,
                               ext.max_right, rotations.origin(), rotations.left(), rotations.right()});
        }
    };

    emit();
    for (long n = 1; n <= total; ++n) {
        try {
            auto [next, report] = stepper.step(state);
            summary.max_residual = std::max(summary.max_residual, report.residual);
            summary.total_sweeps += report.newton_iters;
            state = std::move(next);
        } catch (const Error& e) {
            summary.final_state = state;
            throw IntegrationAborted(state.t, std::move(summary), e.what());
        }
        state.t = start.t + static_cast<double>(n) * params.dt;
        summary.steps = n;
        if (n % stride == 0) emit();
    }
    summary.final_state = std::move(state);
    return summary;
}

/// Runs the configured problem from its initial data over [0, t_end].
inline RunSummary integrate(const SimParams& params, const RunSinks& sinks = {}) {
    return run(params, initial_state(params, make_grid(params)), params.t_end, sinks);
}

}  // namespace kgphase
