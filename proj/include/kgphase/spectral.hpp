#pragma once

// Fourier pseudospectral operators on the periodic grid.
//
// Normalization: c_m = (1/N) sum_j u_j exp(-i k_m x_j), so that for a
// band-limited field the coefficients equal the continuum Fourier
// coefficients and u_j = sum_m c_m exp(i k_m x_j).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "kgphase/core_state.hpp"

namespace kgphase {

using cplx = std::complex<double>;

namespace detail {

// FFTW plans are cached per (size, direction). Planning is not thread-safe and
// is serialized; executing a plan on fresh arrays is.
class FftPlans {
public:
    static fftw_plan get(std::size_t n, int sign) {
        static FftPlans instance;
        std::lock_guard lock(instance.mutex_);
        auto key = std::make_pair(n, sign);
        auto it = instance.plans_.find(key);
        if (it != instance.plans_.end()) return it->second;
        std::vector<cplx> a(n), b(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                          reinterpret_cast<fftw_complex*>(b.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        instance.plans_.emplace(key, plan);
        return plan;
    }

    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

/// Unnormalized DFT, sign -1 forward and +1 backward, FFT index order.
inline std::vector<cplx> fft(std::span<const cplx> in, int sign) {
    std::vector<cplx> src(in.begin(), in.end());
    std::vector<cplx> out(in.size());
    fftw_execute_dft(FftPlans::get(in.size(), sign), reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

/// Normalized coefficients of real samples.
inline std::vector<cplx> analyze(std::span<const double> samples) {
    std::vector<cplx> in(samples.begin(), samples.end());
    auto out = fft(in, FFTW_FORWARD);
    const double scale = 1.0 / static_cast<double>(samples.size());
    for (auto& c : out) c *= scale;
    return out;
}

/// Real part of the synthesis sum over FFT-ordered coefficients.
inline std::vector<double> synthesize(std::span<const cplx> coeffs) {
    auto out = fft(coeffs, FFTW_BACKWARD);
    std::vector<double> u(out.size());
    std::transform(out.begin(), out.end(), u.begin(), [](cplx c) { return c.real(); });
    return u;
}

/// Spectrum of N modes re-expressed on M > N modes; the Nyquist coefficient is split evenly
/// between +N/2 and -N/2 so that real fields stay real.
inline std::vector<cplx> zero_pad(std::span<const cplx> c, std::size_t m) {
    const std::size_t n = c.size();
    std::vector<cplx> out(m, cplx{});
    for (std::size_t j = 0; j < n / 2; ++j) out[j] = c[j];
    for (std::size_t j = n / 2 + 1; j < n; ++j) out[m - n + j] = c[j];
    out[n / 2] = 0.5 * c[n / 2];
    out[m - n / 2] = 0.5 * c[n / 2];
    return out;
}

/// Inverse of zero_pad: keep modes [-N/2, N/2), folding +N/2 onto the Nyquist slot.
inline std::vector<cplx> truncate(std::span<const cplx> c, std::size_t n) {
    const std::size_t m = c.size();
    std::vector<cplx> out(n);
    for (std::size_t j = 0; j < n / 2; ++j) out[j] = c[j];
    for (std::size_t j = n / 2 + 1; j < n; ++j) out[j] = c[m - n + j];
    out[n / 2] = cplx{(c[n / 2] + c[m - n / 2]).real(), 0.0};
    return out;
}

inline void require_length(std::size_t got, const Grid& g) {
    if (got != g.n)
        throw LengthMismatch("expected " + std::to_string(g.n) + " samples, got " + std::to_string(got));
}

}  // namespace detail

/// N Fourier coefficients stored in FFT index order (see Grid::mode / Grid::index).
struct Spectrum {
    std::vector<cplx> coeffs;

    cplx at(long m) const {
        const auto n = static_cast<long>(coeffs.size());
        return coeffs[static_cast<std::size_t>(((m % n) + n) % n)];
    }
    cplx& at(long m) {
        const auto n = static_cast<long>(coeffs.size());
        return coeffs[static_cast<std::size_t>(((m % n) + n) % n)];
    }
};

inline Spectrum dft_forward(std::span<const double> samples, const Grid& grid) {
    detail::require_length(samples.size(), grid);
    return Spectrum{detail::analyze(samples)};
}

inline constexpr double kHermitianTol = 1e-13;

/// True when c_{-m} = conj(c_m) and the self-conjugate modes are real, to kHermitianTol * max|c|.
inline bool is_hermitian(const Spectrum& s) {
    const std::size_t n = s.coeffs.size();
    double scale = 0.0;
    for (const auto& c : s.coeffs) scale = std::max(scale, std::abs(c));
    const double tol = kHermitianTol * scale;
    if (std::abs(s.coeffs[0].imag()) > tol || std::abs(s.coeffs[n / 2].imag()) > tol) return false;
    for (std::size_t j = 1; j < n / 2; ++j)
        if (std::abs(s.coeffs[n - j] - std::conj(s.coeffs[j])) > tol) return false;
    return true;
}

inline std::vector<double> dft_inverse(const Spectrum& spec, const Grid& grid) {
    detail::require_length(spec.coeffs.size(), grid);
    if (!is_hermitian(spec)) throw NonHermitianSpectrum("coefficients are not conjugate-symmetric");
    return detail::synthesize(spec.coeffs);
}

/// d/dx with the Nyquist mode annihilated.
inline std::vector<double> first_derivative(std::span<const double> samples, const Grid& grid) {
    detail::require_length(samples.size(), grid);
    auto c = detail::analyze(samples);
    for (std::size_t j = 0; j < grid.n; ++j) c[j] *= cplx{0.0, grid.wavenumbers[j]};
    c[grid.n / 2] = 0.0;
    return detail::synthesize(c);
}

/// d^2/dx^2; the Nyquist mode is scaled by -k^2 like every other mode.
inline std::vector<double> second_derivative(std::span<const double> samples, const Grid& grid) {
    detail::require_length(samples.size(), grid);
    auto c = detail::analyze(samples);
    for (std::size_t j = 0; j < grid.n; ++j) c[j] *= -grid.wavenumbers[j] * grid.wavenumbers[j];
    return detail::synthesize(c);
}

namespace detail {

/// Coefficients of u^3, computed on a 2N grid and truncated back to N modes.
inline std::vector<cplx> cube_pad2x_coeffs(std::span<const cplx> c) {
    const std::size_t n = c.size();
    auto fine = synthesize(zero_pad(c, 2 * n));
    for (auto& x : fine) x = x * x * x;
    return truncate(analyze(fine), n);
}

}  // namespace detail

inline std::vector<double> cube_dealiased(std::span<const double> samples, const Grid& grid, Dealias mode) {
    detail::require_length(samples.size(), grid);
    if (mode == Dealias::none) {
        std::vector<double> out(samples.begin(), samples.end());
        for (auto& x : out) x = x * x * x;
        return out;
    }
    return detail::synthesize(detail::cube_pad2x_coeffs(detail::analyze(samples)));
}

}  // namespace kgphase
