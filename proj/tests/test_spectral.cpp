#include <gtest/gtest.h>

#include "support.hpp"

using namespace kgtest;

TEST(Dft, Constant) {
    const Grid g = make_grid(16, 8.0);
    const auto c = dft_forward(std::vector<double>(16, 1.0), g);
    EXPECT_NEAR(c.at(0).real(), 1.0, 1e-15);
    for (long m = 1; m < 16; ++m) EXPECT_LT(std::abs(c.at(m)), 1e-15);
}

TEST(Dft, SineHasPureImaginaryPair) {
    const Grid g = make_grid(32, 8.0);
    const auto c = dft_forward(sample(g, [](double x) { return std::sin(2.0 * pi * x / 8.0); }), g);
    EXPECT_NEAR(c.at(1).imag(), -0.5, 1e-15);
    EXPECT_NEAR(c.at(-1).imag(), 0.5, 1e-15);
    EXPECT_LT(std::abs(c.at(1).real()), 1e-15);
    for (long m = 2; m <= 30; ++m) EXPECT_LT(std::abs(c.at(m)), 1e-15) << m;
}

TEST(Dft, InitialProfileMatchesDirectSum) {
    SimParams p;
    const Grid g = make_grid(p);
    const auto u = initial_state(p, g).u;
    const auto c = dft_forward(u, g);
    for (long m = -64; m < 64; ++m) {
        std::complex<double> direct{};
        for (std::size_t j = 0; j < g.n; ++j) direct += u[j] * std::polar(1.0, -2.0 * pi * m * g.nodes[j] / 8.0);
        direct /= 128.0;
        EXPECT_LT(std::abs(c.at(m) - direct), 1e-16);
        if (m == 1 || m == -1)
            EXPECT_NEAR(std::abs(c.at(m)), 0.02, 1e-16);
        else
            EXPECT_LT(std::abs(c.at(m)), 1e-17);
    }
    EXPECT_LT(max_abs_diff(dft_inverse(c, g), u), 1e-14 * 0.04 + 1e-18);
}

TEST(Dft, InverseOfSimpleSpectra) {
    const Grid g = make_grid(16, 8.0);
    Spectrum s{std::vector<std::complex<double>>(16)};
    s.at(0) = 5.0;
    for (double x : dft_inverse(s, g)) EXPECT_NEAR(x, 5.0, 1e-15);
    s.at(0) = 0.0;
    s.at(1) = 0.5;
    s.at(-1) = 0.5;
    const auto u = dft_inverse(s, g);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(u[j], std::cos(2.0 * pi * g.nodes[j] / 8.0), 1e-15);
}

TEST(Dft, RejectsNonHermitian) {
    const Grid g = make_grid(16, 8.0);
    Spectrum s{std::vector<std::complex<double>>(16)};
    s.at(1) = {0.0, 1.0};
    EXPECT_THROW(dft_inverse(s, g), NonHermitianSpectrum);
    s.at(1) = 0.0;
    s.at(0) = {1.0, 1e-3};
    EXPECT_THROW(dft_inverse(s, g), NonHermitianSpectrum);
}

TEST(Dft, LengthChecked) {
    const Grid g = make_grid(16, 8.0);
    const std::vector<double> u(15, 0.0);
    EXPECT_THROW(dft_forward(u, g), LengthMismatch);
    EXPECT_THROW(first_derivative(u, g), LengthMismatch);
    EXPECT_THROW(second_derivative(u, g), LengthMismatch);
    EXPECT_THROW(cube_dealiased(u, g, Dealias::pad2x), LengthMismatch);
}

TEST(Dft, ParsevalAndRoundTripOnRandomInput) {
    std::mt19937_64 rng(20261017);
    std::normal_distribution<double> gauss;
    for (int n : {8, 16, 30, 128, 256}) {
        const Grid g = make_grid(n, 8.0);
        for (int trial = 0; trial < 1000 / 5; ++trial) {
            std::vector<double> u(n);
            for (auto& x : u) x = gauss(rng);
            const auto c = dft_forward(u, g);
            ASSERT_TRUE(is_hermitian(c));
            double lhs = 0.0, rhs = 0.0;
            for (double x : u) lhs += x * x / n;
            for (const auto& z : c.coeffs) rhs += std::norm(z);
            EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
            EXPECT_LE(max_abs_diff(dft_inverse(c, g), u), 1e-13 * std::max(1.0, max_abs(u)));
        }
    }
}

TEST(Derivatives, Eigenfunctions) {
    const Grid g = make_grid(64, 8.0);
    const auto s = sample(g, [](double x) { return std::sin(pi * x / 4.0); });
    const auto d2 = second_derivative(s, g);
    for (std::size_t j = 0; j < g.n; ++j) EXPECT_NEAR(d2[j], -(pi / 4) * (pi / 4) * s[j], 2e-13);
    const auto w = sample(g, [](double x) { return std::sin(2.0 * pi * x / 8.0); });
    const auto d1 = first_derivative(w, g);
    for (std::size_t j = 0; j < g.n; ++j) EXPECT_NEAR(d1[j], (pi / 4) * std::cos(pi * g.nodes[j] / 4), 1e-14);
    for (double x : first_derivative(std::vector<double>(64, 3.0), g)) EXPECT_NEAR(x, 0.0, 1e-15);
    for (double x : second_derivative(std::vector<double>(64, 3.0), g)) EXPECT_NEAR(x, 0.0, 1e-15);
}

TEST(Derivatives, TwoModeSumAgainstFiniteDifferences) {
    auto f = [](double x) { return std::sin(pi * x / 4.0) + std::cos(pi * x / 2.0); };
    const Grid coarse = make_grid(32, 8.0);
    const Grid fine = make_grid(1024, 8.0);
    const auto d1 = first_derivative(sample(coarse, f), coarse);
    const auto d2 = second_derivative(sample(coarse, f), coarse);
    const auto fd1 = fd4_first(sample(fine, f), fine.dx());
    const auto fd2 = fd4_second(sample(fine, f), fine.dx());
    for (std::size_t j = 0; j < coarse.n; ++j) {
        const double x = coarse.nodes[j];
        EXPECT_NEAR(d1[j], (pi / 4) * std::cos(pi * x / 4) - (pi / 2) * std::sin(pi * x / 2), 1e-13);
        EXPECT_NEAR(d2[j], -(pi / 4) * (pi / 4) * std::sin(pi * x / 4) - (pi / 2) * (pi / 2) * std::cos(pi * x / 2),
                    1e-13);
        // the fine-grid stencil has truncation error around 1e-9 here
        EXPECT_NEAR(d1[j], fd1[32 * j], 1e-8);
        EXPECT_NEAR(d2[j], fd2[32 * j], 1e-8);
    }
}

TEST(Derivatives, NyquistConvention) {
    const Grid g = make_grid(16, 8.0);
    std::vector<double> alt(16);
    for (std::size_t j = 0; j < 16; ++j) alt[j] = j % 2 ? -1.0 : 1.0;
    for (double x : first_derivative(alt, g)) EXPECT_NEAR(x, 0.0, 1e-14);
    const double k = pi * 16 / 8.0;
    const auto d2 = second_derivative(alt, g);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(d2[j], -k * k * alt[j], 1e-12);
}

TEST(Derivatives, SecondEqualsFirstTwiceForBandLimited) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    const Grid g = make_grid(64, 8.0);
    for (int trial = 0; trial < 50; ++trial) {
        Spectrum c{std::vector<std::complex<double>>(64)};
        for (long m = 1; m <= 16; ++m) {
            c.at(m) = {gauss(rng), gauss(rng)};
            c.at(-m) = std::conj(c.at(m));
        }
        c.at(0) = gauss(rng);
        const auto u = dft_inverse(c, g);
        const auto a = second_derivative(u, g);
        const auto b = first_derivative(first_derivative(u, g), g);
        EXPECT_LE(max_abs_diff(a, b), 1e-10 * max_abs(a));
    }
}

TEST(Cube, Constant) {
    const Grid g = make_grid(16, 8.0);
    for (Dealias mode : {Dealias::none, Dealias::pad2x})
        for (double x : cube_dealiased(std::vector<double>(16, 2.0), g, mode)) EXPECT_NEAR(x, 8.0, 1e-14);
}

TEST(Cube, SineCubedIdentity) {
    for (int n : {16, 32, 128}) {
        const Grid g = make_grid(n, 8.0);
        const double k = 2.0 * pi / 8.0;
        const auto c = cube_dealiased(sample(g, [&](double x) { return std::sin(k * x); }), g, Dealias::pad2x);
        const auto spec = dft_forward(c, g);
        EXPECT_NEAR(spec.at(1).imag(), -0.375, 1e-15);
        EXPECT_NEAR(spec.at(3).imag(), 0.125, 1e-15);
        for (std::size_t j = 0; j < g.n; ++j)
            EXPECT_NEAR(c[j], 0.75 * std::sin(k * g.nodes[j]) - 0.25 * std::sin(3 * k * g.nodes[j]), 1e-15);
    }
}

TEST(Cube, HighestModeAliasesWithoutPadding) {
    const Grid g = make_grid(16, 8.0);
    const double k = 2.0 * pi * 7 / 8.0;
    const auto u = sample(g, [&](double x) { return std::cos(k * x); });
    const auto plain = cube_dealiased(u, g, Dealias::none);
    const auto padded = cube_dealiased(u, g, Dealias::pad2x);
    EXPECT_GT(max_abs_diff(plain, padded), 0.1);
    // cos^3 = (3 cos kx + cos 3kx)/4; mode 21 is outside the grid, so only 3/4 cos survives
    for (std::size_t j = 0; j < g.n; ++j) EXPECT_NEAR(padded[j], 0.75 * u[j], 1e-14);
}

TEST(Cube, ModesAgreeWhenTopThirdIsEmpty) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    const Grid g = make_grid(96, 8.0);
    for (int trial = 0; trial < 20; ++trial) {
        Spectrum c{std::vector<std::complex<double>>(96)};
        // cube of modes |m| <= 10 reaches |m| <= 30 < 48, so nothing aliases
        for (long m = 1; m <= 10; ++m) {
            c.at(m) = {gauss(rng), gauss(rng)};
            c.at(-m) = std::conj(c.at(m));
        }
        const auto u = dft_inverse(c, g);
        const double scale = std::pow(max_abs(u), 3);
        EXPECT_LE(max_abs_diff(cube_dealiased(u, g, Dealias::none), cube_dealiased(u, g, Dealias::pad2x)),
                  1e-12 * scale);
    }
}

TEST(Cube, ThreadsShareNothingMutable) {
    const Grid g = make_grid(128, 8.0);
    const auto u = sample(g, [](double x) { return 0.04 * std::sin(pi * x / 4.0) + 0.01 * std::cos(3 * x); });
    const auto ref = cube_dealiased(u, g, Dealias::pad2x);
    std::vector<std::thread> pool;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 8; ++t)
        pool.emplace_back([&] {
            for (int i = 0; i < 200; ++i)
                if (cube_dealiased(u, g, Dealias::pad2x) != ref) ++mismatches;
        });
    for (auto& t : pool) t.join();
    EXPECT_EQ(mismatches.load(), 0);
}
