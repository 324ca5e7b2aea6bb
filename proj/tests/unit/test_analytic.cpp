#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chargefcs/analytic.hpp"

using namespace chargefcs;
using namespace chargefcs::analytic;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
}

TEST(Omega, Examples) {
    EXPECT_EQ(omega(0.0, 0.3, 0.8), cplx(0.0, 0.0));
    for (double lam : {-2.0, 0.4, 1.3}) {
        EXPECT_NEAR(std::abs(omega(lam, 1.0, 0.0) - (std::polar(1.0, lam) - 1.0)), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(omega(lam, 0.5, 0.5) - cplx((std::cos(lam) - 1.0) / 2.0, 0.0)), 0.0, 1e-15);
    }
    EXPECT_NEAR(std::abs(omega(std::numbers::pi, 0.5, 0.5) - cplx(-1.0, 0.0)), 0.0, 1e-15);
    EXPECT_THROW(omega(0.1, 1.2, 0.0), ConfigError);
}

TEST(SepF, Values) {
    EXPECT_EQ(sep_F(0.0), cplx(0.0, 0.0));
    // Converged series; the two-term partial sum would be 0.054429.
    EXPECT_NEAR(sep_F(0.1).real(), 0.0545262419734706, 1e-13);
    // F(-1) = -zeta(3/2) / sqrt(pi).
    EXPECT_NEAR(sep_F(-1.0).real(), -2.612375348685488 / kSqrtPi, 1e-10);
    // Li_{3/2}(-1) = -(1 - 2^{-1/2}) zeta(3/2), so F(1) = (1 - 1/sqrt 2) zeta(3/2) / sqrt(pi).
    EXPECT_NEAR(sep_F(1.0).real(), (1.0 - 1.0 / std::sqrt(2.0)) * 2.612375348685488 / kSqrtPi, 1e-10);
    EXPECT_THROW(sep_F(-1.5), ConfigError);
    EXPECT_THROW(sep_F_series(1.2), ConfigError);
}

TEST(SepF, SeriesMatchesLeadingTerms) {
    // Independent partial sum of the defining series.
    const cplx w(0.3, -0.2);
    cplx sum = 0.0, p = 1.0;
    for (int n = 1; n < 200; ++n) {
        p *= w;
        sum += (n % 2 ? 1.0 : -1.0) * p / std::pow(double(n), 1.5);
    }
    EXPECT_NEAR(std::abs(sep_F_series(w) - sum / kSqrtPi), 0.0, 1e-15);
}

TEST(SepF, BranchesAgreeOnOverlapAnnulus) {
    for (double r : {0.5, 0.6, 0.75, 0.9}) {
        for (int k = 0; k < 24; ++k) {
            const cplx w = std::polar(r, 2 * std::numbers::pi * k / 24.0);
            EXPECT_NEAR(std::abs(sep_F_series(w) - sep_F_integral(w)), 0.0, 1e-10) << "w = " << w;
        }
    }
    EXPECT_NEAR(std::abs(sep_F_series(-0.5) - sep_F_integral(-0.5)), 0.0, 1e-10);
}

TEST(SepCgf, SymmetriesAndLimits) {
    EXPECT_EQ(sep_cgf(0.0, 100, 0.7, 0.2), cplx(0.0, 0.0));
    for (auto [rl, rr] : {std::pair{1.0, 0.0}, {0.7, 0.2}, {0.5, 0.5}, {0.1, 0.9}}) {
        for (double lam = -3.0; lam <= 3.0; lam += 0.25) {
            const cplx a = sep_cgf(lam, 50, rl, rr), b = sep_cgf(-lam, 50, rl, rr);
            EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-12);
        }
    }
    for (double lam = -3.1; lam <= 3.1; lam += 0.1) {
        const cplx a = sep_cgf(lam, 40, 0.5, 0.5);
        EXPECT_NEAR(a.imag(), 0.0, 1e-14);
        EXPECT_NEAR(a.real(), sep_cgf(-lam, 40, 0.5, 0.5).real(), 1e-14);
    }
    const double lam = 1e-4;
    const cplx c = sep_cgf(lam, 100, 1.0, 0.0);
    EXPECT_NEAR(c.imag(), 10.0 * lam / kSqrtPi, 1e-7);
}

TEST(SepCumulant, Examples) {
    EXPECT_NEAR(sep_cumulant(1, 100, 1.0, 0.0), std::sqrt(100 / std::numbers::pi), 1e-12);
    EXPECT_NEAR(sep_cumulant(1, 100, 1.0, 0.0), 5.64190, 1e-5);
    EXPECT_NEAR(sep_cumulant(1, 100, 0.4, 0.4), 0.0, 1e-15);
    EXPECT_NEAR(sep_cumulant(2, 100, 0.5, 0.5), 2.82095, 1e-5);
    EXPECT_NEAR(sep_cumulant(2, 100, 0.5, 0.5), std::sqrt(100 / std::numbers::pi) / 2, 1e-12);
    EXPECT_THROW(sep_cumulant(5, 1, 0.5, 0.5), ConfigError);
}

TEST(SepCumulant, HalfFillingKurtosisMatchesPrediction) {
    // The excess kurtosis at half filling is C4 / C2^2 and must reproduce the closed form.
    for (double t : {16.0, 100.0, 900.0}) {
        const double c2 = sep_cumulant(2, t, 0.5, 0.5), c4 = sep_cumulant(4, t, 0.5, 0.5);
        EXPECT_NEAR(c4 / (c2 * c2), kurtosis_prediction(t), 1e-12);
    }
}

TEST(SepCumulant, AgreesWithFiniteDifferences) {
    for (auto [rl, rr] : {std::pair{1.0, 0.0}, {0.5, 0.5}, {0.88, 0.12}, {0.3, 0.6}}) {
        for (int m = 1; m <= 4; ++m) {
            const double exact = sep_cumulant(m, 100, rl, rr);
            const double fd = sep_cumulant_finite_difference(m, 100, rl, rr);
            if (std::abs(exact) < 1e-12) {
                EXPECT_NEAR(fd, 0.0, 1e-8);
            } else {
                EXPECT_NEAR(fd / exact, 1.0, 1e-6) << "m=" << m << " rho=" << rl << "," << rr;
            }
        }
    }
}

TEST(KurtosisPrediction, Values) {
    EXPECT_NEAR(kurtosis_prediction(100), (4 - 3 * std::sqrt(2.0)) * kSqrtPi / 20, 1e-16);
    EXPECT_NEAR(kurtosis_prediction(100), -0.021504, 1e-6);
    EXPECT_NEAR(kurtosis_prediction(400), -0.010752, 1e-6);
    EXPECT_NEAR(kurtosis_prediction(400) / kurtosis_prediction(100), 0.5, 1e-15);
    EXPECT_LT(kurtosis_prediction(1e12), 0.0);
    EXPECT_GT(kurtosis_prediction(1e12), -1e-6);
}

TEST(SpinWave, Dc2) {
    EXPECT_EQ(spinwave_dc2(ChemicalPotential(0.0), 100, 2), 0.0);
    // a(2) = 1/63.
    EXPECT_NEAR(spinwave_dc2(ChemicalPotential::infinity(), 100, 2), 5.59712e-5, 1e-10);
    EXPECT_NEAR(spinwave_dc2(ChemicalPotential::infinity(), 100, 2),
                (1.0 / 63) / (16 * std::sqrt(100 * std::numbers::pi)), 1e-18);
    EXPECT_NEAR(spinwave_dc2(ChemicalPotential(2.0), 100, 2),
                std::pow(std::tanh(1.0), 2) * spinwave_dc2(ChemicalPotential::infinity(), 100, 2), 1e-18);
    EXPECT_NEAR(spinwave_dc2(ChemicalPotential(1.0), 400, 2) / spinwave_dc2(ChemicalPotential(1.0), 100, 2), 0.5,
                1e-15);
}

TEST(SpinWave, Dc3) {
    EXPECT_EQ(spinwave_dc3(0.0, 100, 2), 0.0);
    EXPECT_NEAR(spinwave_dc3(0.1, 100, 2), 4.19784e-6, 1e-10);
    EXPECT_NEAR(spinwave_dc3(0.1, 100, 2), 3 * (1.0 / 63) * 0.1 / (64 * std::sqrt(100 * std::numbers::pi)), 1e-18);
    EXPECT_EQ(spinwave_dc3(-0.1, 100, 2), -spinwave_dc3(0.1, 100, 2));
}

TEST(Grid, Default) {
    const auto g = default_lambda_grid();
    ASSERT_EQ(g.size(), 101u);
    EXPECT_EQ(g.front(), -3.0);
    EXPECT_EQ(g.back(), 3.0);
    EXPECT_NEAR(g[50], 0.0, 1e-15);
}
