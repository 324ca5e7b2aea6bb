#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "chargefcs/core.hpp"
#include "chargefcs/rng.hpp"
#include "chargefcs/stats.hpp"

using namespace chargefcs;

TEST(CouplingA, ExamplesAndInverse) {
    EXPECT_NEAR(a_of_d(2.0), 1.0 / 63.0, 1e-17);
    EXPECT_NEAR(a_of_d(1.5), 1.0 / 19.25, 1e-16);
    EXPECT_NEAR(a_of_d(1.0), 1.0 / 3.0, 1e-16);
    EXPECT_EQ(a_of_d(INFINITY), 0.0);
    EXPECT_LT(a_of_d(1e6), 1e-24);
    EXPECT_THROW(a_of_d(0.99), ConfigError);
    for (double a : {0.3, 0.1, 0.05, 1e-4}) EXPECT_NEAR(a_of_d(d_of_a(a)), a, 1e-15);
    EXPECT_TRUE(std::isinf(d_of_a(0.0)));
}

TEST(CouplingA, StrictlyDecreasingAndExactReciprocal) {
    double prev = a_of_d(1.0);
    for (double d = 1.01; d < 20.0; d *= 1.07) {
        const double a = a_of_d(d);
        EXPECT_LT(a, prev);
        EXPECT_NEAR(a * (4.0 * std::pow(d, 4) - 1.0), 1.0, 4e-16);
        prev = a;
    }
}

TEST(ChemicalPotential, Density) {
    EXPECT_DOUBLE_EQ(density_from_mu(ChemicalPotential(0.0)), 0.5);
    EXPECT_EQ(density_from_mu(ChemicalPotential::infinity()), 1.0);
    EXPECT_EQ(density_from_mu(ChemicalPotential::negative_infinity()), 0.0);
    EXPECT_NEAR(density_from_mu(ChemicalPotential(2.0)), 0.8807970779778823, 1e-15);
    EXPECT_NEAR(density_from_mu(ChemicalPotential(-2.0)), 0.11920292202211755, 1e-15);
    EXPECT_NEAR(density_from_mu(ChemicalPotential(800.0)), 1.0, 1e-15);
    EXPECT_EQ(ChemicalPotential::infinity().tanh_half(), 1.0);
    EXPECT_EQ(ChemicalPotential::from_double(HUGE_VAL), ChemicalPotential::infinity());
    EXPECT_EQ(ChemicalPotential::from_double(-HUGE_VAL), ChemicalPotential::negative_infinity());
    EXPECT_EQ(ChemicalPotential::infinity().negated(), ChemicalPotential::negative_infinity());
    EXPECT_THROW(ChemicalPotential::from_double(NAN), ConfigError);
}

TEST(ModelParams, Validation) {
    ModelParams p;
    EXPECT_NO_THROW(p.validate());
    p.L = 7;
    EXPECT_THROW(p.validate(), ConfigError);
    p.L = 8;
    p.t = -1;
    EXPECT_THROW(p.validate(), ConfigError);
    p.t = 0;
    p.d = 0.5;
    EXPECT_THROW(p.validate(), ConfigError);
    p.d = INFINITY;
    EXPECT_NO_THROW(p.validate());
    p.n_chains = 4;
    EXPECT_THROW(p.validate(), ConfigError);
    p.n_chains = 3;
    EXPECT_NO_THROW(p.validate());
    EXPECT_EQ(p.central_left_site(), 3);
}

TEST(CounterStream, PureFunctionOfKeyAndCounter) {
    auto a = CounterStream::for_sample(1, EngineId::sep, 5);
    auto b = CounterStream::for_sample(1, EngineId::sep, 5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
    EXPECT_EQ(a.draws(), 100u);
    std::set<std::uint64_t> keys;
    for (std::uint64_t idx = 0; idx < 1000; ++idx) keys.insert(CounterStream::for_sample(1, EngineId::sep, idx).key());
    for (auto e : {EngineId::coupled, EngineId::initial_state}) keys.insert(CounterStream::for_sample(1, e, 0).key());
    keys.insert(CounterStream::for_sample(2, EngineId::sep, 0).key());
    EXPECT_EQ(keys.size(), 1003u);
}

TEST(CounterStream, UniformMoments) {
    auto s = CounterStream::for_sample(99, EngineId::bootstrap, 0);
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sum2 += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 5 * std::sqrt(4.0 / 45 / n));
}

TEST(InitialState, DomainWallIsDeterministic) {
    ModelParams p;
    p.L = 10;
    auto s = CounterStream::for_sample(1, EngineId::initial_state, 0);
    const auto row = sample_initial_state(p, s);
    EXPECT_EQ(row, (std::vector<std::uint8_t>{1, 1, 1, 1, 1, 0, 0, 0, 0, 0}));
    EXPECT_EQ(s.draws(), 0u);
}

TEST(InitialState, EmpiricalDensitiesConverge) {
    for (double mu : {0.0, 2.0}) {
        ModelParams p;
        p.L = 4;
        p.mu = ChemicalPotential(mu);
        const int n = 100000;
        double left = 0, right = 0;
        for (int k = 0; k < n; ++k) {
            auto s = CounterStream::for_sample(7, EngineId::initial_state, std::uint64_t(k));
            const auto row = sample_initial_state(p, s);
            left += row[0] + row[1];
            right += row[2] + row[3];
        }
        left /= 2.0 * n;
        right /= 2.0 * n;
        EXPECT_NEAR(left, p.rho_left(), 4.0 / std::sqrt(n));
        EXPECT_NEAR(right, p.rho_right(), 4.0 / std::sqrt(n));
    }
}

TEST(LadderState, ChargeAndRows) {
    LadderState s(2, 6);
    s.set(0, 1, 1);
    s.set(1, 5, 1);
    s.set(1, 4, 1);
    EXPECT_EQ(s.charge(0), 1);
    EXPECT_EQ(s.charge(1), 2);
    EXPECT_EQ(s.row(1)[4], 1);
}

TEST(HistogramTest, AddMerge) {
    Histogram h;
    h.add(-2);
    h.add(3, 4);
    Histogram g;
    g.add(3);
    h.merge(g);
    EXPECT_EQ(h.n_samples, 6u);
    EXPECT_EQ(h.counts.at(3), 5u);
    EXPECT_EQ(h.min_value(), -2);
    EXPECT_EQ(h.max_value(), 3);
    std::uint64_t total = 0;
    for (auto [q, c] : h.counts) total += c;
    EXPECT_EQ(total, h.n_samples);
}

TEST(Cumulants, PointMass) {
    Histogram h;
    h.add(3, 10);
    const auto c = cumulants_from_histogram(h, 4);
    EXPECT_DOUBLE_EQ(c.order(1).value, 3.0);
    for (int k = 2; k <= 4; ++k) EXPECT_DOUBLE_EQ(c.order(k).value, 0.0);
    for (int k = 1; k <= 4; ++k) EXPECT_EQ(c.order(k).std_error, 0.0);
}

TEST(Cumulants, TwoPointExamples) {
    Histogram h;
    h.add(-1);
    h.add(1);
    const auto c = cumulants_from_histogram(h, 4);
    EXPECT_DOUBLE_EQ(c.order(1).value, 0.0);
    EXPECT_DOUBLE_EQ(c.order(2).value, 1.0);
    EXPECT_DOUBLE_EQ(c.order(3).value, 0.0);
    EXPECT_DOUBLE_EQ(c.order(4).value, -2.0);
    EXPECT_DOUBLE_EQ(c.mu4, 1.0);
    EXPECT_DOUBLE_EQ(c.mu2_squared, 1.0);

    Histogram g;
    g.add(0, 2);
    g.add(1, 2);
    const auto d = cumulants_from_histogram(g, 2);
    EXPECT_DOUBLE_EQ(d.order(1).value, 0.5);
    EXPECT_DOUBLE_EQ(d.order(2).value, 0.25);
}

TEST(Cumulants, Rejections) {
    Histogram h;
    EXPECT_THROW(cumulants_from_histogram(h, 2), ConfigError);
    h.add(1);
    EXPECT_THROW(cumulants_from_histogram(h, 2), ConfigError);
    h.add(2);
    EXPECT_THROW(cumulants_from_histogram(h, 5), ConfigError);
}

TEST(Cumulants, BinomialExcessKurtosisVanishes) {
    // Binomial(n, 1/2) has C4 / C2^2 = -2 / n exactly.
    double prev = -1.0;
    for (int n : {4, 16, 64, 256}) {
        Histogram h;
        double w = std::pow(0.5, n);
        for (int k = 0; k <= n; ++k) {
            h.add(k, std::uint64_t(std::llround(w * 1e12)));
            w *= double(n - k) / (k + 1);
        }
        const auto c = cumulants_from_histogram(h, 4, 10);
        const double ratio = c.order(4).value / (c.order(2).value * c.order(2).value);
        EXPECT_NEAR(ratio, -2.0 / n, 1e-6);
        EXPECT_GT(ratio, prev);
        prev = ratio;
    }
}

TEST(Cumulants, BootstrapErrorMatchesClt) {
    std::vector<std::int32_t> samples;
    auto s = CounterStream::for_sample(3, EngineId::sep, 0);
    for (int i = 0; i < 40000; ++i) samples.push_back(std::int32_t(s() % 7) - 3);
    const auto h = histogram_from_samples(samples);
    const auto c = cumulants_from_histogram(h, 2, 200, 11);
    const double clt = std::sqrt(c.order(2).value / double(samples.size()));
    EXPECT_NEAR(c.order(1).std_error, clt, 0.2 * clt);
    const auto again = cumulants_from_histogram(h, 2, 200, 11);
    EXPECT_EQ(c.order(1).std_error, again.order(1).std_error);
}

TEST(Stats, EmpiricalCgfAndSlope) {
    Histogram h;
    h.add(0);
    h.add(1);
    const auto z = empirical_cgf(h, 0.7);
    EXPECT_NEAR(std::abs(std::exp(z) - (0.5 + 0.5 * std::polar(1.0, 0.7))), 0.0, 1e-15);
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
    EXPECT_NEAR(loglog_slope(x, y), -0.5, 1e-14);
    y[0] = 0.0;
    EXPECT_THROW(loglog_slope(x, y), ConfigError);
}

TEST(Stats, JackknifeRatio) {
    std::vector<double> num{2, 4, 6}, den{1, 2, 3};
    const auto r = jackknife_ratio(num, den);
    EXPECT_DOUBLE_EQ(r.value, 2.0);
    EXPECT_NEAR(r.std_error, 0.0, 1e-15);
    EXPECT_THROW(jackknife_ratio(num, std::vector<double>{1.0}), ConfigError);
}
