#include <gtest/gtest.h>

#include <cmath>

#include "chargefcs/coupled.hpp"
#include "chargefcs/magnon.hpp"
#include "chargefcs/rng.hpp"

using namespace chargefcs;
using namespace chargefcs::magnon;

namespace {

std::vector<double> random_vector(int L, std::uint64_t seed) {
    auto s = CounterStream::for_sample(seed, EngineId::replica, 0);
    std::vector<double> v(std::size_t(L) * L);
    for (auto& x : v) x = s.uniform() - 0.5;
    return v;
}

}  // namespace

TEST(MagnonLayer, ParallelMatchesReference) {
    for (int L : {2, 6, 10, 24}) {
        for (auto parity : {Parity::even, Parity::odd}) {
            for (double a : {0.0, 0.1, 0.5}) {
                auto v = random_vector(L, std::uint64_t(L));
                auto w = v;
                layer_apply_two_magnon(v, L, parity, a);
                layer_apply_two_magnon_reference(w, L, parity, a);
                for (std::size_t i = 0; i < v.size(); ++i) ASSERT_NEAR(v[i], w[i], 1e-15);
            }
        }
    }
}

TEST(MagnonLayer, DecouplesAtZero) {
    const int L = 10;
    for (auto parity : {Parity::even, Parity::odd}) {
        std::vector<double> f(L), g(L);
        auto s = CounterStream::for_sample(4, EngineId::replica, 1);
        for (auto& e : f) e = s.uniform();
        for (auto& e : g) e = s.uniform();
        std::vector<double> v(std::size_t(L) * L);
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j) v[std::size_t(i) * L + j] = f[i] * g[j];
        layer_apply_two_magnon(v, L, parity, 0.0);
        layer_apply_one_magnon(f, parity);
        layer_apply_one_magnon(g, parity);
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j) EXPECT_NEAR(v[std::size_t(i) * L + j], f[i] * g[j], 1e-15);
    }
}

TEST(MagnonLayer, UniformVectorIsFixed) {
    const int L = 12;
    for (double a : {0.0, 0.3, 0.9}) {
        std::vector<double> v(std::size_t(L) * L, 1.0);
        for (int k = 0; k < 6; ++k) layer_apply_two_magnon(v, L, k % 2 ? Parity::odd : Parity::even, a);
        for (double x : v) EXPECT_NEAR(x, 1.0, 1e-14);
    }
}

TEST(MagnonLayer, SharedWindowRowMatchesGate) {
    // Both magnons in window (0,1): aligned input |0,0> goes to (p, p, r, r).
    const int L = 4;
    const double a = 0.2, p = (1 + a) / 4, r = (1 - a) / 4;
    std::vector<double> v(std::size_t(L) * L, 0.0);
    v[0] = 1.0;
    layer_apply_two_magnon_reference(v, L, Parity::even, a);
    EXPECT_NEAR(v[0 * L + 0], p, 1e-15);
    EXPECT_NEAR(v[1 * L + 1], p, 1e-15);
    EXPECT_NEAR(v[0 * L + 1], r, 1e-15);
    EXPECT_NEAR(v[1 * L + 0], r, 1e-15);
}

TEST(MDiscrete, LimitsAndGuard) {
    const auto zero = m_series_discrete(40, 20, 0.0);
    for (double x : zero) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(m_of_t_discrete(40, 0, 0.3), 0.0);
    EXPECT_THROW(m_of_t_discrete(8, 6, 0.1), ConfigError);
    EXPECT_NO_THROW(m_of_t_discrete(8, 6, 0.1, false));
    const auto s = m_series_discrete(60, 50, 0.2);
    for (std::size_t t = 1; t < s.size(); ++t) EXPECT_GT(s[t], 0.0);
}

// tanh^2(mu/2) M(t) is the variance reduction C2_SEP - C2bar of the coupled model.
TEST(MDiscrete, EqualsCoupledExactRoute) {
    for (int L : {6, 8}) {
        for (double a : {0.05, 0.1, 0.3}) {
            const auto m = m_series_discrete(L, 6, a, false);
            for (auto mu : {ChemicalPotential(0.5), ChemicalPotential(2.0), ChemicalPotential::infinity()}) {
                ModelParams p;
                p.n_chains = 2;
                p.L = L;
                p.d = d_of_a(a);
                p.mu = mu;
                const auto dc2 = coupled::dc2_exact_series(p, 6);
                const double th = mu.tanh_half();
                for (int t = 0; t <= 6; ++t) EXPECT_NEAR(th * th * m[t], dc2[t], 1e-10) << "L=" << L << " t=" << t;
            }
        }
    }
}

TEST(MHamiltonian, LimitsAndMonotonicity) {
    const double times[] = {0.0, 0.5, 5.0, 20.0};
    const auto zero = m_series_hamiltonian(30, times, 0.0);
    for (double x : zero) EXPECT_NEAR(x, 0.0, 1e-14);
    const auto m = m_series_hamiltonian(30, times, 0.1);
    EXPECT_EQ(m[0], 0.0);
    // Rises linearly from zero, then decays diffusively.
    EXPECT_GT(m[1], 0.0);
    EXPECT_GT(m[3], 0.0);
    EXPECT_LT(m[3], m[2]);
    const double tiny[] = {1e-6};
    EXPECT_LT(std::abs(m_series_hamiltonian(30, tiny, 0.1)[0]), 1e-6);
    const double bad[] = {2.0, 1.0};
    EXPECT_THROW(m_series_hamiltonian(30, bad, 0.1), ConfigError);
}

TEST(MHamiltonian, LinearInCouplingAtSmallA) {
    const double t = 40.0;
    const double m1 = m_of_t_hamiltonian(60, t, 0.01), m2 = m_of_t_hamiltonian(60, t, 0.02);
    EXPECT_NEAR(m2 / m1, 2.0, 0.02);
}

TEST(AntisymmetricSector, ExactEigenstates) {
    for (double a : {0.0, 0.5}) {
        for (auto [p1, p2] : {std::pair{1, 3}, {2, 7}, {0, 5}}) EXPECT_LT(antisymmetric_sector_check(16, a, p1, p2), 1e-10);
    }
    EXPECT_LT(antisymmetric_sector_check(16, 0.0, 1, 3, true), 1e-10);
    const double sym = antisymmetric_sector_check(16, 0.5, 1, 3, true);
    EXPECT_GT(sym, 1e-3);
    EXPECT_LT(sym, 1.0);
}
