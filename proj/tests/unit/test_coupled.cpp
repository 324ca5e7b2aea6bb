#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>

#include "chargefcs/coupled.hpp"
#include "chargefcs/sep.hpp"
#include "chargefcs/stats.hpp"

using namespace chargefcs;
using namespace chargefcs::coupled;

namespace {

ModelParams params(int n, int L, int t, double d, ChemicalPotential mu, std::uint64_t seed = 1) {
    ModelParams p;
    p.n_chains = n;
    p.L = L;
    p.t = t;
    p.d = d;
    p.mu = mu;
    p.seed = seed;
    return p;
}

int chain_bits(int config, int c) { return (config >> (2 * c)) & 3; }
int popcount2(int w) { return (w & 1) + ((w >> 1) & 1); }

// Swap the left/right bit of every chain.
int reflect(int config, int n) {
    int out = 0;
    for (int c = 0; c < n; ++c) {
        const int w = chain_bits(config, c);
        out |= (((w & 1) << 1) | (w >> 1)) << (2 * c);
    }
    return out;
}

int permute(int config, const std::vector<int>& perm) {
    int out = 0;
    for (std::size_t c = 0; c < perm.size(); ++c) out |= chain_bits(config, perm[c]) << (2 * int(c));
    return out;
}

}  // namespace

TEST(PairGate, NChainPropertiesForAllCouplings) {
    const auto sep = build_pair_gate(1, 0.0);
    for (int n : {2, 3}) {
        for (double a : {0.0, 0.05, 1.0 / 3.0, 0.5, 0.99}) {
            const auto g = build_pair_gate(n, a);
            const int dim = g.n_configs();
            for (int in = 0; in < dim; ++in) {
                double sum = 0.0;
                for (int out = 0; out < dim; ++out) {
                    const double p = g.prob(in, out);
                    EXPECT_GE(p, 0.0);
                    sum += p;
                    if (p > 0) {
                        for (int c = 0; c < n; ++c)
                            EXPECT_EQ(popcount2(chain_bits(in, c)), popcount2(chain_bits(out, c)));
                    }
                    EXPECT_NEAR(g.prob(reflect(in, n), reflect(out, n)), p, 1e-15);
                    const std::vector<int> perm = n == 2 ? std::vector<int>{1, 0} : std::vector<int>{2, 0, 1};
                    EXPECT_NEAR(g.prob(permute(in, perm), permute(out, perm)), p, 1e-15);
                }
                EXPECT_NEAR(sum, 1.0, 1e-14);
                // Tracing out every chain but c leaves the SEP gate.
                for (int c = 0; c < n; ++c) {
                    for (int w = 0; w < 4; ++w) {
                        double m = 0.0;
                        for (int out = 0; out < dim; ++out)
                            if (chain_bits(out, c) == w) m += g.prob(in, out);
                        EXPECT_NEAR(m, sep.prob(chain_bits(in, c), w), 1e-14);
                    }
                }
            }
        }
    }
}

TEST(PairGate, TwoChainRowsFromTheSupplement) {
    const double a = 0.1, p = (1 + a) / 4, r = (1 - a) / 4;
    const auto g = build_pair_gate(2, a);
    // Chain window values: 1 = left occupied, 2 = right occupied.
    const int aligned[] = {1 | (1 << 2), 2 | (2 << 2)};
    const int anti[] = {1 | (2 << 2), 2 | (1 << 2)};
    for (int in : aligned) {
        for (int out : aligned) EXPECT_NEAR(g.prob(in, out), p, 1e-15);
        for (int out : anti) EXPECT_NEAR(g.prob(in, out), r, 1e-15);
    }
    for (int in : anti) {
        for (int out : anti) EXPECT_NEAR(g.prob(in, out), p, 1e-15);
        for (int out : aligned) EXPECT_NEAR(g.prob(in, out), r, 1e-15);
    }
    EXPECT_NEAR(2 * p + 2 * r, 1.0, 1e-15);
    // Frozen windows in both chains map to themselves.
    for (int w0 : {0, 3})
        for (int w1 : {0, 3}) EXPECT_EQ(g.prob(w0 | (w1 << 2), w0 | (w1 << 2)), 1.0);
    // One movable chain hops with probability 1/2.
    EXPECT_NEAR(g.prob(1 | (3 << 2), 2 | (3 << 2)), 0.5, 1e-15);
    EXPECT_NEAR(g.prob(1 | (3 << 2), 1 | (3 << 2)), 0.5, 1e-15);
}

TEST(PairGate, DecouplesAtZero) {
    const auto sep = build_pair_gate(1, 0.0), g = build_pair_gate(2, 0.0);
    for (int in = 0; in < 16; ++in)
        for (int out = 0; out < 16; ++out)
            EXPECT_NEAR(g.prob(in, out), sep.prob(in & 3, out & 3) * sep.prob(in >> 2, out >> 2), 1e-15);
    EXPECT_THROW(build_pair_gate(2, 1.0), ConfigError);
    EXPECT_THROW(build_pair_gate(2, -0.1), ConfigError);
    EXPECT_THROW(build_pair_gate(4, 0.1), ConfigError);
    EXPECT_EQ(PairGateTable::transfer(1, 2, 0), 1);
    EXPECT_EQ(PairGateTable::transfer(2, 1, 0), -1);
    EXPECT_EQ(PairGateTable::transfer(1 << 2, 2 << 2, 1), 1);
}

TEST(ExactCoupled, NormalizationAndFactorization) {
    const auto p = params(2, 6, 3, 2.0, ChemicalPotential(1.0));
    const double zero[] = {0.0, 0.0};
    EXPECT_NEAR(std::abs(exact_coupled_cgf(p, zero) - 1.0), 0.0, 1e-14);

    auto q = params(2, 6, 3, INFINITY, ChemicalPotential(1.0));
    const double lam[] = {0.7, -1.3};
    ModelParams single = q;
    single.n_chains = 1;
    const auto expected = sep::exact_sep_cgf(single, lam[0]) * sep::exact_sep_cgf(single, lam[1]);
    EXPECT_NEAR(std::abs(exact_coupled_cgf(q, lam) - expected), 0.0, 1e-13);

    const auto big = params(2, 14, 1, 2.0, ChemicalPotential(0.0));
    EXPECT_THROW(exact_coupled_cgf(big, zero), ResourceError);
}

TEST(ExactCoupled, C2barLimits) {
    auto p = params(2, 8, 6, INFINITY, ChemicalPotential(0.5));
    ModelParams single = p;
    single.n_chains = 1;
    const auto m = sep::exact_sep_moments(single, 2);
    EXPECT_NEAR(c2bar_exact(p), m.moment({2}) - m.moment({1}) * m.moment({1}), 1e-12);
    p.t = 0;
    EXPECT_NEAR(c2bar_exact(p), 0.0, 1e-15);
}

TEST(ExactCoupled, DeltaC2NonNegative) {
    for (double d : {1.2, 1.5, 2.0}) {
        for (auto mu : {ChemicalPotential(0.5), ChemicalPotential::infinity()}) {
            const auto s = dc2_exact_series(params(2, 8, 0, d, mu), 8);
            EXPECT_EQ(s[0], 0.0);
            for (double v : s) EXPECT_GE(v, -1e-15);
            EXPECT_GT(s.back(), 0.0);
        }
    }
}

TEST(CoupledMc, ReferenceAndThreadIndependence) {
    for (int n : {2, 3}) {
        const auto p = params(n, 34, 12, 1.3, ChemicalPotential(0.4), 77);
        const auto a = coupled_mc_run(p, 4000, 100);
        const auto b = coupled_mc_run_reference(p, 4000, 100);
        EXPECT_TRUE(std::equal(a.raw().begin(), a.raw().end(), b.raw().begin(), b.raw().end()));
        const int saved = omp_get_max_threads();
        omp_set_num_threads(3);
        const auto c = coupled_mc_run(p, 4000, 100);
        omp_set_num_threads(saved);
        EXPECT_TRUE(std::equal(a.raw().begin(), a.raw().end(), c.raw().begin(), c.raw().end()));
    }
}

TEST(CoupledMc, MatchesExactJointCgf) {
    const auto p = params(2, 8, 6, d_of_a(0.1), ChemicalPotential::infinity(), 5);
    const std::uint64_t n = 100000;
    const auto s = coupled_mc_run(p, n);
    for (auto [l1, l2] : {std::pair{0.5, -0.5}, {1.0, 1.0}, {2.0, -0.3}, {-2.5, 0.8}}) {
        std::complex<double> acc = 0.0;
        for (std::uint64_t k = 0; k < n; ++k) acc += std::polar(1.0, l1 * s.at(k, 0) + l2 * s.at(k, 1));
        acc /= double(n);
        const double lam[] = {l1, l2};
        EXPECT_NEAR(std::abs(acc - exact_coupled_cgf(p, lam)), 0.0, 5.0 / std::sqrt(double(n)));
    }
}

TEST(CoupledMc, MarginalIsSepAndC2barMatchesExact) {
    const auto p = params(2, 8, 6, 1.1, ChemicalPotential(0.7), 6);
    const std::uint64_t n = 200000;
    const auto s = coupled_mc_run(p, n);
    ModelParams single = p;
    single.n_chains = 1;
    const auto m = sep::exact_sep_moments(single, 2);
    for (int c = 0; c < 2; ++c) {
        const auto cum = cumulants_from_histogram(s.marginal(c), 2, 50);
        EXPECT_NEAR(cum.order(1).value, m.moment({1}), 5 * cum.order(1).std_error);
        EXPECT_NEAR(cum.order(2).value, m.moment({2}) - m.moment({1}) * m.moment({1}), 5 * cum.order(2).std_error);
    }
    const auto c2 = c2bar_mc(s);
    EXPECT_NEAR(c2.value, c2bar_exact(p), 5 * c2.std_error);
    EXPECT_THROW(c3bar_mc(s), ConfigError);
}

TEST(CoupledMc, IndependentChainsAtZeroCoupling) {
    const auto p = params(2, 16, 10, INFINITY, ChemicalPotential(0.0), 8);
    const std::uint64_t n = 100000;
    const auto s = coupled_mc_run(p, n);
    double m0 = 0, m1 = 0, m01 = 0, s0 = 0, s1 = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        const double q0 = s.at(k, 0), q1 = s.at(k, 1);
        m0 += q0;
        m1 += q1;
        m01 += q0 * q1;
        s0 += q0 * q0;
        s1 += q1 * q1;
    }
    const double cov = m01 / n - (m0 / n) * (m1 / n);
    EXPECT_NEAR(cov, 0.0, 5 * std::sqrt(s0 / n * s1 / n / n));
}

TEST(CoupledMc, ThreeChainC3barMatchesExact) {
    const auto p = params(3, 6, 4, 1.05, ChemicalPotential(1.0), 9);
    const auto s = coupled_mc_run(p, 200000);
    const auto c3 = c3bar_mc(s);
    EXPECT_NEAR(c3.value, c3bar_exact(p), 5 * c3.std_error);
    EXPECT_GT(c3.std_error, 0.0);
}
