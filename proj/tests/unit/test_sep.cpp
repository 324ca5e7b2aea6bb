#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <numeric>

#include "chargefcs/analytic.hpp"
#include "chargefcs/sep.hpp"
#include "chargefcs/stats.hpp"

using namespace chargefcs;
using namespace chargefcs::sep;

namespace {

ModelParams params(int L, int t, ChemicalPotential mu, std::uint64_t seed = 1) {
    ModelParams p;
    p.L = L;
    p.t = t;
    p.mu = mu;
    p.seed = seed;
    return p;
}

SepRunConfig run_config(const ModelParams& p, std::uint64_t n, std::uint64_t first = 0,
                        std::vector<double> lambdas = {}) {
    SepRunConfig c;
    c.params = p;
    c.n_samples = n;
    c.first_sample = first;
    c.lambda_grid = std::move(lambdas);
    return c;
}

class ThreadCount {
public:
    explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved_); }

private:
    int saved_;
};

}  // namespace

TEST(LayerBonds, EvenAndOdd) {
    EXPECT_EQ(layer_bonds(6, Parity::even), (std::vector<int>{0, 2, 4}));
    EXPECT_EQ(layer_bonds(6, Parity::odd), (std::vector<int>{1, 3}));
    EXPECT_TRUE(layer_bonds(2, Parity::odd).empty());
}

TEST(BrickwallStep, ConservesChargeAndCountsCentralCrossings) {
    auto stream = CounterStream::for_sample(5, EngineId::sep, 0);
    std::vector<std::uint8_t> row{1, 0, 1, 1, 0, 1, 0, 0};
    const int total = std::accumulate(row.begin(), row.end(), 0);
    std::int64_t q = 0;
    for (int step = 0; step < 200; ++step) {
        brickwall_step(row, step % 2 ? Parity::odd : Parity::even, stream, q);
        EXPECT_EQ(std::accumulate(row.begin(), row.end(), 0), total);
    }
    const int right = row[4] + row[5] + row[6] + row[7];
    EXPECT_EQ(q, right - 1);
}

TEST(BrickwallStep, ExclusionAndSingleSwap) {
    // Find a stream whose first word fires bond 0.
    for (std::uint64_t k = 0; k < 64; ++k) {
        auto probe = CounterStream::for_sample(1, EngineId::sep, k);
        const bool fires = probe() & 1;
        for (auto init : {std::vector<std::uint8_t>{1, 0}, {1, 1}, {0, 0}}) {
            auto s = CounterStream::for_sample(1, EngineId::sep, k);
            auto row = init;
            TransferRecord rec(1);
            brickwall_step(row, Parity::even, s, rec);
            if (init[0] == init[1] || !fires) {
                EXPECT_EQ(row, init);
                EXPECT_EQ(rec.q[0], 0);
            } else {
                EXPECT_EQ(row, (std::vector<std::uint8_t>{0, 1}));
                EXPECT_EQ(rec.q[0], 1);
            }
        }
    }
}

TEST(RunSep, TwoSiteDomainWallIsFairCoin) {
    const auto cfg = run_config(params(2, 1, ChemicalPotential::infinity()), 200000);
    const auto h = run_sep_fcs(cfg).histogram;
    ASSERT_EQ(h.counts.size(), 2u);
    EXPECT_NEAR(double(h.counts.at(1)) / h.n_samples, 0.5, 4 * std::sqrt(0.25 / h.n_samples));
    const auto z = exact_sep_cgf(params(2, 1, ChemicalPotential::infinity()), 0.9);
    EXPECT_NEAR(std::abs(z - (0.5 + 0.5 * std::polar(1.0, 0.9))), 0.0, 1e-15);
}

TEST(RunSep, ZeroTimeIsPointMass) {
    const auto cfg = run_config(params(16, 0, ChemicalPotential(0.0)), 1000);
    const auto h = run_sep_fcs(cfg).histogram;
    ASSERT_EQ(h.counts.size(), 1u);
    EXPECT_EQ(h.counts.at(0), 1000u);
}

TEST(RunSep, PackedMatchesReferenceBitForBit) {
    for (int L : {4, 10, 64, 66, 130}) {
        for (auto mu : {ChemicalPotential::infinity(), ChemicalPotential(0.7)}) {
            const auto cfg = run_config(params(L, 17, mu, 42), 3000, 500, {-1.0, 0.5});
            const auto a = run_sep_fcs(cfg), b = run_sep_fcs_reference(cfg);
            EXPECT_EQ(a.histogram.counts, b.histogram.counts) << "L=" << L;
            ASSERT_EQ(a.cgf.size(), 2u);
            EXPECT_EQ(a.cgf, b.cgf);
            for (std::uint64_t k = 0; k < 20; ++k)
                EXPECT_EQ(sample_transfer(cfg.params, k), sample_transfer_reference(cfg.params, k));
        }
    }
}

TEST(RunSep, IndependentOfThreadCount) {
    const auto cfg = run_config(params(64, 40, ChemicalPotential(0.0), 9), 20000);
    Histogram one, three;
    {
        ThreadCount tc(1);
        one = run_sep_fcs(cfg).histogram;
    }
    {
        ThreadCount tc(3);
        three = run_sep_fcs(cfg).histogram;
    }
    EXPECT_EQ(one.counts, three.counts);
}

TEST(RunSep, TransferBoundedByTime) {
    for (int t : {1, 3, 8}) {
        const auto cfg = run_config(params(32, t, ChemicalPotential(0.3), 3), 20000);
        const auto h = run_sep_fcs(cfg).histogram;
        EXPECT_GE(h.min_value(), -t);
        EXPECT_LE(h.max_value(), t);
    }
}

TEST(RunSep, EquilibriumIsSymmetric) {
    const auto cfg = run_config(params(32, 20, ChemicalPotential(0.0), 17), 100000);
    const auto h = run_sep_fcs(cfg).histogram;
    for (auto [q, c] : h.counts) {
        if (q <= 0) continue;
        const auto it = h.counts.find(-q);
        const double other = it == h.counts.end() ? 0.0 : double(it->second);
        EXPECT_NEAR(double(c), other, 5 * std::sqrt(double(c) + other + 1));
    }
}

// Sampler CGF against the tilted transfer operator.
TEST(RunSep, MatchesExactOracle) {
    const std::vector<double> lambdas{-2.5, -1.0, 0.3, 1.7, 3.0};
    const std::uint64_t n = 100000;
    for (int L : {4, 8, 10}) {
        for (int t : {1, 3, 6}) {
            for (auto mu : {ChemicalPotential(0.0), ChemicalPotential(2.0), ChemicalPotential::infinity()}) {
                const auto cfg = run_config(params(L, t, mu, 1000 + L * 10 + t), n, 0, lambdas);
                const auto res = run_sep_fcs(cfg);
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    const auto exact = exact_sep_cgf(cfg.params, lambdas[i]);
                    const auto mc = std::exp(res.cgf[i]);
                    EXPECT_NEAR(std::abs(mc - exact), 0.0, 5.0 / std::sqrt(double(n)))
                        << "L=" << L << " t=" << t << " mu=" << mu.to_string() << " lambda=" << lambdas[i];
                }
            }
        }
    }
}

TEST(ExactSep, NormalizationAndCaps) {
    for (int t : {0, 1, 5}) EXPECT_NEAR(std::abs(exact_sep_cgf(params(8, t, ChemicalPotential(1.0)), 0.0) - 1.0), 0.0, 1e-14);
    EXPECT_THROW(exact_sep_cgf(params(16, 1, ChemicalPotential(0.0)), 0.1), ResourceError);
}

TEST(ExactSep, MomentsMatchCgfAndMeanSeries) {
    const auto p = params(10, 5, ChemicalPotential(2.0));
    const auto m = exact_sep_moments(p, 2);
    const double h = 1e-4;
    const auto zp = exact_sep_cgf(p, h), zm = exact_sep_cgf(p, -h);
    EXPECT_NEAR((zp - zm).imag() / (2 * h), m.moment({1}), 1e-7);
    EXPECT_NEAR(-(zp + zm - 2.0).real() / (h * h), m.moment({2}), 1e-5);
    const auto series = mean_transfer_series(10, 5, ChemicalPotential(2.0));
    EXPECT_NEAR(series[5], m.moment({1}), 1e-12);
    EXPECT_EQ(series[0], 0.0);
}

TEST(MeanTransferSeries, ApproachesAsymptote) {
    const auto s = mean_transfer_series(256, 100, ChemicalPotential::infinity());
    EXPECT_NEAR(s[100] / analytic::sep_cumulant(1, 100, 1.0, 0.0), 1.0, 2e-3);
    EXPECT_NEAR(s[1], 0.5, 1e-15);
}

TEST(KurtosisProxy, SingleBatchIsSampleKurtosis) {
    Histogram h;
    h.add(-2, 3);
    h.add(0, 10);
    h.add(1, 5);
    h.add(4, 1);
    const auto c = central_moments(h);
    const Histogram one[] = {h};
    const auto k = kurtosis_proxy(one);
    EXPECT_NEAR(k.value, c.mu4 / (c.mu2 * c.mu2), 1e-14);
    EXPECT_THROW(kurtosis_proxy(std::span<const Histogram>{}), ConfigError);
}

TEST(KurtosisProxy, GaussianBatchesGiveThree) {
    std::vector<Histogram> batches(8);
    const double sigma = 30.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        for (int q = -250; q <= 250; ++q)
            batches[b].add(q, std::uint64_t(std::llround(1e9 * std::exp(-0.5 * q * q / (sigma * sigma)))));
    }
    EXPECT_NEAR(kurtosis_proxy(batches).value, 3.0, 1e-6);
}
