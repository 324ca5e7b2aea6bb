#include <gtest/gtest.h>

#include <cmath>

#include "chargefcs/core.hpp"
#include "chargefcs/gate.hpp"
#include "chargefcs/replica.hpp"

using namespace chargefcs;
using namespace chargefcs::replica;

namespace {

int window_charge(int config, int replica) {
    const int w = (config >> (2 * replica)) & 3;
    return (w & 1) + (w >> 1);
}

}  // namespace

TEST(Weingarten, Weights) {
    for (double d : {1.0, 1.5, 2.0, 3.0}) {
        EXPECT_NEAR(weingarten_weight(Pairing::identity, Pairing::identity, 1, 1, d), a_of_d(d), 1e-16);
        EXPECT_EQ(weingarten_weight(Pairing::swap, Pairing::swap, 1, 1, d),
                  weingarten_weight(Pairing::identity, Pairing::identity, 1, 1, d));
        EXPECT_EQ(weingarten_weight(Pairing::identity, Pairing::swap, 0, 1, d), 0.0);
        EXPECT_EQ(weingarten_weight(Pairing::identity, Pairing::swap, 1, 2, d), 0.0);
    }
    EXPECT_NEAR(weingarten_weight(Pairing::identity, Pairing::identity, 0, 2, 2.0), 1.0 / 16, 1e-16);
    // d_1 = 2 d^2 = 8 at d = 2: -1 / (8 * 63).
    EXPECT_NEAR(weingarten_weight(Pairing::identity, Pairing::swap, 1, 1, 2.0), -1.0 / (8 * 63), 1e-16);
    EXPECT_THROW(weingarten_weight(Pairing::identity, Pairing::identity, 0, 0, 1.0), ConfigError);
    EXPECT_THROW(weingarten_weight(Pairing::identity, Pairing::swap, 2, 2, 1.0), ConfigError);
    EXPECT_EQ(sector_dimension(1, 2.0), 8.0);
}

TEST(PairedBasis, IndexRoundTripAndNorm) {
    for (int k = 0; k < kPairedBasisSize; ++k) EXPECT_EQ(PairedState::from_index(k).index(), k);
    for (int d : {1, 2}) {
        for (int k : {0, 5, 9, 15, 16, 22, 31}) {
            const auto v = explicit_paired_vector(PairedState::from_index(k), d);
            double n = 0;
            for (double x : v) n += x * x;
            EXPECT_NEAR(n, 1.0, 1e-14);
        }
    }
}

TEST(AveragedGate, ExplicitMatchesTraces) {
    for (int d : {1, 2}) {
        const auto a = averaged_gate_paired(d), b = averaged_gate_paired_traces(d);
        for (std::size_t i = 0; i < a.data.size(); ++i) EXPECT_NEAR(a.data[i], b.data[i], 1e-14);
    }
}

TEST(AveragedGate, StructuralProperties) {
    for (int d : {2, 3}) {
        const auto g = averaged_gate_paired(d);
        for (int out = 0; out < kPairedBasisSize; ++out) {
            for (int in = 0; in < kPairedBasisSize; ++in) {
                // Each replica's window charge is conserved.
                const int ci = in & 15, co = out & 15;
                if (window_charge(ci, 0) != window_charge(co, 0) || window_charge(ci, 1) != window_charge(co, 1)) {
                    EXPECT_EQ(g(out, in), 0.0);
                }
                EXPECT_NEAR(g(out, in), g(in, out), 1e-14);
            }
        }
        // Frozen identity-paired states are fixed points.
        for (int frozen : {0, 3 | (3 << 2), 3, 3 << 2}) {
            for (int out = 0; out < kPairedBasisSize; ++out) {
                if (out == frozen) {
                    EXPECT_NEAR(g(out, frozen), 1.0, 1e-14);
                } else if (PairedState::from_index(out).sigma == Pairing::identity) {
                    EXPECT_NEAR(g(out, frozen), 0.0, 1e-14);
                }
            }
        }
    }
}

TEST(AveragedGate, IdentityBlockIsEffectiveGate) {
    for (int d : {2, 3, 4}) {
        const auto g = identity_restricted_gate(d);
        const auto closed = build_pair_gate(2, a_of_d(d));
        for (int out = 0; out < 16; ++out)
            for (int in = 0; in < 16; ++in) {
                EXPECT_GE(g(out, in), -1e-15);
                EXPECT_NEAR(g(out, in), closed.prob(in, out), 1e-13);
            }
        for (int in = 0; in < 16; ++in) {
            double col = 0;
            for (int out = 0; out < 16; ++out) col += g(out, in);
            EXPECT_NEAR(col, 1.0, 1e-13);
        }
        EXPECT_LT(projected_gate_deviation(d), 1e-13);
        EXPECT_NEAR(singlet_element(d), a_of_d(d), 1e-15);
    }
}

TEST(HaarMc, MatchesWeingartenAtDOne) {
    const auto exact = averaged_gate_paired(1);
    const auto est = haar_mc_average(1, 20000, 31);
    double max_pull = 0.0;
    for (std::size_t i = 0; i < exact.data.size(); ++i) {
        const double diff = std::abs(est.mean.data[i] - exact.data[i]);
        if (est.std_error.data[i] == 0.0) {
            EXPECT_NEAR(diff, 0.0, 1e-12);
        } else {
            max_pull = std::max(max_pull, diff / est.std_error.data[i]);
        }
    }
    EXPECT_LT(max_pull, 5.0);
    EXPECT_LT(est.max_abs_imag, 0.05);
}

TEST(HaarMc, ErrorsShrinkAsRootN) {
    const auto small = haar_mc_average(1, 4000, 5), large = haar_mc_average(1, 16000, 5);
    double s = 0, l = 0;
    for (std::size_t i = 0; i < small.std_error.data.size(); ++i) {
        s += small.std_error.data[i];
        l += large.std_error.data[i];
    }
    EXPECT_NEAR(l / s, 0.5, 0.05);
}
