#pragma once

#include <utility>
#include <vector>

#include "chargefcs/quantum.hpp"

namespace chargefcs::quantum::detail {

void check_circuit_size(int L, int depth);
void check_times(const Circuit& c, std::span<const int> times);

/// Fixed-charge subspace with the amplitude pairs each bond gate mixes.
struct ChargeSector {
    struct BondLists {
        int bond = 0;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> hops;  // (|..10..>, |..01..>)
        std::vector<std::uint32_t> empty;                          // |..00..>
    };

    int L, N;
    std::vector<std::uint64_t> binom;
    std::vector<std::uint32_t> states;
    std::vector<BondLists> even, odd;

    ChargeSector(int L, int N);
    std::uint32_t rank(std::uint32_t mask) const;
};

void evolve(const ChargeSector& sec, const Circuit& c, double lambda, std::vector<cplx>& v, int from, int to);
cplx inner(const std::vector<cplx>& x, const std::vector<cplx>& y);

}  // namespace chargefcs::quantum::detail
