#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chargefcs {

enum class Parity : std::uint8_t { even, odd };

/// Left sites (0-based) of the bonds acting in one half-layer. Even layers pair
/// (0,1),(2,3),...; odd layers pair (1,2),(3,4),... and leave the two end sites idle.
std::vector<int> layer_bonds(int L, Parity parity);

/// Stochastic two-site gate acting on n_chains chains at once.
///
/// A window configuration packs, for chain c, the left-site bit at position 2c and the
/// right-site bit at position 2c+1. prob(in, out) is the probability of out given in.
class PairGateTable {
public:
    struct Transition {
        std::uint16_t out;
        double prob;
    };

    PairGateTable(int n_chains, double a, std::vector<double> dense);

    int n_chains() const { return n_chains_; }
    double a() const { return a_; }
    int n_configs() const { return 1 << (2 * n_chains_); }

    double prob(int in, int out) const { return dense_[std::size_t(in) * n_configs() + out]; }
    /// Nonzero transitions out of `in`, in increasing order of `out`.
    std::span<const Transition> transitions(int in) const { return rows_[std::size_t(in)]; }

    /// Net charge moved left -> right in chain c by the transition in -> out (-1, 0 or +1).
    static int transfer(int in, int out, int chain) {
        const int l_in = (in >> (2 * chain)) & 1, l_out = (out >> (2 * chain)) & 1;
        return l_in - l_out;
    }

private:
    int n_chains_;
    double a_;
    std::vector<double> dense_;
    std::vector<std::vector<Transition>> rows_;
};

/// Gate of the n-chain effective model, K^(1) ... K^(n) + a sum_{b<c} P^(b) P^(c) prod_{others} K,
/// with P the two-site singlet projector and K = 1 - P, written in the charge basis.
/// n_chains = 1 gives the plain half-swap SEP gate (a is ignored).
/// Throws ConfigError unless 0 <= a < 1 and n_chains is 1, 2 or 3.
PairGateTable build_pair_gate(int n_chains, double a);

}  // namespace chargefcs
