#include "chargefcs/gate.hpp"

#include <array>
#include <cmath>
#include <string>

#include "chargefcs/core.hpp"

namespace chargefcs {
namespace {

using Single = std::array<std::array<double, 4>, 4>;

// Single-chain window basis: 0 = empty, 1 = left occupied, 2 = right occupied, 3 = both.
constexpr Single kSinglet{{{0, 0, 0, 0}, {0, 0.5, -0.5, 0}, {0, -0.5, 0.5, 0}, {0, 0, 0, 0}}};
constexpr Single kComplement{{{1, 0, 0, 0}, {0, 0.5, 0.5, 0}, {0, 0.5, 0.5, 0}, {0, 0, 0, 1}}};

// Adds coeff * (ops[0] x ops[1] x ...) to dense.
void add_product(std::vector<double>& dense, int n, const std::vector<const Single*>& ops, double coeff) {
    const int dim = 1 << (2 * n);
    for (int in = 0; in < dim; ++in) {
        for (int out = 0; out < dim; ++out) {
            double v = coeff;
            for (int c = 0; c < n && v != 0.0; ++c) v *= (*ops[c])[(in >> (2 * c)) & 3][(out >> (2 * c)) & 3];
            dense[std::size_t(in) * dim + out] += v;
        }
    }
}

}  // namespace

std::vector<int> layer_bonds(int L, Parity parity) {
    std::vector<int> bonds;
    for (int i = parity == Parity::even ? 0 : 1; i + 1 < L; i += 2) bonds.push_back(i);
    return bonds;
}

PairGateTable::PairGateTable(int n_chains, double a, std::vector<double> dense)
    : n_chains_(n_chains), a_(a), dense_(std::move(dense)) {
    const int dim = n_configs();
    if (dense_.size() != std::size_t(dim) * dim) throw ConfigError("PairGateTable: dense matrix has wrong size");
    rows_.resize(std::size_t(dim));
    for (int in = 0; in < dim; ++in) {
        double sum = 0.0;
        for (int out = 0; out < dim; ++out) {
            double& p = dense_[std::size_t(in) * dim + out];
            if (p < -1e-12)
                throw ConfigError("PairGateTable: negative transition probability " + std::to_string(p) + " at a = " +
                                  std::to_string(a));
            if (p < 1e-15) p = 0.0;
            if (p > 0.0) rows_[in].push_back({std::uint16_t(out), p});
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("PairGateTable: row does not sum to one");
    }
}

PairGateTable build_pair_gate(int n_chains, double a) {
    if (n_chains < 1 || n_chains > 3) throw ConfigError("build_pair_gate: n_chains must be 1, 2 or 3");
    if (!(a >= 0.0 && a < 1.0)) throw ConfigError("build_pair_gate: a must lie in [0, 1)");
    const int dim = 1 << (2 * n_chains);
    std::vector<double> dense(std::size_t(dim) * dim, 0.0);
    std::vector<const Single*> ops(std::size_t(n_chains), &kComplement);
    add_product(dense, n_chains, ops, 1.0);
    if (n_chains >= 2 && a != 0.0) {
        for (int b = 0; b < n_chains; ++b) {
            for (int c = b + 1; c < n_chains; ++c) {
                std::vector<const Single*> pp(std::size_t(n_chains), &kComplement);
                pp[b] = &kSinglet;
                pp[c] = &kSinglet;
                add_product(dense, n_chains, pp, a);
            }
        }
    }
    return PairGateTable(n_chains, n_chains == 1 ? 0.0 : a, std::move(dense));
}

}  // namespace chargefcs
