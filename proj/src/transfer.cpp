#include "chargefcs/transfer.hpp"

#include <algorithm>
#include <string>

namespace chargefcs {
namespace {

struct Layout {
    int n_chains;
    int L;
    std::uint64_t n_states;
};

Layout make_layout(const PairGateTable& gate, int L, int t) {
    if (L <= 0 || L % 2 != 0) throw ConfigError("exact engine: L must be a positive even integer");
    if (t < 0) throw ConfigError("exact engine: t must be non-negative");
    const int bits = gate.n_chains() * L;
    if (bits > 40 || (std::uint64_t(1) << bits) > kMaxExactStates)
        throw ResourceError("exact engine: 2^" + std::to_string(bits) + " joint states exceed the cap of " +
                            std::to_string(kMaxExactStates));
    return {gate.n_chains(), L, std::uint64_t(1) << bits};
}

std::vector<double> initial_distribution(const Layout& lay, ChemicalPotential mu) {
    const double rho_l = mu.density(), rho_r = mu.negated().density();
    std::vector<double> p(lay.n_states);
    const int bits = lay.n_chains * lay.L;
    for (std::uint64_t s = 0; s < lay.n_states; ++s) {
        double w = 1.0;
        for (int b = 0; b < bits && w != 0.0; ++b) {
            const int x = b % lay.L;
            const double rho = x < lay.L / 2 ? rho_l : rho_r;
            w *= ((s >> b) & 1) ? rho : 1.0 - rho;
        }
        p[s] = w;
    }
    return p;
}

// Bit offsets of each window configuration for the bond starting at site i.
std::vector<std::uint64_t> window_offsets(const Layout& lay, int i, std::uint64_t& mask) {
    const int dim = 1 << (2 * lay.n_chains);
    std::vector<std::uint64_t> off(std::size_t(dim), 0);
    mask = 0;
    for (int c = 0; c < lay.n_chains; ++c) mask |= std::uint64_t(3) << (c * lay.L + i);
    for (int cfg = 0; cfg < dim; ++cfg) {
        std::uint64_t o = 0;
        for (int c = 0; c < lay.n_chains; ++c) {
            if ((cfg >> (2 * c)) & 1) o |= std::uint64_t(1) << (c * lay.L + i);
            if ((cfg >> (2 * c + 1)) & 1) o |= std::uint64_t(1) << (c * lay.L + i + 1);
        }
        off[cfg] = o;
    }
    return off;
}

// Runs t_max full steps; `step_bond` updates the group of states sharing everything but
// the window bits; `after_step` is called with the step count after each full step.
template <class StepBond>
void drive(const Layout& lay, int t_max, StepBond&& step_bond, const std::function<void(int)>& after_step) {
    const int central = lay.L / 2 - 1;
    const auto even = layer_bonds(lay.L, Parity::even);
    const auto odd = layer_bonds(lay.L, Parity::odd);
    after_step(0);
    for (int step = 1; step <= t_max; ++step) {
        for (const auto* bonds : {&even, &odd}) {
            for (int i : *bonds) {
                std::uint64_t mask = 0;
                const auto off = window_offsets(lay, i, mask);
                for (std::uint64_t s = 0; s < lay.n_states; ++s) {
                    if (s & mask) continue;
                    step_bond(s, off, i == central);
                }
            }
        }
        after_step(step);
    }
}

}  // namespace

std::complex<double> exact_mgf(const PairGateTable& gate, int L, int t, ChemicalPotential mu,
                               std::span<const double> lambdas) {
    const Layout lay = make_layout(gate, L, t);
    if (int(lambdas.size()) != gate.n_chains()) throw ConfigError("exact_mgf: need one lambda per chain");
    const auto p0 = initial_distribution(lay, mu);
    std::vector<std::complex<double>> p(p0.begin(), p0.end());

    const int dim = gate.n_configs();
    // Tilted weights for the central bond.
    std::vector<std::complex<double>> tilted(std::size_t(dim) * dim, 0.0);
    for (int in = 0; in < dim; ++in) {
        for (const auto& tr : gate.transitions(in)) {
            double phase = 0.0;
            for (int c = 0; c < gate.n_chains(); ++c) phase += lambdas[c] * PairGateTable::transfer(in, tr.out, c);
            tilted[std::size_t(in) * dim + tr.out] = tr.prob * std::polar(1.0, phase);
        }
    }

    std::vector<std::complex<double>> in_buf(static_cast<std::size_t>(dim)), out_buf(static_cast<std::size_t>(dim));
    auto step = [&](std::uint64_t base, const std::vector<std::uint64_t>& off, bool central) {
        for (int c = 0; c < dim; ++c) {
            in_buf[c] = p[base | off[c]];
            out_buf[c] = 0.0;
        }
        for (int in = 0; in < dim; ++in) {
            if (in_buf[in] == 0.0) continue;
            for (const auto& tr : gate.transitions(in)) {
                const std::complex<double> w = central ? tilted[std::size_t(in) * dim + tr.out] : tr.prob;
                out_buf[tr.out] += w * in_buf[in];
            }
        }
        for (int c = 0; c < dim; ++c) p[base | off[c]] = out_buf[c];
    };
    drive(lay, t, step, [](int) {});

    std::complex<double> z = 0.0;
    for (const auto& v : p) z += v;
    return z;
}

MomentTable::MomentTable(MonomialBasis basis, std::vector<double> coefficients)
    : basis_(std::move(basis)), coef_(std::move(coefficients)) {}

double MomentTable::moment(std::span<const int> m) const {
    const int k = basis_.index_of(m);
    if (k < 0) throw ConfigError("MomentTable: moment order beyond the computed truncation");
    return coef_[std::size_t(k)] * basis_.factorial_weight(std::size_t(k));
}

std::vector<MomentTable> exact_moment_series(const PairGateTable& gate, int L, int t_max, ChemicalPotential mu,
                                             int order) {
    const Layout lay = make_layout(gate, L, t_max);
    if (order < 1 || order > 4) throw ConfigError("exact moments: order must be in 1..4");
    const MonomialBasis basis(gate.n_chains(), order);
    const std::size_t nc = basis.size();
    if (lay.n_states * nc > 8 * kMaxExactStates)
        throw ResourceError("exact moments: state space times series length exceeds the memory cap");

    const auto p0 = initial_distribution(lay, mu);
    std::vector<double> p(lay.n_states * nc, 0.0);
    for (std::uint64_t s = 0; s < lay.n_states; ++s) p[s * nc] = p0[s];

    const int dim = gate.n_configs();
    // exp(s . delta) for every transition that moves charge across the central bond.
    std::vector<std::vector<double>> shift(std::size_t(dim) * dim);
    for (int in = 0; in < dim; ++in) {
        for (const auto& tr : gate.transitions(in)) {
            std::vector<int> delta(std::size_t(gate.n_chains()));
            bool moves = false;
            for (int c = 0; c < gate.n_chains(); ++c) {
                delta[c] = PairGateTable::transfer(in, tr.out, c);
                moves |= delta[c] != 0;
            }
            if (moves) shift[std::size_t(in) * dim + tr.out] = basis.exponential(delta);
        }
    }

    std::vector<double> in_buf(std::size_t(dim) * nc), out_buf(std::size_t(dim) * nc);
    auto step = [&](std::uint64_t base, const std::vector<std::uint64_t>& off, bool central) {
        for (int c = 0; c < dim; ++c)
            std::copy_n(p.begin() + std::ptrdiff_t((base | off[c]) * nc), nc, in_buf.begin() + std::ptrdiff_t(c * nc));
        std::fill(out_buf.begin(), out_buf.end(), 0.0);
        for (int in = 0; in < dim; ++in) {
            const std::span<const double> v(in_buf.data() + in * nc, nc);
            if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) continue;
            for (const auto& tr : gate.transitions(in)) {
                std::span<double> o(out_buf.data() + tr.out * nc, nc);
                const auto& sh = shift[std::size_t(in) * dim + tr.out];
                if (central && !sh.empty()) {
                    basis.multiply_accumulate(sh, v, o, tr.prob);
                } else {
                    for (std::size_t k = 0; k < nc; ++k) o[k] += tr.prob * v[k];
                }
            }
        }
        for (int c = 0; c < dim; ++c)
            std::copy_n(out_buf.begin() + std::ptrdiff_t(c * nc), nc, p.begin() + std::ptrdiff_t((base | off[c]) * nc));
    };

    std::vector<MomentTable> series;
    series.reserve(std::size_t(t_max) + 1);
    auto record = [&](int) {
        std::vector<double> total(nc, 0.0);
        for (std::uint64_t s = 0; s < lay.n_states; ++s)
            for (std::size_t k = 0; k < nc; ++k) total[k] += p[s * nc + k];
        series.emplace_back(basis, std::move(total));
    };
    drive(lay, t_max, step, record);
    return series;
}

MomentTable exact_moments(const PairGateTable& gate, int L, int t, ChemicalPotential mu, int order) {
    return exact_moment_series(gate, L, t, mu, order).back();
}

}  // namespace chargefcs
