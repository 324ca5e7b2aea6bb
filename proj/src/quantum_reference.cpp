#include "chargefcs/gate.hpp"
#include "chargefcs/quantum.hpp"
#include "quantum_internal.hpp"

namespace chargefcs::quantum {
namespace {

// Dense 4x4 action on every (11, 10, 01, 00) quadruple of the full 2^L space.
void apply_full(std::vector<cplx>& v, int L, int bond, const GateMatrix& u) {
    const std::size_t left = std::size_t(1) << bond, right = std::size_t(1) << (bond + 1);
    for (std::size_t base = 0; base < (std::size_t(1) << L); ++base) {
        if (base & (left | right)) continue;
        const std::size_t idx[4] = {base | left | right, base | left, base | right, base};
        cplx in[4], out[4] = {};
        for (int k = 0; k < 4; ++k) in[k] = v[idx[k]];
        for (int r = 0; r < 4; ++r)
            for (int k = 0; k < 4; ++k) out[r] += u[r][k] * in[k];
        for (int k = 0; k < 4; ++k) v[idx[k]] = out[k];
    }
}

void evolve_full(const Circuit& c, double lambda, std::vector<cplx>& v, int from, int to) {
    for (int step = from; step < to; ++step) {
        for (int parity = 0; parity < 2; ++parity) {
            const auto bonds = layer_bonds(c.L(), parity == 0 ? Parity::even : Parity::odd);
            for (std::size_t k = 0; k < bonds.size(); ++k) {
                const GateParams& g = c.gate(step, parity, int(k));
                apply_full(v, c.L(), bonds[k], bonds[k] == c.central_bond() ? counting_gate(g, lambda) : gate_matrix(g));
            }
        }
    }
}

}  // namespace

CgfGrid cgf_pure_reference(const Circuit& c, std::span<const double> lambdas, std::span<const int> times) {
    detail::check_times(c, times);
    const int L = c.L();
    CgfGrid out;
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    out.times.assign(times.begin(), times.end());
    const std::size_t nl = lambdas.size();
    out.z.assign(nl * times.size(), 0.0);
    const std::size_t dw = (std::size_t(1) << (L / 2)) - 1;
    for (std::size_t li = 0; li < nl; ++li) {
        std::vector<cplx> plus(std::size_t(1) << L, 0.0), minus(std::size_t(1) << L, 0.0);
        plus[dw] = minus[dw] = 1.0;
        int now = 0;
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            evolve_full(c, lambdas[li], plus, now, times[ti]);
            evolve_full(c, -lambdas[li], minus, now, times[ti]);
            now = times[ti];
            out.z[ti * nl + li] = detail::inner(plus, minus);
        }
    }
    out.chi.resize(out.z.size());
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const auto row = unwrap_log(lambdas, std::span<const cplx>(out.z).subspan(ti * nl, nl));
        std::copy(row.begin(), row.end(), out.chi.begin() + std::ptrdiff_t(ti * nl));
    }
    return out;
}

}  // namespace chargefcs::quantum
