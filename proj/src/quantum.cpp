#include "chargefcs/quantum.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "chargefcs/analytic.hpp"
#include "chargefcs/gate.hpp"
#include "chargefcs/stats.hpp"
#include "quantum_internal.hpp"

namespace chargefcs::quantum {

GateParams sample_gate(CounterStream& stream) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    GateParams g;
    g.xi = stream.uniform();
    g.alpha = two_pi * stream.uniform();
    g.psi = two_pi * stream.uniform();
    g.chi_phase = two_pi * stream.uniform();
    g.rho_phase = two_pi * stream.uniform();
    return g;
}

GateMatrix gate_matrix(const GateParams& g) { return counting_gate(g, 0.0); }

GateMatrix counting_gate(const GateParams& g, double lambda) {
    const double stay = std::sqrt(1.0 - g.xi), hop = std::sqrt(g.xi);
    GateMatrix u{};
    u[0][0] = 1.0;
    u[1][1] = std::polar(stay, g.alpha + g.psi);
    u[1][2] = std::polar(hop, g.alpha + g.chi_phase + 0.5 * lambda);
    u[2][1] = -std::polar(hop, g.alpha - g.chi_phase - 0.5 * lambda);
    u[2][2] = std::polar(stay, g.alpha - g.psi);
    u[3][3] = std::polar(1.0, g.rho_phase);
    return u;
}

double unitarity_residual(const GateMatrix& u) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < 4; ++k) s += std::conj(u[k][i]) * u[k][j];
            r = std::max(r, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return r;
}

Circuit::Circuit(int L, int depth, std::uint64_t seed, std::uint64_t circuit_index)
    : L_(L), depth_(depth), even_(0), odd_(0) {
    detail::check_circuit_size(L, depth);
    even_ = int(layer_bonds(L, Parity::even).size());
    odd_ = int(layer_bonds(L, Parity::odd).size());
    auto stream = CounterStream::for_sample(seed, EngineId::quantum_circuit, circuit_index);
    gates_.reserve(std::size_t(depth) * (even_ + odd_));
    for (std::size_t k = 0; k < std::size_t(depth) * (even_ + odd_); ++k) gates_.push_back(sample_gate(stream));
}

Circuit::Circuit(int L, int depth, std::vector<GateParams> gates) : L_(L), depth_(depth), even_(0), odd_(0) {
    detail::check_circuit_size(L, depth);
    even_ = int(layer_bonds(L, Parity::even).size());
    odd_ = int(layer_bonds(L, Parity::odd).size());
    if (gates.size() != std::size_t(depth) * (even_ + odd_))
        throw ConfigError("Circuit: expected " + std::to_string(std::size_t(depth) * (even_ + odd_)) + " gates");
    gates_ = std::move(gates);
}

const GateParams& Circuit::gate(int step, int parity, int k) const {
    const std::size_t base = std::size_t(step) * (even_ + odd_) + (parity == 0 ? 0 : even_);
    return gates_.at(base + k);
}

namespace detail {

void check_circuit_size(int L, int depth) {
    if (L < 2 || L % 2 != 0) throw ConfigError("quantum: L must be an even integer >= 2");
    if (L > kMaxQuantumSites)
        throw ResourceError("quantum: L = " + std::to_string(L) + " exceeds the statevector cap of " +
                            std::to_string(kMaxQuantumSites) + " sites");
    if (depth < 0) throw ConfigError("quantum: depth must be non-negative");
}

void check_times(const Circuit& c, std::span<const int> times) {
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] < 0 || times[k] > c.depth() || (k > 0 && times[k] < times[k - 1]))
            throw ConfigError("quantum: times must be ascending and within the circuit depth");
}

ChargeSector::ChargeSector(int L_, int N_) : L(L_), N(N_) {
    binom.assign(std::size_t(L + 1) * (L + 2), 0);
    for (int n = 0; n <= L; ++n) {
        binom[std::size_t(n) * (L + 2)] = 1;
        for (int k = 1; k <= n; ++k)
            binom[std::size_t(n) * (L + 2) + k] =
                binom[std::size_t(n - 1) * (L + 2) + k - 1] + (k <= n - 1 ? binom[std::size_t(n - 1) * (L + 2) + k] : 0);
    }
    // Ascending masks with N bits set (colexicographic order).
    const std::uint64_t count = binom[std::size_t(L) * (L + 2) + N];
    states.reserve(count);
    if (N == 0) {
        states.push_back(0);
    } else {
        std::uint32_t m = (std::uint32_t(1) << N) - 1;
        for (std::uint64_t k = 0; k < count; ++k) {
            states.push_back(m);
            const std::uint32_t c = m & (~m + 1), r = m + c;
            m = (((r ^ m) >> 2) / c) | r;
        }
    }
    for (Parity p : {Parity::even, Parity::odd}) {
        auto& layer = p == Parity::even ? even : odd;
        for (int i : layer_bonds(L, p)) {
            BondLists bl;
            bl.bond = i;
            const std::uint32_t left = std::uint32_t(1) << i, right = std::uint32_t(1) << (i + 1);
            for (std::uint32_t s = 0; s < states.size(); ++s) {
                const std::uint32_t m = states[s];
                const bool l = m & left, r = m & right;
                if (l && !r) bl.hops.push_back({s, rank(m ^ left ^ right)});
                else if (!l && !r) bl.empty.push_back(s);
            }
            layer.push_back(std::move(bl));
        }
    }
}

std::uint32_t ChargeSector::rank(std::uint32_t mask) const {
    std::uint64_t r = 0;
    int k = 0;
    for (int p = 0; p < L; ++p)
        if (mask >> p & 1u) r += binom[std::size_t(p) * (L + 2) + (++k)];
    return std::uint32_t(r);
}

void evolve(const ChargeSector& sec, const Circuit& c, double lambda, std::vector<cplx>& v, int from, int to) {
    const int central = c.central_bond();
    for (int step = from; step < to; ++step) {
        for (int parity = 0; parity < 2; ++parity) {
            const auto& layer = parity == 0 ? sec.even : sec.odd;
            for (std::size_t k = 0; k < layer.size(); ++k) {
                const auto& bl = layer[k];
                const GateParams& g = c.gate(step, parity, int(k));
                const GateMatrix u = bl.bond == central ? counting_gate(g, lambda) : gate_matrix(g);
                const cplx u11 = u[1][1], u12 = u[1][2], u21 = u[2][1], u22 = u[2][2], u33 = u[3][3];
                cplx* d = v.data();
                for (const auto& [a, b] : bl.hops) {
                    const cplx x = d[a], y = d[b];
                    d[a] = u11 * x + u12 * y;
                    d[b] = u21 * x + u22 * y;
                }
                for (std::uint32_t e : bl.empty) d[e] *= u33;
            }
        }
    }
}

cplx inner(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

}  // namespace detail

std::vector<cplx> unwrap_log(std::span<const double> lambdas, std::span<const cplx> z) {
    if (lambdas.size() != z.size()) throw ConfigError("unwrap_log: size mismatch");
    std::vector<cplx> out(z.size());
    if (z.empty()) return out;
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i - 1])) throw ConfigError("unwrap_log: lambdas must be strictly ascending");
    for (cplx w : z)
        if (!(std::abs(w) > 0.0) || !std::isfinite(std::abs(w)))
            throw NumericalError("unwrap_log: Z vanished or is not finite on the grid");
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (std::abs(lambdas[i]) < std::abs(lambdas[i0])) i0 = i;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto follow = [&](std::size_t i, double prev) {
        double ph = std::arg(z[i]);
        ph += two_pi * std::round((prev - ph) / two_pi);
        out[i] = cplx(std::log(std::abs(z[i])), ph);
    };
    out[i0] = std::log(z[i0]);
    for (std::size_t i = i0 + 1; i < z.size(); ++i) follow(i, out[i - 1].imag());
    for (std::size_t i = i0; i-- > 0;) follow(i, out[i + 1].imag());
    return out;
}

CgfGrid cgf_pure(const Circuit& c, std::span<const double> lambdas, std::span<const int> times, ChemicalPotential mu) {
    if (mu != ChemicalPotential::infinity())
        throw ConfigError("cgf_pure: only the domain-wall state (mu = +inf) is supported, got mu = " +
                          mu.to_string());
    detail::check_times(c, times);
    const int L = c.L();
    const detail::ChargeSector sec(L, L / 2);
    const std::uint32_t dw = sec.rank((std::uint32_t(1) << (L / 2)) - 1);

    CgfGrid out;
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    out.times.assign(times.begin(), times.end());
    const std::size_t nl = lambdas.size(), nt = times.size();
    out.z.assign(nl * nt, 0.0);

    // psi(lambda) and psi(-lambda) serve both lambda and -lambda, so each |lambda| is
    // evolved once: Z(lambda) = <psi(l)|psi(-l)>, Z(-lambda) = <psi(-l)|psi(l)>.
    std::vector<double> mags;
    for (double l : lambdas) mags.push_back(std::abs(l));
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t mi = 0; mi < std::int64_t(mags.size()); ++mi) {
        const double m = mags[mi];
        std::vector<cplx> plus(sec.states.size(), 0.0), minus(sec.states.size(), 0.0);
        plus[dw] = minus[dw] = 1.0;
        int now = 0;
        for (std::size_t ti = 0; ti < nt; ++ti) {
            detail::evolve(sec, c, m, plus, now, times[ti]);
            detail::evolve(sec, c, -m, minus, now, times[ti]);
            now = times[ti];
            const cplx z = detail::inner(plus, minus);
            for (std::size_t li = 0; li < nl; ++li) {
                if (lambdas[li] == m) out.z[ti * nl + li] = z;
                else if (lambdas[li] == -m) out.z[ti * nl + li] = std::conj(z);
            }
        }
    }
    out.chi.resize(out.z.size());
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const auto row = unwrap_log(lambdas, std::span<const cplx>(out.z).subspan(ti * nl, nl));
        std::copy(row.begin(), row.end(), out.chi.begin() + std::ptrdiff_t(ti * nl));
    }
    return out;
}

double mean_transfer(const Circuit& c, int t) {
    const int times[1] = {t};
    detail::check_times(c, times);
    const int L = c.L();
    const detail::ChargeSector sec(L, L / 2);
    std::vector<cplx> v(sec.states.size(), 0.0);
    v[sec.rank((std::uint32_t(1) << (L / 2)) - 1)] = 1.0;
    detail::evolve(sec, c, 0.0, v, 0, t);
    const std::uint32_t right_mask = ~((std::uint32_t(1) << (L / 2)) - 1);
    double n = 0.0;
    for (std::size_t s = 0; s < v.size(); ++s) n += std::norm(v[s]) * std::popcount(sec.states[s] & right_mask);
    return n;
}

MixedEstimate cgf_mixed_equilibrium(const Circuit& c, double lambda, int n_vectors, std::uint64_t seed) {
    const int L = c.L();
    const int depth = c.depth();
    const double norm = std::ldexp(1.0, -L);
    MixedEstimate est;
    if (L <= kMaxExactTraceSites) {
        for (int N = 0; N <= L; ++N) {
            const detail::ChargeSector sec(L, N);
            const std::size_t dim = sec.states.size();
            std::vector<cplx> diag(dim);
#pragma omp parallel for schedule(dynamic)
            for (std::int64_t s = 0; s < std::int64_t(dim); ++s) {
                std::vector<cplx> plus(dim, 0.0), minus(dim, 0.0);
                plus[s] = minus[s] = 1.0;
                detail::evolve(sec, c, lambda, plus, 0, depth);
                detail::evolve(sec, c, -lambda, minus, 0, depth);
                diag[s] = detail::inner(plus, minus);
            }
            for (cplx x : diag) est.z += norm * x;
        }
        return est;
    }
    if (n_vectors < 2) throw ConfigError("cgf_mixed_equilibrium: need at least two random vectors");
    est.exact = false;
    est.n_vectors = n_vectors;
    double var = 0.0;
    for (int N = 0; N <= L; ++N) {
        const detail::ChargeSector sec(L, N);
        const std::size_t dim = sec.states.size();
        std::vector<cplx> samples(static_cast<std::size_t>(n_vectors));
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < n_vectors; ++r) {
            auto stream = CounterStream::for_sample(seed, EngineId::quantum_trace, std::uint64_t(N) * n_vectors + r);
            std::vector<cplx> plus(dim);
            for (std::size_t s = 0; s < dim; ++s) plus[s] = (stream() >> 63) ? 1.0 : -1.0;
            std::vector<cplx> minus = plus;
            detail::evolve(sec, c, lambda, plus, 0, depth);
            detail::evolve(sec, c, -lambda, minus, 0, depth);
            samples[r] = detail::inner(plus, minus);
        }
        cplx mean = 0.0;
        for (cplx x : samples) mean += x;
        mean /= double(n_vectors);
        double ss = 0.0;
        for (cplx x : samples) ss += std::norm(x - mean);
        est.z += norm * mean;
        var += norm * norm * ss / (double(n_vectors) * (n_vectors - 1));
    }
    est.std_error = std::sqrt(var);
    return est;
}

namespace {

double trapezoid(std::span<const double> x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

}  // namespace

std::vector<double> circuit_deviation(const CgfGrid& grid) {
    const std::size_t nl = grid.lambdas.size();
    std::vector<double> out;
    std::vector<double> y(nl);
    for (std::size_t ti = 0; ti < grid.times.size(); ++ti) {
        const double t = grid.times[ti];
        for (std::size_t li = 0; li < nl; ++li)
            y[li] = std::norm(grid.chi_at(ti, li) - analytic::sep_cgf(grid.lambdas[li], t, 1.0, 0.0));
        out.push_back(t > 0 ? trapezoid(grid.lambdas, y) / t : 0.0);
    }
    return out;
}

DecayFit fluctuation_decay(std::span<const CgfGrid> ensemble) {
    if (ensemble.size() < 8) throw ConfigError("fluctuation_decay: need at least 8 circuit realizations");
    const auto& ref = ensemble.front();
    for (const auto& g : ensemble)
        if (g.lambdas != ref.lambdas || g.times != ref.times)
            throw ConfigError("fluctuation_decay: all grids must share lambdas and times");
    DecayFit fit;
    fit.times = ref.times;
    fit.deviation.assign(ref.times.size(), 0.0);
    for (const auto& g : ensemble) {
        const auto dev = circuit_deviation(g);
        for (std::size_t ti = 0; ti < dev.size(); ++ti) fit.deviation[ti] += dev[ti] / double(ensemble.size());
    }
    std::vector<double> ts, ds;
    for (std::size_t ti = 0; ti < fit.times.size(); ++ti)
        if (fit.times[ti] > 0 && fit.deviation[ti] > 0) {
            ts.push_back(fit.times[ti]);
            ds.push_back(fit.deviation[ti]);
        }
    fit.slope = ts.size() >= 2 ? loglog_slope(ts, ds) : std::nan("");
    return fit;
}

std::vector<CgfGrid> run_ensemble(const EnsembleConfig& cfg) {
    if (cfg.n_circuits < 1) throw ConfigError("run_ensemble: need at least one circuit");
    if (cfg.times.empty()) throw ConfigError("run_ensemble: empty time list");
    detail::check_circuit_size(cfg.L, cfg.times.back());
    const int depth = cfg.times.back();
    std::vector<CgfGrid> out;
    out.reserve(std::size_t(cfg.n_circuits));
    for (int k = 0; k < cfg.n_circuits; ++k) {
        const Circuit c(cfg.L, depth, cfg.seed, cfg.first_circuit + std::uint64_t(k));
        out.push_back(cgf_pure(c, cfg.lambdas, cfg.times));
    }
    return out;
}

std::vector<cplx> mean_chi(std::span<const CgfGrid> ensemble) {
    if (ensemble.empty()) throw ConfigError("mean_chi: empty ensemble");
    std::vector<cplx> m(ensemble.front().chi.size(), 0.0);
    for (const auto& g : ensemble) {
        if (g.chi.size() != m.size()) throw ConfigError("mean_chi: grids differ in shape");
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += g.chi[i];
    }
    for (auto& x : m) x /= double(ensemble.size());
    return m;
}

}  // namespace chargefcs::quantum
