#include "chargefcs/magnon.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "chargefcs/core.hpp"

namespace chargefcs::magnon {
namespace {

// <v_i | vec> with v_i = (|i,i> - |i+1,i> - |i,i+1> + |i+1,i+1>) / 2.
inline double singlet_overlap(const double* v, int L, int i) {
    const std::size_t a = std::size_t(i) * L + i;
    return 0.5 * (v[a] - v[a + L] - v[a + 1] + v[a + L + 1]);
}

inline void add_singlet(double* v, int L, int i, double c) {
    const std::size_t a = std::size_t(i) * L + i;
    v[a] += 0.5 * c;
    v[a + L] -= 0.5 * c;
    v[a + 1] -= 0.5 * c;
    v[a + L + 1] += 0.5 * c;
}

// K x K on every window of the layer, then a * sum_i v_i (<v_i|vec> + source_i).
void two_magnon_layer(std::span<double> vec, int L, Parity parity, double a, const std::vector<double>* source) {
    if (vec.size() != std::size_t(L) * L) throw ConfigError("two-magnon vector must have L*L entries");
    const auto bonds = layer_bonds(L, parity);
    const int nb = int(bonds.size());
    double* v = vec.data();
    std::vector<double> dots(static_cast<std::size_t>(nb), 0.0);
    if (a != 0.0) {
        for (int b = 0; b < nb; ++b) {
            dots[b] = singlet_overlap(v, L, bonds[b]);
            if (source) dots[b] += (*source)[b];
        }
    }
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nb; ++b) {
        double* r0 = v + std::size_t(bonds[b]) * L;
        double* r1 = r0 + L;
        for (int x2 = 0; x2 < L; ++x2) {
            const double m = 0.5 * (r0[x2] + r1[x2]);
            r0[x2] = m;
            r1[x2] = m;
        }
    }
#pragma omp parallel for schedule(static)
    for (int x1 = 0; x1 < L; ++x1) {
        double* row = v + std::size_t(x1) * L;
        for (int i : bonds) {
            const double m = 0.5 * (row[i] + row[i + 1]);
            row[i] = m;
            row[i + 1] = m;
        }
    }
    if (a != 0.0)
        for (int b = 0; b < nb; ++b) add_singlet(v, L, bonds[b], a * dots[b]);
}

void check_L(int L) {
    if (L < 2 || L % 2 != 0) throw ConfigError("magnon: L must be an even integer >= 2");
}

double right_right_overlap(const std::vector<double>& w, int L) {
    double m = 0.0;
    for (int x1 = L / 2; x1 < L; ++x1)
        for (int x2 = L / 2; x2 < L; ++x2) m += w[std::size_t(x1) * L + x2];
    return m;
}

// Open-chain H_1 = 1/2 sum_x (|x> - |x+1>)(<x| - <x+1|) applied along one axis of an
// L x L array, accumulating -H_1 v into out.
void minus_h1_rows(const double* v, double* out, int L) {
#pragma omp parallel for schedule(static)
    for (int x1 = 0; x1 < L; ++x1) {
        const double* r = v + std::size_t(x1) * L;
        double* o = out + std::size_t(x1) * L;
        for (int x2 = 0; x2 < L; ++x2) {
            double acc = 0.0;
            if (x2 + 1 < L) acc += 0.5 * (r[x2 + 1] - r[x2]);
            if (x2 > 0) acc += 0.5 * (r[x2 - 1] - r[x2]);
            o[x2] += acc;
        }
    }
}

void minus_h1_cols(const double* v, double* out, int L) {
#pragma omp parallel for schedule(static)
    for (int x1 = 0; x1 < L; ++x1) {
        const double* r = v + std::size_t(x1) * L;
        double* o = out + std::size_t(x1) * L;
        const double* up = x1 > 0 ? r - L : nullptr;
        const double* dn = x1 + 1 < L ? r + L : nullptr;
        for (int x2 = 0; x2 < L; ++x2) {
            double acc = 0.0;
            if (dn) acc += 0.5 * (dn[x2] - r[x2]);
            if (up) acc += 0.5 * (up[x2] - r[x2]);
            o[x2] += acc;
        }
    }
}

// Generator of the pair (w, U): dw/dt = -H_2 w + a V U, dU/dt = -H_0 U, where
// H_0 = H_1 x 1 + 1 x H_1 and V = sum_x |v_x><v_x|.
void apply_generator(const std::vector<double>& w, const std::vector<double>& U, std::vector<double>& dw,
                     std::vector<double>& dU, int L, double a) {
    std::fill(dw.begin(), dw.end(), 0.0);
    std::fill(dU.begin(), dU.end(), 0.0);
    minus_h1_rows(w.data(), dw.data(), L);
    minus_h1_cols(w.data(), dw.data(), L);
    minus_h1_rows(U.data(), dU.data(), L);
    minus_h1_cols(U.data(), dU.data(), L);
    if (a == 0.0) return;
    for (int x = 0; x + 1 < L; ++x) {
        const double c = singlet_overlap(w.data(), L, x) + singlet_overlap(U.data(), L, x);
        add_singlet(dw.data(), L, x, a * c);
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

void layer_apply_one_magnon(std::span<double> vec, Parity parity) {
    const int L = int(vec.size());
    for (int i : layer_bonds(L, parity)) {
        const double m = 0.5 * (vec[i] + vec[i + 1]);
        vec[i] = m;
        vec[i + 1] = m;
    }
}

void layer_apply_two_magnon(std::span<double> vec, int L, Parity parity, double a) {
    check_L(L);
    two_magnon_layer(vec, L, parity, a, nullptr);
}

std::vector<double> m_series_discrete(int L, int t_max, double a, bool enforce_guard) {
    check_L(L);
    if (t_max < 0) throw ConfigError("m_series_discrete: t must be non-negative");
    if (!(a >= 0.0 && a < 1.0)) throw ConfigError("m_series_discrete: a must lie in [0, 1)");
    if (enforce_guard && t_max > boundary_guard_limit(L))
        throw ConfigError("m_series_discrete: t = " + std::to_string(t_max) + " exceeds the boundary guard " +
                          std::to_string(boundary_guard_limit(L)) + " for L = " + std::to_string(L));

    // u = T_1(t)|l>, w = (T_2(t) - T_1(t) x T_1(t)) |l,l>.
    std::vector<double> u(static_cast<std::size_t>(L), 0.0);
    std::fill(u.begin(), u.begin() + L / 2, 1.0);
    std::vector<double> w(std::size_t(L) * L, 0.0);
    std::vector<double> source;
    std::vector<double> out{0.0};
    for (int step = 1; step <= t_max; ++step) {
        for (Parity p : {Parity::even, Parity::odd}) {
            const auto bonds = layer_bonds(L, p);
            source.resize(bonds.size());
            // <v_i | u x u> = (u_i - u_{i+1})^2 / 2
            for (std::size_t b = 0; b < bonds.size(); ++b) {
                const double d = u[bonds[b]] - u[bonds[b] + 1];
                source[b] = 0.5 * d * d;
            }
            two_magnon_layer(w, L, p, a, &source);
            layer_apply_one_magnon(u, p);
        }
        out.push_back(right_right_overlap(w, L));
    }
    return out;
}

double m_of_t_discrete(int L, int t, double a, bool enforce_guard) {
    return m_series_discrete(L, t, a, enforce_guard).back();
}

std::vector<double> m_series_hamiltonian(int L, std::span<const double> times, double a) {
    check_L(L);
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("m_series_hamiltonian: a must lie in [0, 1]");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0.0) || (k > 0 && times[k] < times[k - 1]))
            throw ConfigError("m_series_hamiltonian: times must be non-negative and non-decreasing");
    }
    constexpr double kMaxStep = 0.5;
    constexpr double kTermTolerance = 1e-15;
    constexpr int kMaxTerms = 80;

    const std::size_t n = std::size_t(L) * L;
    std::vector<double> w(n, 0.0), U(n, 0.0);
    for (int x1 = 0; x1 < L / 2; ++x1)
        for (int x2 = 0; x2 < L / 2; ++x2) U[std::size_t(x1) * L + x2] = 1.0;
    std::vector<double> tw(n), tU(n), nw(n), nU(n);

    auto step = [&](double dt) {
        tw = w;
        tU = U;
        const double scale = std::max(max_abs(w), max_abs(U));
        for (int k = 1;; ++k) {
            if (k > kMaxTerms)
                throw NumericalError("m_series_hamiltonian: Taylor step failed to converge (dt = " +
                                     std::to_string(dt) + ")");
            apply_generator(tw, tU, nw, nU, L, a);
            const double f = dt / k;
            for (std::size_t i = 0; i < n; ++i) {
                tw[i] = f * nw[i];
                tU[i] = f * nU[i];
                w[i] += tw[i];
                U[i] += tU[i];
            }
            if (std::max(max_abs(tw), max_abs(tU)) <= kTermTolerance * scale) break;
        }
    };

    std::vector<double> out;
    double now = 0.0;
    for (double target : times) {
        while (target - now > 1e-12) {
            const double dt = std::min(kMaxStep, target - now);
            step(dt);
            now += dt;
        }
        out.push_back(right_right_overlap(w, L));
    }
    return out;
}

double m_of_t_hamiltonian(int L, double t, double a) {
    const double times[1] = {t};
    return m_series_hamiltonian(L, times, a).front();
}

double antisymmetric_sector_check(int L, double a, int p1, int p2, bool symmetric) {
    check_L(L);
    using cplx = std::complex<double>;
    const double k1 = 2.0 * std::numbers::pi * p1 / L, k2 = 2.0 * std::numbers::pi * p2 / L;
    const double sign = symmetric ? 1.0 : -1.0;
    auto idx = [L](int x1, int x2) { return std::size_t((x1 % L + L) % L) * L + std::size_t((x2 % L + L) % L); };
    std::vector<cplx> psi(std::size_t(L) * L), h(std::size_t(L) * L, 0.0);
    for (int x1 = 0; x1 < L; ++x1)
        for (int x2 = 0; x2 < L; ++x2)
            psi[idx(x1, x2)] = std::polar(1.0, k1 * x1 + k2 * x2) + sign * std::polar(1.0, k1 * x2 + k2 * x1);
    // Periodic H_1 per chain: v_x - (v_{x+1} + v_{x-1}) / 2.
    for (int x1 = 0; x1 < L; ++x1) {
        for (int x2 = 0; x2 < L; ++x2) {
            const cplx c = psi[idx(x1, x2)];
            h[idx(x1, x2)] = 2.0 * c - 0.5 * (psi[idx(x1 + 1, x2)] + psi[idx(x1 - 1, x2)] + psi[idx(x1, x2 + 1)] +
                                              psi[idx(x1, x2 - 1)]);
        }
    }
    for (int x = 0; x < L; ++x) {
        const cplx ov =
            0.5 * (psi[idx(x, x)] - psi[idx(x + 1, x)] - psi[idx(x, x + 1)] + psi[idx(x + 1, x + 1)]);
        const cplx c = -a * 0.5 * ov;
        h[idx(x, x)] += c;
        h[idx(x + 1, x)] -= c;
        h[idx(x, x + 1)] -= c;
        h[idx(x + 1, x + 1)] += c;
    }
    const double e = 2.0 - std::cos(k1) - std::cos(k2);
    double res = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) res = std::max(res, std::abs(h[i] - e * psi[i]));
    return res;
}

}  // namespace chargefcs::magnon
