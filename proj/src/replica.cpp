#include "chargefcs/replica.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "chargefcs/core.hpp"
#include "chargefcs/gate.hpp"
#include "chargefcs/rng.hpp"

namespace chargefcs::replica {
namespace {

using cplx = std::complex<double>;

int config_of(const std::array<int, 2>& q) { return q[0] | (q[1] << 1); }
int charge_of_config(int c) { return (c & 1) + ((c >> 1) & 1); }

// Two-site basis of one replica: index s_x * 2d + s_y with site state q * d + k.
struct WindowBasis {
    int d;
    int dim;
    std::vector<int> config;  // per basis state

    explicit WindowBasis(int d_) : d(d_), dim(4 * d_ * d_), config(static_cast<std::size_t>(4 * d_ * d_)) {
        for (int s = 0; s < dim; ++s) {
            const int sx = s / (2 * d), sy = s % (2 * d);
            config[s] = (sx / d) | ((sy / d) << 1);
        }
    }
    std::vector<int> members_of_config(int c) const {
        std::vector<int> m;
        for (int s = 0; s < dim; ++s)
            if (config[s] == c) m.push_back(s);
        return m;
    }
    std::vector<int> members_of_sector(int Q) const {
        std::vector<int> m;
        for (int s = 0; s < dim; ++s)
            if (charge_of_config(config[s]) == Q) m.push_back(s);
        return m;
    }
};

void check_d(int d) {
    if (d < 1) throw ConfigError("replica: d must be a positive integer");
}

// 2x2 Weingarten matrix for one (Q1, Q2) sector pair, indexed by (sigma, tau).
Eigen::Matrix2d weingarten_block(int Q1, int Q2, double d) {
    const double D1 = sector_dimension(Q1, d), D2 = sector_dimension(Q2, d);
    if (Q1 == Q2 && D1 == 1.0) {
        // identity and swap sector states coincide; invert the Gram matrix on its range
        Eigen::Matrix2d gram;
        gram << D1 * D2, D1, D1, D1 * D2;
        return gram.completeOrthogonalDecomposition().pseudoInverse();
    }
    Eigen::Matrix2d w;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) w(s, t) = weingarten_weight(Pairing(s), Pairing(t), Q1, Q2, d);
    return w;
}

// <Q1,Q2; tau | state> for unnormalized sector pairing states, from trace identities on
// the diagonal charge projectors.
double sector_overlap_traces(const WindowBasis& wb, int Q1, int Q2, Pairing tau, const PairedState& s) {
    const int c1 = config_of(s.q[0]), c2 = config_of(s.q[1]);
    if (charge_of_config(c1) != Q1 || charge_of_config(c2) != Q2) return 0.0;
    const double n1 = double(wb.members_of_config(c1).size());
    const double n2 = double(wb.members_of_config(c2).size());
    const double norm = 1.0 / (double(wb.d) * wb.d);
    if (tau == s.sigma) return norm * n1 * n2;  // Tr(P Pi_1) Tr(P Pi_2)
    return c1 == c2 ? norm * n1 : 0.0;         // Tr(P Pi_1 P Pi_2)
}

std::size_t flat(int D, int i1, int i2, int j1, int j2) {
    return ((std::size_t(i1) * D + i2) * D + j1) * D + j2;
}

std::vector<double> sector_vector(const WindowBasis& wb, int Q1, int Q2, Pairing tau) {
    const int D = wb.dim;
    std::vector<double> v(std::size_t(D) * D * D * D, 0.0);
    for (int a : wb.members_of_sector(Q1))
        for (int b : wb.members_of_sector(Q2)) v[tau == Pairing::identity ? flat(D, a, b, a, b) : flat(D, a, b, b, a)] = 1.0;
    return v;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

template <class Overlap>
RealMatrix assemble(int d, Overlap&& overlap) {
    RealMatrix g(kPairedBasisSize, kPairedBasisSize);
    for (int Q1 = 0; Q1 <= 2; ++Q1) {
        for (int Q2 = 0; Q2 <= 2; ++Q2) {
            const Eigen::Matrix2d w = weingarten_block(Q1, Q2, double(d));
            for (int out = 0; out < kPairedBasisSize; ++out) {
                const auto so = PairedState::from_index(out);
                const double bo[2] = {overlap(Q1, Q2, Pairing::identity, so, out),
                                      overlap(Q1, Q2, Pairing::swap, so, out)};
                if (bo[0] == 0.0 && bo[1] == 0.0) continue;
                for (int in = 0; in < kPairedBasisSize; ++in) {
                    const auto si = PairedState::from_index(in);
                    const double bi[2] = {overlap(Q1, Q2, Pairing::identity, si, in),
                                          overlap(Q1, Q2, Pairing::swap, si, in)};
                    double acc = 0.0;
                    for (int s = 0; s < 2; ++s)
                        for (int t = 0; t < 2; ++t) acc += w(s, t) * bo[s] * bi[t];
                    g(out, in) += acc;
                }
            }
        }
    }
    return g;
}

Eigen::MatrixXcd haar_block(int n, CounterStream& stream) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd z(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) {
            const double re = normal(stream);
            const double im = normal(stream);
            z(r, c) = cplx(re, im);
        }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd& rr = qr.matrixQR();
    for (int c = 0; c < n; ++c) {
        const cplx r = rr(c, c);
        const double m = std::abs(r);
        q.col(c) *= m > 0 ? r / m : cplx(1.0);
    }
    return q;
}

}  // namespace

int PairedState::index() const {
    return (sigma == Pairing::swap ? 16 : 0) + (config_of(q[0]) | (config_of(q[1]) << 2));
}

PairedState PairedState::from_index(int k) {
    if (k < 0 || k >= kPairedBasisSize) throw ConfigError("PairedState index out of range");
    PairedState s;
    s.sigma = k >= 16 ? Pairing::swap : Pairing::identity;
    const int cfg = k % 16;
    s.q[0] = {cfg & 1, (cfg >> 1) & 1};
    s.q[1] = {(cfg >> 2) & 1, (cfg >> 3) & 1};
    return s;
}

double sector_dimension(int Q, double d) {
    if (Q < 0 || Q > 2) throw ConfigError("sector charge must be 0, 1 or 2");
    return Q == 1 ? 2.0 * d * d : d * d;
}

double weingarten_weight(Pairing sigma, Pairing tau, int Q1, int Q2, double d) {
    if (!(d >= 1.0)) throw ConfigError("weingarten_weight: d must be >= 1");
    const double D1 = sector_dimension(Q1, d), D2 = sector_dimension(Q2, d);
    const bool same = Q1 == Q2;
    if (sigma == tau) {
        const double den = D1 * D2 - (same ? 1.0 : 0.0);
        if (den == 0.0) throw ConfigError("weingarten_weight: singular at d_Q = 1");
        return 1.0 / den;
    }
    if (!same) return 0.0;
    const double den = D1 * (D1 * D1 - 1.0);
    if (den == 0.0) throw ConfigError("weingarten_weight: singular at d_Q = 1");
    return -1.0 / den;
}

std::vector<double> explicit_paired_vector(const PairedState& s, int d) {
    check_d(d);
    if (d > 2) throw ResourceError("explicit paired vectors are limited to d <= 2");
    const WindowBasis wb(d);
    const int D = wb.dim;
    std::vector<double> v(std::size_t(D) * D * D * D, 0.0);
    const double norm = 1.0 / (double(d) * d);
    for (int a : wb.members_of_config(config_of(s.q[0])))
        for (int b : wb.members_of_config(config_of(s.q[1])))
            v[s.sigma == Pairing::identity ? flat(D, a, b, a, b) : flat(D, a, b, b, a)] = norm;
    return v;
}

RealMatrix averaged_gate_paired_traces(int d) {
    check_d(d);
    const WindowBasis wb(d);
    return assemble(d, [&](int Q1, int Q2, Pairing tau, const PairedState& s, int) {
        return sector_overlap_traces(wb, Q1, Q2, tau, s);
    });
}

RealMatrix averaged_gate_paired(int d) {
    check_d(d);
    if (d > 2) return averaged_gate_paired_traces(d);
    const WindowBasis wb(d);
    std::vector<std::vector<double>> states;
    for (int k = 0; k < kPairedBasisSize; ++k) states.push_back(explicit_paired_vector(PairedState::from_index(k), d));
    // Overlaps of every paired state with every sector pairing state, by explicit dot products.
    std::vector<double> ov(std::size_t(9 * 2 * kPairedBasisSize));
    for (int Q1 = 0; Q1 <= 2; ++Q1)
        for (int Q2 = 0; Q2 <= 2; ++Q2)
            for (int tau = 0; tau < 2; ++tau) {
                const auto sv = sector_vector(wb, Q1, Q2, Pairing(tau));
                for (int k = 0; k < kPairedBasisSize; ++k)
                    ov[((std::size_t(Q1) * 3 + Q2) * 2 + tau) * kPairedBasisSize + k] = dot(sv, states[k]);
            }
    return assemble(d, [&](int Q1, int Q2, Pairing tau, const PairedState&, int k) {
        return ov[((std::size_t(Q1) * 3 + Q2) * 2 + int(tau)) * kPairedBasisSize + k];
    });
}

HaarEstimate haar_mc_average(int d, std::uint64_t n_samples, std::uint64_t seed) {
    check_d(d);
    if (n_samples < 2) throw ConfigError("haar_mc_average: need at least two samples");
    const WindowBasis wb(d);
    const int D = wb.dim;
    std::vector<std::vector<int>> members(4), sectors(3);
    for (int c = 0; c < 4; ++c) members[c] = wb.members_of_config(c);
    for (int Q = 0; Q < 3; ++Q) sectors[Q] = wb.members_of_sector(Q);
    const double norm = 1.0 / std::pow(double(d), 4);
    constexpr int N = kPairedBasisSize;
    constexpr std::uint64_t kChunk = 1000;
    const std::uint64_t n_chunks = (n_samples + kChunk - 1) / kChunk;

    // Per chunk: sums of Re, Re^2 and Im for every element.
    std::vector<std::vector<double>> chunk_re(n_chunks), chunk_re2(n_chunks), chunk_im(n_chunks);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ch = 0; ch < std::int64_t(n_chunks); ++ch) {
        std::vector<double> re(N * N, 0.0), re2(N * N, 0.0), im(N * N, 0.0);
        const std::uint64_t lo = std::uint64_t(ch) * kChunk, hi = std::min(n_samples, lo + kChunk);
        for (std::uint64_t k = lo; k < hi; ++k) {
            auto stream = CounterStream::for_sample(seed, EngineId::replica, k);
            Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(D, D);
            for (int Q = 0; Q < 3; ++Q) {
                const auto& idx = sectors[Q];
                const auto blk = haar_block(int(idx.size()), stream);
                for (std::size_t r = 0; r < idx.size(); ++r)
                    for (std::size_t c = 0; c < idx.size(); ++c) U(idx[r], idx[c]) = blk(Eigen::Index(r), Eigen::Index(c));
            }
            // M_c = U Pi_c U^dagger for the four two-site charge configurations.
            std::array<Eigen::MatrixXcd, 4> M;
            for (int c = 0; c < 4; ++c) {
                Eigen::MatrixXcd cols(D, Eigen::Index(members[c].size()));
                for (std::size_t j = 0; j < members[c].size(); ++j) cols.col(Eigen::Index(j)) = U.col(members[c][j]);
                M[c] = cols * cols.adjoint();
            }
            // t1[c'][c] = Tr(Pi_c' M_c); t2[c1'][c1][c2'][c2] = Tr(Pi_c1' M_c1 Pi_c2' M_c2).
            cplx t1[4][4];
            for (int cp = 0; cp < 4; ++cp)
                for (int c = 0; c < 4; ++c) {
                    cplx s = 0.0;
                    for (int i : members[cp]) s += M[c](i, i);
                    t1[cp][c] = s;
                }
            cplx t2[4][4][4][4];
            for (int a1 = 0; a1 < 4; ++a1)
                for (int c1 = 0; c1 < 4; ++c1)
                    for (int a2 = 0; a2 < 4; ++a2)
                        for (int c2 = 0; c2 < 4; ++c2) {
                            cplx s = 0.0;
                            for (int i : members[a1])
                                for (int j : members[a2]) s += M[c1](i, j) * M[c2](j, i);
                            t2[a1][c1][a2][c2] = s;
                        }
            for (int out = 0; out < N; ++out) {
                const auto so = PairedState::from_index(out);
                const int o1 = config_of(so.q[0]), o2 = config_of(so.q[1]);
                for (int in = 0; in < N; ++in) {
                    const auto si = PairedState::from_index(in);
                    const int i1 = config_of(si.q[0]), i2 = config_of(si.q[1]);
                    const cplx v = norm * (so.sigma == si.sigma ? t1[o1][i1] * t1[o2][i2] : t2[o1][i1][o2][i2]);
                    re[out * N + in] += v.real();
                    re2[out * N + in] += v.real() * v.real();
                    im[out * N + in] += v.imag();
                }
            }
        }
        chunk_re[ch] = std::move(re);
        chunk_re2[ch] = std::move(re2);
        chunk_im[ch] = std::move(im);
    }

    HaarEstimate est;
    est.mean = RealMatrix(N, N);
    est.std_error = RealMatrix(N, N);
    est.n_samples = n_samples;
    const double n = double(n_samples);
    for (int e = 0; e < N * N; ++e) {
        double s = 0.0, s2 = 0.0, si = 0.0;
        for (std::uint64_t ch = 0; ch < n_chunks; ++ch) {
            s += chunk_re[ch][e];
            s2 += chunk_re2[ch][e];
            si += chunk_im[ch][e];
        }
        const double mean = s / n;
        est.mean.data[e] = mean;
        est.std_error.data[e] = std::sqrt(std::max(0.0, (s2 / n - mean * mean) / (n - 1.0)));
        est.max_abs_imag = std::max(est.max_abs_imag, std::abs(si / n));
    }
    return est;
}

RealMatrix identity_restricted_gate(int d) {
    const RealMatrix g = averaged_gate_paired(d);
    RealMatrix out(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) out(r, c) = g(r, c);
    return out;
}

double projected_gate_deviation(int d) {
    if (d < 2) throw ConfigError("projected_gate_deviation: d must be an integer >= 2");
    const RealMatrix g = identity_restricted_gate(d);
    const PairGateTable closed = build_pair_gate(2, a_of_d(double(d)));
    double dev = 0.0;
    for (int out = 0; out < 16; ++out)
        for (int in = 0; in < 16; ++in) dev = std::max(dev, std::abs(g(out, in) - closed.prob(in, out)));
    return dev;
}

double singlet_element(int d) {
    const RealMatrix g = identity_restricted_gate(d);
    // v = (|10,10> - |01,10> - |10,01> + |01,01>) / 2 in window-config indices.
    const int idx[4] = {5, 6, 9, 10};
    const double coef[4] = {0.5, -0.5, -0.5, 0.5};
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += coef[i] * g(idx[i], idx[j]) * coef[j];
    return s;
}

}  // namespace chargefcs::replica
