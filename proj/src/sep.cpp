#include "chargefcs/sep.hpp"

#include <omp.h>

#include <cmath>

#include "chargefcs/stats.hpp"

namespace chargefcs::sep {
namespace {

constexpr std::uint64_t kEvenPairs = 0x5555555555555555ULL;
constexpr std::uint64_t kOddInnerPairs = 0x2AAAAAAAAAAAAAAAULL;

// Per-L masks of bond-left bits that have a partner inside the chain.
struct PackedLayout {
    int L = 0;
    int blocks = 0;
    int central = 0;
    std::vector<std::uint64_t> even_mask, odd_mask;
    std::vector<std::uint8_t> straddle;  // block b's bit 63 pairs with block b+1's bit 0

    explicit PackedLayout(int L_) : L(L_), blocks((L_ + 63) / 64), central(L_ / 2 - 1) {
        even_mask.assign(std::size_t(blocks), 0);
        odd_mask.assign(std::size_t(blocks), 0);
        straddle.assign(std::size_t(blocks), 0);
        for (int i = 0; i + 1 < L; ++i) {
            const int b = i / 64, k = i % 64;
            if (i % 2 == 0) {
                even_mask[b] |= std::uint64_t(1) << k;
            } else if (k == 63) {
                straddle[b] = 1;
            } else {
                odd_mask[b] |= std::uint64_t(1) << k;
            }
        }
        for (int b = 0; b < blocks; ++b) {
            even_mask[b] &= kEvenPairs;
            odd_mask[b] &= kOddInnerPairs;
        }
    }
};

inline int bit_at(const std::uint64_t* s, int i) { return int((s[i >> 6] >> (i & 63)) & 1); }

std::int64_t packed_trajectory(const PackedLayout& lay, const ModelParams& params, std::uint64_t index,
                               std::vector<std::uint8_t>& row, std::vector<std::uint64_t>& s,
                               std::vector<std::uint64_t>& r) {
    auto init = CounterStream::for_sample(params.seed, EngineId::initial_state, index);
    sample_initial_state(params, init, row);
    std::fill(s.begin(), s.end(), 0);
    for (int x = 0; x < lay.L; ++x) s[x >> 6] |= std::uint64_t(row[x]) << (x & 63);

    auto stream = CounterStream::for_sample(params.seed, EngineId::sep, index);
    const int c = lay.central;
    const bool central_even = c % 2 == 0;
    std::int64_t q = 0;
    for (int step = 0; step < params.t; ++step) {
        // even half-layer
        for (int b = 0; b < lay.blocks; ++b) r[b] = stream();
        if (central_even && ((r[c >> 6] >> (c & 63)) & 1)) {
            const int l = bit_at(s.data(), c), rr = bit_at(s.data(), c + 1);
            q += l - rr;
        }
        for (int b = 0; b < lay.blocks; ++b) {
            const std::uint64_t x = s[b] ^ (s[b] >> 1);
            const std::uint64_t dd = x & lay.even_mask[b] & r[b];
            s[b] ^= dd | (dd << 1);
        }
        // odd half-layer
        for (int b = 0; b < lay.blocks; ++b) r[b] = stream();
        if (!central_even && ((r[c >> 6] >> (c & 63)) & 1)) {
            const int l = bit_at(s.data(), c), rr = bit_at(s.data(), c + 1);
            q += l - rr;
        }
        for (int b = 0; b < lay.blocks; ++b) {
            if (lay.straddle[b] && (r[b] >> 63)) {
                const std::uint64_t hi = s[b] >> 63, lo = s[b + 1] & 1;
                if (hi != lo) {
                    s[b] ^= std::uint64_t(1) << 63;
                    s[b + 1] ^= 1;
                }
            }
            const std::uint64_t x = s[b] ^ (s[b] >> 1);
            const std::uint64_t dd = x & lay.odd_mask[b] & r[b];
            s[b] ^= dd | (dd << 1);
        }
    }
    return q;
}

}  // namespace

std::int64_t sample_transfer(const ModelParams& params, std::uint64_t sample_index) {
    params.validate();
    const PackedLayout lay(params.L);
    std::vector<std::uint8_t> row(std::size_t(params.L));
    std::vector<std::uint64_t> s(std::size_t(lay.blocks)), r(std::size_t(lay.blocks));
    return packed_trajectory(lay, params, sample_index, row, s, r);
}

SepRunResult run_sep_fcs(const SepRunConfig& config) {
    const ModelParams& params = config.params;
    params.validate();
    if (config.n_samples < 1) throw ConfigError("run_sep_fcs: n_samples must be >= 1");
    const PackedLayout lay(params.L);
    const int t = params.t;
    std::vector<std::uint64_t> counts(std::size_t(2 * t + 1), 0);
    const auto n = std::int64_t(config.n_samples);

#pragma omp parallel
    {
        std::vector<std::uint64_t> local(counts.size(), 0);
        std::vector<std::uint8_t> row(std::size_t(params.L));
        std::vector<std::uint64_t> s(std::size_t(lay.blocks)), r(std::size_t(lay.blocks));
#pragma omp for schedule(static)
        for (std::int64_t k = 0; k < n; ++k) {
            const std::int64_t q = packed_trajectory(lay, params, config.first_sample + std::uint64_t(k), row, s, r);
            ++local[std::size_t(q + t)];
        }
#pragma omp critical
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
    }

    SepRunResult out;
    for (std::size_t i = 0; i < counts.size(); ++i) out.histogram.add(std::int64_t(i) - t, counts[i]);
    for (double lambda : config.lambda_grid) out.cgf.push_back(empirical_cgf(out.histogram, lambda));
    return out;
}

KurtosisProxy kurtosis_proxy(std::span<const Histogram> ensemble) {
    if (ensemble.empty()) throw ConfigError("kurtosis_proxy: empty ensemble");
    std::vector<double> num, den;
    for (const auto& h : ensemble) {
        if (h.empty()) throw ConfigError("kurtosis_proxy: empty histogram in ensemble");
        const auto m = central_moments(h);
        num.push_back(m.mu4);
        den.push_back(m.mu2 * m.mu2);
    }
    const auto r = jackknife_ratio(num, den);
    return {r.value, r.std_error, ensemble.size()};
}

std::complex<double> exact_sep_cgf(const ModelParams& params, double lambda) {
    params.validate();
    if (params.L > kMaxExactSepSites)
        throw ResourceError("exact_sep_cgf: L = " + std::to_string(params.L) + " exceeds the cap of " +
                            std::to_string(kMaxExactSepSites));
    const double lam[1] = {lambda};
    return exact_mgf(build_pair_gate(1, 0.0), params.L, params.t, params.mu, lam);
}

MomentTable exact_sep_moments(const ModelParams& params, int order) {
    params.validate();
    if (params.L > kMaxExactSepSites)
        throw ResourceError("exact_sep_moments: L = " + std::to_string(params.L) + " exceeds the cap of " +
                            std::to_string(kMaxExactSepSites));
    return exact_moments(build_pair_gate(1, 0.0), params.L, params.t, params.mu, order);
}

std::vector<double> mean_transfer_series(int L, int t_max, ChemicalPotential mu) {
    if (L <= 0 || L % 2 != 0) throw ConfigError("mean_transfer_series: L must be a positive even integer");
    if (t_max < 0) throw ConfigError("mean_transfer_series: t_max must be non-negative");
    std::vector<double> n(static_cast<std::size_t>(L));
    for (int x = 0; x < L; ++x) n[x] = x < L / 2 ? mu.density() : mu.negated().density();
    const int c = L / 2 - 1;
    std::vector<double> out{0.0};
    double q = 0.0;
    for (int step = 1; step <= t_max; ++step) {
        for (Parity p : {Parity::even, Parity::odd}) {
            for (int i : layer_bonds(L, p)) {
                if (i == c) q += 0.5 * (n[i] - n[i + 1]);
                const double avg = 0.5 * (n[i] + n[i + 1]);
                n[i] = n[i + 1] = avg;
            }
        }
        out.push_back(q);
    }
    return out;
}

}  // namespace chargefcs::sep
