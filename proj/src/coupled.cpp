#include "chargefcs/coupled.hpp"

#include <omp.h>

#include <cmath>

#include "chargefcs/rng.hpp"

namespace chargefcs::coupled {
namespace {

void require_chains(const ModelParams& params, int n, const char* what) {
    params.validate();
    if (params.n_chains != n)
        throw ConfigError(std::string(what) + " requires n_chains = " + std::to_string(n));
}

void trajectory(const ModelParams& params, const PairGateTable& gate, std::uint64_t index, LadderState& state,
                std::span<std::int32_t> q) {
    const int n = params.n_chains, L = params.L;
    auto init = CounterStream::for_sample(params.seed, EngineId::initial_state, index);
    for (int c = 0; c < n; ++c) sample_initial_state(params, init, state.row(c));
    auto stream = CounterStream::for_sample(params.seed, EngineId::coupled, index);
    std::fill(q.begin(), q.end(), 0);
    const int central = params.central_left_site();
    for (int step = 0; step < params.t; ++step) {
        for (Parity parity : {Parity::even, Parity::odd}) {
            for (int i = parity == Parity::even ? 0 : 1; i + 1 < L; i += 2) {
                int in = 0;
                for (int c = 0; c < n; ++c) in |= (state.at(c, i) | (state.at(c, i + 1) << 1)) << (2 * c);
                const auto tr = gate.transitions(in);
                if (tr.size() == 1 && tr[0].out == in) continue;
                const double u = stream.uniform();
                double acc = 0.0;
                int out = tr.back().out;
                for (const auto& t : tr) {
                    acc += t.prob;
                    if (u < acc) {
                        out = t.out;
                        break;
                    }
                }
                if (out == in) continue;
                for (int c = 0; c < n; ++c) {
                    state.set(c, i, std::uint8_t((out >> (2 * c)) & 1));
                    state.set(c, i + 1, std::uint8_t((out >> (2 * c + 1)) & 1));
                    if (i == central) q[c] += PairGateTable::transfer(in, out, c);
                }
            }
        }
    }
}

template <bool Parallel>
CoupledSamples run(const ModelParams& params, std::uint64_t n_samples, std::uint64_t first_sample) {
    params.validate();
    if (n_samples < 1) throw ConfigError("coupled_mc_run: n_samples must be >= 1");
    const PairGateTable gate = gate_for(params);
    const int n = params.n_chains;
    std::vector<std::int32_t> q(n_samples * std::uint64_t(n));
    const auto total = std::int64_t(n_samples);
#pragma omp parallel if (Parallel)
    {
        LadderState state(n, params.L);
#pragma omp for schedule(static)
        for (std::int64_t k = 0; k < total; ++k)
            trajectory(params, gate, first_sample + std::uint64_t(k), state,
                       std::span<std::int32_t>(q.data() + k * n, std::size_t(n)));
    }
    return CoupledSamples(n, std::move(q));
}

CumulantEstimate mean_with_error(const std::vector<double>& f, int order) {
    long double s = 0, s2 = 0;
    for (double v : f) {
        s += v;
        s2 += (long double)v * v;
    }
    const long double n = f.size();
    CumulantEstimate e;
    e.order = order;
    e.n_samples = f.size();
    e.value = double(s / n);
    if (f.size() > 1) e.std_error = double(std::sqrt(std::max<long double>(0, (s2 - s * s / n) / (n - 1)) / n));
    return e;
}

}  // namespace

Histogram CoupledSamples::marginal(int chain) const {
    if (chain < 0 || chain >= n_chains_) throw ConfigError("marginal: chain index out of range");
    Histogram h;
    for (std::uint64_t k = 0; k < n_samples(); ++k) h.add(at(k, chain));
    return h;
}

std::map<std::vector<std::int64_t>, std::uint64_t> CoupledSamples::joint_histogram() const {
    std::map<std::vector<std::int64_t>, std::uint64_t> h;
    std::vector<std::int64_t> key(static_cast<std::size_t>(n_chains_));
    for (std::uint64_t k = 0; k < n_samples(); ++k) {
        for (int c = 0; c < n_chains_; ++c) key[c] = at(k, c);
        ++h[key];
    }
    return h;
}

PairGateTable gate_for(const ModelParams& params) { return build_pair_gate(params.n_chains, a_of_d(params.d)); }

CoupledSamples coupled_mc_run(const ModelParams& params, std::uint64_t n_samples, std::uint64_t first_sample) {
    return run<true>(params, n_samples, first_sample);
}

CoupledSamples coupled_mc_run_reference(const ModelParams& params, std::uint64_t n_samples,
                                        std::uint64_t first_sample) {
    return run<false>(params, n_samples, first_sample);
}

std::complex<double> exact_coupled_cgf(const ModelParams& params, std::span<const double> lambdas) {
    params.validate();
    return exact_mgf(gate_for(params), params.L, params.t, params.mu, lambdas);
}

double c2bar_exact(const ModelParams& params) {
    require_chains(params, 2, "c2bar_exact");
    const auto m = exact_moments(gate_for(params), params.L, params.t, params.mu, 2);
    return m.moment({2, 0}) - m.moment({1, 1});
}

CumulantEstimate c2bar_mc(const CoupledSamples& samples) {
    if (samples.n_chains() != 2) throw ConfigError("c2bar_mc requires two chains");
    std::vector<double> f(samples.n_samples());
    for (std::uint64_t k = 0; k < f.size(); ++k) {
        const double a = samples.at(k, 0), b = samples.at(k, 1);
        f[k] = 0.5 * (a * a + b * b) - a * b;
    }
    return mean_with_error(f, 2);
}

std::vector<double> dc2_exact_series(const ModelParams& params, int t_max) {
    require_chains(params, 2, "dc2_exact_series");
    const auto series = exact_moment_series(gate_for(params), params.L, t_max, params.mu, 2);
    std::vector<double> out;
    for (const auto& m : series) out.push_back(m.moment({1, 1}) - m.moment({1, 0}) * m.moment({0, 1}));
    return out;
}

double c3bar_exact(const ModelParams& params) {
    require_chains(params, 3, "c3bar_exact");
    const auto m = exact_moments(gate_for(params), params.L, params.t, params.mu, 3);
    return m.moment({3, 0, 0}) - 3.0 * m.moment({2, 1, 0}) + 2.0 * m.moment({1, 1, 1});
}

CumulantEstimate c3bar_mc(const CoupledSamples& samples) {
    if (samples.n_chains() != 3) throw ConfigError("c3bar_mc requires three chains");
    std::vector<double> f(samples.n_samples());
    for (std::uint64_t k = 0; k < f.size(); ++k) {
        const double q[3] = {double(samples.at(k, 0)), double(samples.at(k, 1)), double(samples.at(k, 2))};
        double cube = 0.0, mixed = 0.0;
        for (int a = 0; a < 3; ++a) {
            cube += q[a] * q[a] * q[a];
            for (int b = 0; b < 3; ++b)
                if (a != b) mixed += q[a] * q[a] * q[b];
        }
        f[k] = cube / 3.0 - 3.0 * mixed / 6.0 + 2.0 * q[0] * q[1] * q[2];
    }
    return mean_with_error(f, 3);
}

}  // namespace chargefcs::coupled
