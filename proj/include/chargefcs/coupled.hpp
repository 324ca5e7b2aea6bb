#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "chargefcs/core.hpp"
#include "chargefcs/gate.hpp"
#include "chargefcs/transfer.hpp"

namespace chargefcs::coupled {

/// Per-trajectory transfer counters of an n-chain run, sample-major.
class CoupledSamples {
public:
    CoupledSamples(int n_chains, std::vector<std::int32_t> q) : n_chains_(n_chains), q_(std::move(q)) {}

    int n_chains() const { return n_chains_; }
    std::uint64_t n_samples() const { return q_.size() / std::size_t(n_chains_); }
    std::int32_t at(std::uint64_t sample, int chain) const { return q_[sample * n_chains_ + chain]; }
    std::span<const std::int32_t> raw() const { return q_; }

    Histogram marginal(int chain) const;
    /// Joint histogram keyed by the tuple (Q_1, ..., Q_n).
    std::map<std::vector<std::int64_t>, std::uint64_t> joint_histogram() const;

private:
    int n_chains_;
    std::vector<std::int32_t> q_;
};

/// The gate used by every coupled engine: build_pair_gate(params.n_chains, a_of_d(params.d)).
PairGateTable gate_for(const ModelParams& params);

/// Monte Carlo of the n-chain model. Chains start i.i.d. from the biased product state;
/// each window draws one uniform when more than one outcome is possible. Parallel over
/// trajectories; output does not depend on the thread count.
CoupledSamples coupled_mc_run(const ModelParams& params, std::uint64_t n_samples, std::uint64_t first_sample = 0);
/// Same trajectories, serial loop.
CoupledSamples coupled_mc_run_reference(const ModelParams& params, std::uint64_t n_samples,
                                        std::uint64_t first_sample = 0);

/// Exact Z(lambda_1, ..., lambda_n); rejects 2^(n L) > kMaxExactStates with ResourceError.
std::complex<double> exact_coupled_cgf(const ModelParams& params, std::span<const double> lambdas);

/// Circuit-averaged variance E[Q1^2] - E[Q1 Q2] (n_chains = 2).
double c2bar_exact(const ModelParams& params);
CumulantEstimate c2bar_mc(const CoupledSamples& samples);

/// C2_SEP - C2bar = E[Q1 Q2] - E[Q1] E[Q2], exact, for t = 0..t_max.
std::vector<double> dc2_exact_series(const ModelParams& params, int t_max);

/// Circuit-averaged third cumulant E[Q^3] - 3 E[Q^2 Q'] + 2 E[Q Q' Q''] (n_chains = 3).
double c3bar_exact(const ModelParams& params);
CumulantEstimate c3bar_mc(const CoupledSamples& samples);

}  // namespace chargefcs::coupled
