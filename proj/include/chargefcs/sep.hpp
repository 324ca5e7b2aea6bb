#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "chargefcs/core.hpp"
#include "chargefcs/gate.hpp"
#include "chargefcs/rng.hpp"
#include "chargefcs/transfer.hpp"

namespace chargefcs::sep {

/// One half-layer of the discrete-time SEP on a single chain. Draws ceil(L/64) words from
/// `stream`; the bond starting at site i swaps when bit i%64 of word i/64 is set. A swap
/// across the central bond that moves a charge adds +1 (left -> right) or -1 to `transfer`.
void brickwall_step(std::span<std::uint8_t> row, Parity parity, CounterStream& stream, std::int64_t& transfer);
void brickwall_step(std::span<std::uint8_t> row, Parity parity, CounterStream& stream, TransferRecord& record);

struct SepRunConfig {
    ModelParams params;
    std::uint64_t n_samples = 100'000;
    /// Trajectory k uses the streams of sample index first_sample + k, so disjoint
    /// batches of one master seed are independent.
    std::uint64_t first_sample = 0;
    std::vector<double> lambda_grid;
};

struct SepRunResult {
    Histogram histogram;
    /// Empirical CGF on config.lambda_grid (empty if no grid was given).
    std::vector<std::complex<double>> cgf;
};

/// Bit-packed kernel, parallel over trajectories with OpenMP. Output does not depend on
/// the thread count.
SepRunResult run_sep_fcs(const SepRunConfig& config);
/// Serial per-site implementation consuming the same random draws; bit-identical output.
SepRunResult run_sep_fcs_reference(const SepRunConfig& config);

/// Transfer of a single trajectory (packed and per-site versions).
std::int64_t sample_transfer(const ModelParams& params, std::uint64_t sample_index);
std::int64_t sample_transfer_reference(const ModelParams& params, std::uint64_t sample_index);

/// kappa~ = mean(mu_4) / mean(mu_2^2) over an ensemble of histograms, with a jackknife
/// error over ensemble members.
struct KurtosisProxy {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_members = 0;
};
KurtosisProxy kurtosis_proxy(std::span<const Histogram> ensemble);

/// Exact Z(lambda, t) from the tilted transfer operator; L <= 14.
std::complex<double> exact_sep_cgf(const ModelParams& params, double lambda);
/// Exact raw moments E[Q^k], k <= order.
MomentTable exact_sep_moments(const ModelParams& params, int order);

/// Exact mean transfer <Q>(t) for t = 0..t_max from the mean density profile, any L.
std::vector<double> mean_transfer_series(int L, int t_max, ChemicalPotential mu);

inline constexpr int kMaxExactSepSites = 14;

}  // namespace chargefcs::sep
