#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "chargefcs/core.hpp"
#include "chargefcs/rng.hpp"

namespace chargefcs::quantum {

using cplx = std::complex<double>;
/// 4x4 gate in the basis |11>, |10>, |01>, |00> (left site first), row = out.
using GateMatrix = std::array<std::array<cplx, 4>, 4>;

/// Largest chain the statevector engines accept.
inline constexpr int kMaxQuantumSites = 24;
/// Largest chain for exact basis-state summation in cgf_mixed_equilibrium.
inline constexpr int kMaxExactTraceSites = 12;

struct GateParams {
    double xi = 0.0;
    double alpha = 0.0, psi = 0.0, chi_phase = 0.0, rho_phase = 0.0;
};

/// xi ~ U(0, 1), then alpha, psi, chi, rho ~ U(0, 2 pi), drawn in that order.
GateParams sample_gate(CounterStream& stream);
GateMatrix gate_matrix(const GateParams& g);
/// Central-bond gate: the |10> -> |01> (left to right) amplitude picks up e^{-i lambda/2}
/// and |01> -> |10> picks up e^{+i lambda/2}.
GateMatrix counting_gate(const GateParams& g, double lambda);
/// max |U^dagger U - 1|.
double unitarity_residual(const GateMatrix& u);

/// Brick-wall circuit: gates()[step][parity][k] acts on bond layer_bonds(L, parity)[k].
/// A circuit of depth t is a prefix of any deeper circuit with the same seed and index.
class Circuit {
public:
    Circuit(int L, int depth, std::uint64_t seed, std::uint64_t circuit_index);
    /// Explicit gates, laid out as in gate(); used by tests.
    Circuit(int L, int depth, std::vector<GateParams> gates);

    int L() const { return L_; }
    int depth() const { return depth_; }
    int central_bond() const { return L_ / 2 - 1; }
    const GateParams& gate(int step, int parity, int k) const;

private:
    int L_, depth_, even_, odd_;
    std::vector<GateParams> gates_;
};

/// Per-circuit cumulant generating function chi = log Z on a lambda grid at several times.
/// The phase of Z is unwrapped along the grid starting from the point nearest lambda = 0,
/// so the grid must be fine enough that arg Z moves by less than pi between neighbours.
struct CgfGrid {
    std::vector<double> lambdas;
    std::vector<int> times;
    std::vector<cplx> z;    // [time][lambda]
    std::vector<cplx> chi;  // [time][lambda]

    cplx z_at(std::size_t ti, std::size_t li) const { return z[ti * lambdas.size() + li]; }
    cplx chi_at(std::size_t ti, std::size_t li) const { return chi[ti * lambdas.size() + li]; }
};

/// chi = log Z with the phase unwrapped along `lambdas` (ascending) from the point
/// nearest zero.
std::vector<cplx> unwrap_log(std::span<const double> lambdas, std::span<const cplx> z);

/// Domain-wall initial state |1..10..0>. Z(lambda) = <psi(lambda)|psi(-lambda)>, the
/// convention under which a left-to-right hop carries e^{+i lambda}. Works in the
/// L/2-particle sector. Parallel over lambda. `times` ascending, each <= depth.
/// Only mu = +inf is accepted; ResourceError for L > kMaxQuantumSites.
CgfGrid cgf_pure(const Circuit& c, std::span<const double> lambdas, std::span<const int> times,
                 ChemicalPotential mu = ChemicalPotential::infinity());
/// Full 2^L statevector, serial, dense 4x4 action per bond. Same contract as cgf_pure.
CgfGrid cgf_pure_reference(const Circuit& c, std::span<const double> lambdas, std::span<const int> times);

/// <N_right(t)> - <N_right(0)> for the domain wall, computed from occupation numbers.
double mean_transfer(const Circuit& c, int t);

struct MixedEstimate {
    cplx z;
    double std_error = 0.0;  // 0 when exact
    bool exact = true;
    int n_vectors = 0;
};

/// Z(lambda) = 2^-L sum_s <U(lambda) s|U(-lambda) s> for rho_0 = 1 / 2^L. Exact sum over
/// basis states for L <= kMaxExactTraceSites, otherwise an average over `n_vectors`
/// random +-1 vectors per charge sector (seeded by `seed`) with its standard error.
MixedEstimate cgf_mixed_equilibrium(const Circuit& c, double lambda, int n_vectors = 16, std::uint64_t seed = 1);

struct DecayFit {
    std::vector<int> times;
    /// Circuit average of int dlambda |chi - chi_SEP|^2 / t, per time.
    std::vector<double> deviation;
    double slope = 0.0;
};

/// int dlambda |chi - sqrt(t) F(omega)|^2 / t for one circuit, per time of the grid
/// (trapezoid rule, domain-wall SEP asymptote).
std::vector<double> circuit_deviation(const CgfGrid& grid);

/// Trapezoid quadrature over each grid of |chi - sqrt(t) F(omega)|^2 / t against the
/// domain-wall SEP asymptote, averaged over the ensemble; log-log slope over times.
/// All grids must share lambdas and times.
DecayFit fluctuation_decay(std::span<const CgfGrid> ensemble);

struct EnsembleConfig {
    int L = 20;
    std::vector<int> times{8, 12, 16, 20, 24};
    std::vector<double> lambdas;
    int n_circuits = 35;
    std::uint64_t seed = 20230101;
    std::uint64_t first_circuit = 0;
};

/// One CgfGrid per circuit, circuits keyed by index (first_circuit + k).
std::vector<CgfGrid> run_ensemble(const EnsembleConfig& cfg);
/// Element-wise mean of chi over the ensemble.
std::vector<cplx> mean_chi(std::span<const CgfGrid> ensemble);

}  // namespace chargefcs::quantum
