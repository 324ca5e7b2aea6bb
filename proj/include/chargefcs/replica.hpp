#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace chargefcs::replica {

enum class Pairing : std::uint8_t { identity, swap };

/// Two-replica paired state on a two-site window. q[r] = (q_x, q_y) is the charge
/// configuration carried by the pair that starts at replica r; with the swap pairing
/// replica r is contracted with the conjugate of the other replica.
struct PairedState {
    Pairing sigma = Pairing::identity;
    std::array<std::array<int, 2>, 2> q{};

    /// Position in paired_basis(): sigma * 16 + config, where config packs replica r's
    /// (q_x, q_y) into bits 2r and 2r+1 (the same layout as PairGateTable windows).
    int index() const;
    static PairedState from_index(int k);
};

inline constexpr int kPairedBasisSize = 32;

/// Small dense real matrix, row-major.
struct RealMatrix {
    int rows = 0, cols = 0;
    std::vector<double> data;

    RealMatrix() = default;
    RealMatrix(int r, int c) : rows(r), cols(c), data(std::size_t(r) * c, 0.0) {}
    double& operator()(int r, int c) { return data[std::size_t(r) * cols + c]; }
    double operator()(int r, int c) const { return data[std::size_t(r) * cols + c]; }
};

/// Dimension of the two-site charge-Q sector: d^2, 2 d^2, d^2 for Q = 0, 1, 2.
double sector_dimension(int Q, double d);

/// Weingarten weight W_{sigma,tau}(Q1, Q2) for two replicas. Throws ConfigError when the
/// weight is singular (d_Q = 1, i.e. d = 1 with Q1 = Q2 in {0, 2}).
double weingarten_weight(Pairing sigma, Pairing tau, int Q1, int Q2, double d);

/// <out| E[U x U x U* x U*] |in> between normalized paired states, rows = out.
/// Built from the Weingarten expansion; sectors whose Gram matrix is singular (d = 1)
/// use its pseudo-inverse. For d <= 2 the overlaps come from explicit (2d)^8 vectors,
/// otherwise from trace identities.
RealMatrix averaged_gate_paired(int d);
/// Same, always through trace identities (used to cross-check the explicit path).
RealMatrix averaged_gate_paired_traces(int d);

/// Explicit vector of a normalized paired state in the (2d)^8-dimensional replicated
/// window space; d <= 2.
std::vector<double> explicit_paired_vector(const PairedState& s, int d);

struct HaarEstimate {
    RealMatrix mean;
    RealMatrix std_error;
    /// Largest |imaginary part| of the averaged elements (should vanish within errors).
    double max_abs_imag = 0.0;
    std::uint64_t n_samples = 0;
};

/// Monte Carlo over Haar-random charge-conserving two-site gates (Haar on each charge
/// block of dimension d^2, 2 d^2, d^2). Parallel over fixed-size chunks, summed in
/// chunk order, so the result does not depend on the thread count.
HaarEstimate haar_mc_average(int d, std::uint64_t n_samples, std::uint64_t seed);

/// Identity-pairing block of averaged_gate_paired, 16 x 16 with rows = out.
RealMatrix identity_restricted_gate(int d);
/// max |identity_restricted_gate - (K x K + a(d) P x P)|.
double projected_gate_deviation(int d);
/// <v|G|v> for the two-replica singlet v in the (1,1) sector of the identity block.
double singlet_element(int d);

}  // namespace chargefcs::replica
