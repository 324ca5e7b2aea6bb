#pragma once

#include <span>
#include <vector>

#include "chargefcs/gate.hpp"

namespace chargefcs::magnon {

/// Two-magnon amplitudes, row-major over (x1, x2): index x1 * L + x2.
using MagnonVector2 = std::vector<double>;

/// One half-layer of single-magnon SEP averaging: each active window (i, i+1) is
/// replaced by its mean.
void layer_apply_one_magnon(std::span<double> vec, Parity parity);

/// One half-layer of the two-chain gate K x K + a P x P restricted to one magnon per
/// chain. Parallel over rows.
void layer_apply_two_magnon(std::span<double> vec, int L, Parity parity, double a);
/// Serial version that pushes every basis state through the window gates explicitly.
void layer_apply_two_magnon_reference(std::span<double> vec, int L, Parity parity, double a);

/// Largest t accepted by default: diffusive spread stays away from the open ends.
inline int boundary_guard_limit(int L) { return (L / 2) * (L / 2) / 4; }

/// M(t) = <r,r| T_2(t) - T_1(t) x T_1(t) |l,l> for t = 0..t_max. The difference is
/// propagated directly, so M is not the small remainder of two large overlaps.
/// With enforce_guard, throws ConfigError for t_max > boundary_guard_limit(L).
std::vector<double> m_series_discrete(int L, int t_max, double a, bool enforce_guard = true);
double m_of_t_discrete(int L, int t, double a, bool enforce_guard = true);

/// Same overlap for the softened continuous-time generator
/// H_2 = H_1 x 1 + 1 x H_1 - a sum_x |v_x><v_x|, evolved with short Taylor steps.
/// `times` must be non-decreasing and non-negative. Throws NumericalError if a step fails
/// to converge.
std::vector<double> m_series_hamiltonian(int L, std::span<const double> times, double a);
double m_of_t_hamiltonian(int L, double t, double a);

/// max_x |(H psi - E psi)(x)| for the plane-wave pair with momenta 2 pi p1 / L and
/// 2 pi p2 / L on the periodic ring, E = 2 - cos k1 - cos k2. The antisymmetric
/// combination is used unless `symmetric` is set.
double antisymmetric_sector_check(int L, double a, int p1, int p2, bool symmetric = false);

}  // namespace chargefcs::magnon
