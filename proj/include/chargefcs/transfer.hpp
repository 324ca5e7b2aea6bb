#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "chargefcs/core.hpp"
#include "chargefcs/gate.hpp"
#include "chargefcs/jet.hpp"

namespace chargefcs {

/// Cap on 2^(n_chains * L) for the exact engines.
inline constexpr std::uint64_t kMaxExactStates = 20'000'000;

/// Z(lambda_1..lambda_n, t) = <e^{i sum_c lambda_c Q_c}> by applying the tilted brick-wall
/// transfer operator t times to the product initial distribution of every chain.
/// Throws ResourceError if the joint state space exceeds kMaxExactStates.
std::complex<double> exact_mgf(const PairGateTable& gate, int L, int t, ChemicalPotential mu,
                               std::span<const double> lambdas);

/// Joint raw moments E[prod_c Q_c^{m_c}] for |m| <= order, exact.
class MomentTable {
public:
    MomentTable(MonomialBasis basis, std::vector<double> coefficients);

    double moment(std::span<const int> m) const;
    double moment(std::initializer_list<int> m) const { return moment(std::span<const int>(m.begin(), m.size())); }
    const MonomialBasis& basis() const { return basis_; }

private:
    MonomialBasis basis_;
    std::vector<double> coef_;
};

/// Moments after every full time step, index 0..t_max.
std::vector<MomentTable> exact_moment_series(const PairGateTable& gate, int L, int t_max, ChemicalPotential mu,
                                             int order);
MomentTable exact_moments(const PairGateTable& gate, int L, int t, ChemicalPotential mu, int order);

}  // namespace chargefcs
