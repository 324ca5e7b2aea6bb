#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace chargefcs {

/// Multi-indices m in N^n with |m| <= order, used to carry truncated power series
/// E[exp(sum_a s_a Q_a)] through the exact transfer operators. The coefficient of
/// s^m is E[prod Q_a^{m_a}] / prod m_a!.
class MonomialBasis {
public:
    MonomialBasis(int n_vars, int order);

    int n_vars() const { return n_vars_; }
    int order() const { return order_; }
    std::size_t size() const { return exponents_.size(); }

    const std::vector<int>& exponent(std::size_t k) const { return exponents_[k]; }
    /// Index of a multi-index, or -1 if |m| > order.
    int index_of(std::span<const int> m) const;

    /// out += a * b, truncated.
    void multiply_accumulate(std::span<const double> a, std::span<const double> b, std::span<double> out,
                             double scale = 1.0) const;

    /// Coefficients of exp(sum_a delta_a s_a), truncated.
    std::vector<double> exponential(std::span<const int> delta) const;

    /// prod_a m_a! for term k, turning a coefficient back into a raw moment.
    double factorial_weight(std::size_t k) const { return factorial_weight_[k]; }

private:
    struct Product {
        std::uint32_t i, j, k;
    };
    int n_vars_;
    int order_;
    std::vector<std::vector<int>> exponents_;
    std::vector<double> factorial_weight_;
    std::vector<Product> products_;
};

}  // namespace chargefcs
