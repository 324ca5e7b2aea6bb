#include "chargefcs/jet.hpp"

#include <cmath>
#include <numeric>

#include "chargefcs/core.hpp"

namespace chargefcs {
namespace {

void enumerate(int n_vars, int order, std::vector<int>& cur, int var, int remaining,
               std::vector<std::vector<int>>& out) {
    if (var == n_vars) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e <= remaining; ++e) {
        cur[var] = e;
        enumerate(n_vars, order, cur, var + 1, remaining - e, out);
    }
    cur[var] = 0;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

MonomialBasis::MonomialBasis(int n_vars, int order) : n_vars_(n_vars), order_(order) {
    if (n_vars < 1 || order < 0) throw ConfigError("MonomialBasis: need n_vars >= 1 and order >= 0");
    std::vector<int> cur(std::size_t(n_vars), 0);
    enumerate(n_vars, order, cur, 0, order, exponents_);
    for (const auto& m : exponents_) {
        double w = 1.0;
        for (int e : m) w *= factorial(e);
        factorial_weight_.push_back(w);
    }
    std::vector<int> sum(static_cast<std::size_t>(n_vars));
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
        for (std::size_t j = 0; j < exponents_.size(); ++j) {
            for (int v = 0; v < n_vars; ++v) sum[v] = exponents_[i][v] + exponents_[j][v];
            const int k = index_of(sum);
            if (k >= 0) products_.push_back({std::uint32_t(i), std::uint32_t(j), std::uint32_t(k)});
        }
    }
}

int MonomialBasis::index_of(std::span<const int> m) const {
    if (int(m.size()) != n_vars_) return -1;
    if (std::accumulate(m.begin(), m.end(), 0) > order_) return -1;
    for (std::size_t k = 0; k < exponents_.size(); ++k)
        if (std::equal(m.begin(), m.end(), exponents_[k].begin())) return int(k);
    return -1;
}

void MonomialBasis::multiply_accumulate(std::span<const double> a, std::span<const double> b, std::span<double> out,
                                        double scale) const {
    for (const auto& p : products_) out[p.k] += scale * a[p.i] * b[p.j];
}

std::vector<double> MonomialBasis::exponential(std::span<const int> delta) const {
    std::vector<double> c(size());
    for (std::size_t k = 0; k < size(); ++k) {
        double v = 1.0;
        for (int a = 0; a < n_vars_; ++a) v *= std::pow(double(delta[a]), exponents_[k][a]);
        c[k] = v / factorial_weight_[k];
    }
    return c;
}

}  // namespace chargefcs
