#include "chargefcs/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "chargefcs/rng.hpp"

namespace chargefcs {

ChemicalPotential ChemicalPotential::from_double(double v) {
    if (std::isnan(v)) throw ConfigError("chemical potential is NaN");
    if (std::isinf(v)) return v > 0 ? infinity() : negative_infinity();
    return ChemicalPotential(v);
}

double ChemicalPotential::value() const {
    switch (kind_) {
        case Kind::plus_infinity: return std::numeric_limits<double>::infinity();
        case Kind::minus_infinity: return -std::numeric_limits<double>::infinity();
        default: return value_;
    }
}

ChemicalPotential ChemicalPotential::negated() const {
    switch (kind_) {
        case Kind::plus_infinity: return negative_infinity();
        case Kind::minus_infinity: return infinity();
        default: return ChemicalPotential(-value_);
    }
}

double ChemicalPotential::density() const {
    switch (kind_) {
        case Kind::plus_infinity: return 1.0;
        case Kind::minus_infinity: return 0.0;
        default: break;
    }
    // Logistic function written to avoid overflow for either sign.
    if (value_ >= 0) return 1.0 / (1.0 + std::exp(-value_));
    const double e = std::exp(value_);
    return e / (1.0 + e);
}

double ChemicalPotential::tanh_half() const {
    switch (kind_) {
        case Kind::plus_infinity: return 1.0;
        case Kind::minus_infinity: return -1.0;
        default: return std::tanh(0.5 * value_);
    }
}

std::string ChemicalPotential::to_string() const {
    switch (kind_) {
        case Kind::plus_infinity: return "inf";
        case Kind::minus_infinity: return "-inf";
        default: break;
    }
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
}

void ModelParams::validate() const {
    if (L <= 0 || L % 2 != 0) throw ConfigError("L must be a positive even integer, got " + std::to_string(L));
    if (t < 0) throw ConfigError("t must be non-negative, got " + std::to_string(t));
    if (!(d >= 1.0)) throw ConfigError("d must be a real >= 1 (+inf allowed)");
    if (n_chains < 1 || n_chains > 3) throw ConfigError("n_chains must be 1, 2 or 3");
}

double a_of_d(double d) {
    if (!(d >= 1.0)) throw ConfigError("a(d) requires d >= 1");
    if (std::isinf(d)) return 0.0;
    const double d2 = d * d;
    return 1.0 / (4.0 * d2 * d2 - 1.0);
}

double d_of_a(double a) {
    if (!(a >= 0.0 && a <= 1.0 / 3.0)) throw ConfigError("d_of_a: a must lie in [0, 1/3]");
    if (a == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow((1.0 / a + 1.0) / 4.0, 0.25);
}

double density_from_mu(ChemicalPotential mu) { return mu.density(); }

LadderState::LadderState(int n_chains, int L)
    : n_chains_(n_chains), L_(L), bits_(std::size_t(n_chains) * std::size_t(L), 0) {}

int LadderState::charge(int chain) const {
    auto r = row(chain);
    return std::accumulate(r.begin(), r.end(), 0);
}

void Histogram::add(std::int64_t value, std::uint64_t count) {
    if (count == 0) return;
    counts[value] += count;
    n_samples += count;
}

void Histogram::merge(const Histogram& other) {
    for (const auto& [v, c] : other.counts) add(v, c);
}

std::int64_t Histogram::min_value() const {
    if (counts.empty()) throw ConfigError("empty histogram");
    return counts.begin()->first;
}

std::int64_t Histogram::max_value() const {
    if (counts.empty()) throw ConfigError("empty histogram");
    return counts.rbegin()->first;
}

void sample_initial_state(const ModelParams& params, CounterStream& stream, std::span<std::uint8_t> row) {
    if (row.size() != std::size_t(params.L)) throw ConfigError("row length does not match L");
    const double rho_l = params.rho_left();
    const double rho_r = params.rho_right();
    const int half = params.L / 2;
    for (int x = 0; x < params.L; ++x) {
        const double rho = x < half ? rho_l : rho_r;
        if (rho <= 0.0) {
            row[x] = 0;
        } else if (rho >= 1.0) {
            row[x] = 1;
        } else {
            row[x] = stream.uniform() < rho ? 1 : 0;
        }
    }
}

std::vector<std::uint8_t> sample_initial_state(const ModelParams& params, CounterStream& stream) {
    std::vector<std::uint8_t> row(std::size_t(params.L));
    sample_initial_state(params, stream, row);
    return row;
}

}  // namespace chargefcs
