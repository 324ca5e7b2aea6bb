#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chargefcs {

class CounterStream;

/// Bad configuration or violated precondition. The CLI maps this to exit code 2.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A request exceeds a memory/size cap (exit code 3).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature or step-size control failed to reach its error target (exit code 4).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Chemical potential with the two infinite limits kept as distinct states, so that
/// mu = +inf gives an exactly deterministic domain wall.
class ChemicalPotential {
public:
    enum class Kind : std::uint8_t { finite, plus_infinity, minus_infinity };

    constexpr ChemicalPotential() = default;
    constexpr explicit ChemicalPotential(double value) : kind_(Kind::finite), value_(value) {}

    static constexpr ChemicalPotential infinity() { return ChemicalPotential(Kind::plus_infinity); }
    static constexpr ChemicalPotential negative_infinity() { return ChemicalPotential(Kind::minus_infinity); }
    /// Accepts +-HUGE_VAL as the infinite limits.
    static ChemicalPotential from_double(double v);

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_infinite() const { return kind_ != Kind::finite; }
    /// Finite value, or +-infinity.
    double value() const;
    ChemicalPotential negated() const;

    /// rho = e^mu / (1 + e^mu), saturating at 0 and 1.
    double density() const;
    /// tanh(mu/2); +-1 at the infinite limits.
    double tanh_half() const;

    std::string to_string() const;

    friend constexpr bool operator==(const ChemicalPotential&, const ChemicalPotential&) = default;

private:
    constexpr explicit ChemicalPotential(Kind k) : kind_(k) {}
    Kind kind_ = Kind::finite;
    double value_ = 0.0;
};

/// Experiment configuration shared by all engines. Boundaries are always open.
struct ModelParams {
    int L = 64;
    int t = 100;
    double d = 2.0;
    int n_chains = 1;
    ChemicalPotential mu = ChemicalPotential::infinity();
    std::uint64_t seed = 20230101;

    /// Throws ConfigError unless L is even and positive, t >= 0, d >= 1 (d = +inf is the
    /// decoupled limit), n_chains in {1,2,3}.
    void validate() const;

    /// Index of the left site of the central bond (0-based). The bond joins
    /// sites L/2 and L/2+1 in 1-based numbering.
    int central_left_site() const { return L / 2 - 1; }
    double rho_left() const { return mu.density(); }
    double rho_right() const { return mu.negated().density(); }
};

/// Inter-chain coupling a(d) = 1 / (4 d^4 - 1). Rejects d < 1.
double a_of_d(double d);

/// Inverse of a_of_d on a in [0, 1/3]; a = 0 maps to d = +inf.
double d_of_a(double a);

/// rho(mu) = e^mu / (1 + e^mu).
double density_from_mu(ChemicalPotential mu);

/// Occupancy bits for n_chains x L sites, chain-major.
class LadderState {
public:
    LadderState() = default;
    LadderState(int n_chains, int L);

    int n_chains() const { return n_chains_; }
    int size() const { return L_; }

    std::uint8_t at(int chain, int site) const { return bits_[index(chain, site)]; }
    void set(int chain, int site, std::uint8_t q) { bits_[index(chain, site)] = q; }
    std::span<std::uint8_t> row(int chain) { return {bits_.data() + std::size_t(chain) * L_, std::size_t(L_)}; }
    std::span<const std::uint8_t> row(int chain) const {
        return {bits_.data() + std::size_t(chain) * L_, std::size_t(L_)};
    }
    int charge(int chain) const;

    friend bool operator==(const LadderState&, const LadderState&) = default;

private:
    std::size_t index(int chain, int site) const { return std::size_t(chain) * L_ + site; }
    int n_chains_ = 0;
    int L_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Net charge moved left -> right across the central bond, one counter per chain.
struct TransferRecord {
    std::vector<std::int64_t> q;

    TransferRecord() = default;
    explicit TransferRecord(int n_chains) : q(std::size_t(n_chains), 0) {}
};

struct Histogram {
    std::map<std::int64_t, std::uint64_t> counts;
    std::uint64_t n_samples = 0;

    void add(std::int64_t value, std::uint64_t count = 1);
    void merge(const Histogram& other);
    bool empty() const { return n_samples == 0; }
    std::int64_t min_value() const;
    std::int64_t max_value() const;
};

struct CumulantEstimate {
    int order = 1;
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
};

/// Samples one chain of the biased product state: left-half sites are occupied with
/// probability rho_L, right-half sites with rho_R. Draws a uniform only for sites
/// whose density is strictly between 0 and 1, so mu = +-inf consumes no randomness.
std::vector<std::uint8_t> sample_initial_state(const ModelParams& params, CounterStream& stream);
void sample_initial_state(const ModelParams& params, CounterStream& stream, std::span<std::uint8_t> row);

}  // namespace chargefcs
