#pragma once

#include <cstdint>
#include <limits>

namespace chargefcs {

/// Identifies the consumer of a random stream. Part of the stream key, so two engines
/// sharing a master seed never see correlated draws.
enum class EngineId : std::uint64_t {
    initial_state = 1,
    sep = 2,
    coupled = 3,
    replica = 4,
    quantum_circuit = 5,
    quantum_trace = 6,
    bootstrap = 7,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: the k-th output is a pure function of (key, k).
/// A sample's stream depends only on (master seed, engine, sample index), which is
/// what makes Monte Carlo output independent of the worker count.
class CounterStream {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterStream(std::uint64_t key) : key_(key) {}

    static constexpr CounterStream for_sample(std::uint64_t master_seed, EngineId engine, std::uint64_t index) {
        std::uint64_t k = splitmix64(master_seed ^ 0x6a09e667f3bcc909ULL);
        k = splitmix64(k ^ (static_cast<std::uint64_t>(engine) * 0xd1b54a32d192ed03ULL));
        k = splitmix64(k ^ index);
        return CounterStream(k);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        // Two rounds decorrelate neighbouring keys as well as neighbouring counters.
        return splitmix64(splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_) ^ key_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const { return key_; }
    std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace chargefcs
