#include <array>
#include <utility>

#include "chargefcs/core.hpp"
#include "chargefcs/magnon.hpp"

namespace chargefcs::magnon {
namespace {

// Where one magnon at x goes under the layer's K gates: (site, weight) pairs.
std::vector<std::pair<int, double>> spread(int x, const std::vector<int>& window_of) {
    const int i = window_of[x];
    if (i < 0) return {{x, 1.0}};
    return {{i, 0.5}, {i + 1, 0.5}};
}

}  // namespace

void layer_apply_two_magnon_reference(std::span<double> vec, int L, Parity parity, double a) {
    if (L < 2 || L % 2 != 0) throw ConfigError("magnon: L must be an even integer >= 2");
    if (vec.size() != std::size_t(L) * L) throw ConfigError("two-magnon vector must have L*L entries");
    std::vector<int> window_of(static_cast<std::size_t>(L), -1);
    for (int i : layer_bonds(L, parity)) window_of[i] = window_of[i + 1] = i;

    std::vector<double> out(vec.size(), 0.0);
    for (int x1 = 0; x1 < L; ++x1) {
        for (int x2 = 0; x2 < L; ++x2) {
            const double amp = vec[std::size_t(x1) * L + x2];
            if (amp == 0.0) continue;
            for (const auto& [y1, w1] : spread(x1, window_of))
                for (const auto& [y2, w2] : spread(x2, window_of)) out[std::size_t(y1) * L + y2] += w1 * w2 * amp;
            // Both magnons in the same window: a |v><v| with v = (1, -1, -1, 1) / 2.
            const int i = window_of[x1];
            if (i >= 0 && window_of[x2] == i) {
                const std::array<int, 2> sites{i, i + 1};
                const double sx = (x1 == i ? 0.5 : -0.5) * (x2 == i ? 1.0 : -1.0);
                for (int y1 : sites)
                    for (int y2 : sites) {
                        const double sy = (y1 == i ? 0.5 : -0.5) * (y2 == i ? 1.0 : -1.0);
                        out[std::size_t(y1) * L + y2] += a * sx * sy * amp;
                    }
            }
        }
    }
    std::copy(out.begin(), out.end(), vec.begin());
}

}  // namespace chargefcs::magnon
