#include <utility>

#include "chargefcs/sep.hpp"
#include "chargefcs/stats.hpp"

namespace chargefcs::sep {

void brickwall_step(std::span<std::uint8_t> row, Parity parity, CounterStream& stream, std::int64_t& transfer) {
    const int L = int(row.size());
    const int central = L / 2 - 1;
    std::vector<std::uint64_t> r(std::size_t((L + 63) / 64));
    for (auto& w : r) w = stream();
    for (int i : layer_bonds(L, parity)) {
        if (!((r[i / 64] >> (i % 64)) & 1)) continue;
        if (row[i] == row[i + 1]) continue;
        if (i == central) transfer += row[i] ? 1 : -1;
        std::swap(row[i], row[i + 1]);
    }
}

void brickwall_step(std::span<std::uint8_t> row, Parity parity, CounterStream& stream, TransferRecord& record) {
    if (record.q.empty()) record.q.assign(1, 0);
    brickwall_step(row, parity, stream, record.q[0]);
}

std::int64_t sample_transfer_reference(const ModelParams& params, std::uint64_t sample_index) {
    params.validate();
    auto init = CounterStream::for_sample(params.seed, EngineId::initial_state, sample_index);
    auto row = sample_initial_state(params, init);
    auto stream = CounterStream::for_sample(params.seed, EngineId::sep, sample_index);
    std::int64_t q = 0;
    for (int step = 0; step < params.t; ++step) {
        brickwall_step(row, Parity::even, stream, q);
        brickwall_step(row, Parity::odd, stream, q);
    }
    return q;
}

SepRunResult run_sep_fcs_reference(const SepRunConfig& config) {
    config.params.validate();
    if (config.n_samples < 1) throw ConfigError("run_sep_fcs: n_samples must be >= 1");
    SepRunResult out;
    for (std::uint64_t k = 0; k < config.n_samples; ++k)
        out.histogram.add(sample_transfer_reference(config.params, config.first_sample + k));
    for (double lambda : config.lambda_grid) out.cgf.push_back(empirical_cgf(out.histogram, lambda));
    return out;
}

}  // namespace chargefcs::sep
