#include "chargefcs/stats.hpp"

#include <cmath>
#include <random>

#include "chargefcs/rng.hpp"

namespace chargefcs {
namespace {

CentralMoments moments_of(std::span<const std::int64_t> values, std::span<const std::uint64_t> counts) {
    CentralMoments m;
    long double n = 0, s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        n += counts[i];
        s += (long double)counts[i] * values[i];
    }
    m.n_samples = std::uint64_t(n);
    if (n == 0) return m;
    const long double mean = s / n;
    long double s2 = 0, s3 = 0, s4 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const long double dv = values[i] - mean;
        const long double dv2 = dv * dv;
        s2 += counts[i] * dv2;
        s3 += counts[i] * dv2 * dv;
        s4 += counts[i] * dv2 * dv2;
    }
    m.mean = double(mean);
    m.mu2 = double(s2 / n);
    m.mu3 = double(s3 / n);
    m.mu4 = double(s4 / n);
    return m;
}

double cumulant_of(const CentralMoments& m, int order) {
    switch (order) {
        case 1: return m.mean;
        case 2: return m.mu2;
        case 3: return m.mu3;
        case 4: return m.mu4 - 3.0 * m.mu2 * m.mu2;
        default: throw ConfigError("cumulant order must be in 1..4");
    }
}

}  // namespace

CentralMoments central_moments(const Histogram& hist) {
    std::vector<std::int64_t> v;
    std::vector<std::uint64_t> c;
    v.reserve(hist.counts.size());
    c.reserve(hist.counts.size());
    for (const auto& [value, count] : hist.counts) {
        v.push_back(value);
        c.push_back(count);
    }
    return moments_of(v, c);
}

CumulantSummary cumulants_from_histogram(const Histogram& hist, int max_order, int n_bootstrap,
                                         std::uint64_t bootstrap_seed) {
    if (hist.empty()) throw ConfigError("cumulants_from_histogram: empty histogram");
    if (hist.n_samples < 2) throw ConfigError("cumulants_from_histogram: need at least two samples");
    if (max_order < 1 || max_order > 4) throw ConfigError("max_order must be in 1..4");

    std::vector<std::int64_t> values;
    std::vector<std::uint64_t> counts;
    for (const auto& [v, c] : hist.counts) {
        values.push_back(v);
        counts.push_back(c);
    }
    const CentralMoments m = moments_of(values, counts);

    CumulantSummary out;
    out.mu4 = m.mu4;
    out.mu2_squared = m.mu2 * m.mu2;

    // Multinomial resampling of the histogram via sequential conditional binomials.
    std::vector<double> sum(std::size_t(max_order), 0.0), sum_sq(std::size_t(max_order), 0.0);
    auto stream = CounterStream::for_sample(bootstrap_seed, EngineId::bootstrap, hist.n_samples);
    std::vector<std::uint64_t> resampled(counts.size());
    for (int b = 0; b < n_bootstrap; ++b) {
        std::uint64_t remaining = hist.n_samples;
        std::uint64_t remaining_weight = hist.n_samples;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (remaining == 0) {
                resampled[i] = 0;
                continue;
            }
            if (i + 1 == counts.size()) {
                resampled[i] = remaining;
            } else {
                const double p = std::min(1.0, double(counts[i]) / double(remaining_weight));
                std::binomial_distribution<std::uint64_t> draw(remaining, p);
                resampled[i] = draw(stream);
            }
            remaining -= resampled[i];
            remaining_weight -= counts[i];
        }
        const CentralMoments mb = moments_of(values, resampled);
        for (int k = 1; k <= max_order; ++k) {
            const double c = cumulant_of(mb, k);
            sum[k - 1] += c;
            sum_sq[k - 1] += c * c;
        }
    }

    for (int k = 1; k <= max_order; ++k) {
        CumulantEstimate e;
        e.order = k;
        e.value = cumulant_of(m, k);
        e.n_samples = hist.n_samples;
        if (n_bootstrap > 1) {
            const double mean = sum[k - 1] / n_bootstrap;
            const double var = std::max(0.0, (sum_sq[k - 1] - n_bootstrap * mean * mean) / (n_bootstrap - 1));
            e.std_error = std::sqrt(var);
        }
        out.cumulants.push_back(e);
    }
    return out;
}

std::complex<double> empirical_cgf(const Histogram& hist, double lambda) {
    if (hist.empty()) throw ConfigError("empirical_cgf: empty histogram");
    std::complex<double> z = 0.0;
    for (const auto& [q, c] : hist.counts) z += double(c) * std::polar(1.0, lambda * double(q));
    return std::log(z / double(hist.n_samples));
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw ConfigError("loglog_slope needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RatioEstimate jackknife_ratio(std::span<const double> numerators, std::span<const double> denominators) {
    const std::size_t n = numerators.size();
    if (n == 0 || denominators.size() != n) throw ConfigError("jackknife_ratio: empty or mismatched ensemble");
    long double total_num = 0, total_den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total_num += numerators[i];
        total_den += denominators[i];
    }
    RatioEstimate r;
    r.value = double(total_num / total_den);
    if (n < 2) return r;
    long double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double ri = (total_num - numerators[i]) / (total_den - denominators[i]);
        s += ri;
        s2 += ri * ri;
    }
    const long double mean = s / n;
    const long double var = (s2 / n - mean * mean) * (n - 1);
    r.std_error = double(std::sqrt(std::max<long double>(0, var)));
    return r;
}

Histogram histogram_from_samples(std::span<const std::int32_t> samples) {
    Histogram h;
    for (auto q : samples) h.add(q);
    return h;
}

}  // namespace chargefcs
