#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "chargefcs/core.hpp"

namespace chargefcs {

/// Mean and central moments mu_2..mu_4 of a histogram (population normalization).
struct CentralMoments {
    double mean = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double mu4 = 0.0;
    std::uint64_t n_samples = 0;
};

CentralMoments central_moments(const Histogram& hist);

/// Cumulants C_1..C_max_order with bootstrap standard errors. mu4 and mu2_squared are
/// the numerator and denominator of the kurtosis proxy, kept separate so they can be
/// averaged over an ensemble before taking the ratio.
struct CumulantSummary {
    std::vector<CumulantEstimate> cumulants;
    double mu4 = 0.0;
    double mu2_squared = 0.0;

    const CumulantEstimate& order(int k) const { return cumulants.at(std::size_t(k - 1)); }
};

inline constexpr int kDefaultBootstrapResamples = 200;

/// Requires at least two samples. The bootstrap stream is keyed by bootstrap_seed so
/// the reported errors are reproducible.
CumulantSummary cumulants_from_histogram(const Histogram& hist, int max_order,
                                         int n_bootstrap = kDefaultBootstrapResamples,
                                         std::uint64_t bootstrap_seed = 0);

/// log of the sample mean of exp(i lambda Q).
std::complex<double> empirical_cgf(const Histogram& hist, double lambda);

/// Least-squares slope of log(y) against log(x). All entries must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Jackknife mean/standard error of a ratio of ensemble means, sum(num)/sum(den).
struct RatioEstimate {
    double value = 0.0;
    double std_error = 0.0;
};
RatioEstimate jackknife_ratio(std::span<const double> numerators, std::span<const double> denominators);

Histogram histogram_from_samples(std::span<const std::int32_t> samples);

}  // namespace chargefcs
