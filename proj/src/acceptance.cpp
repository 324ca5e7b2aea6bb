#include "chargefcs/acceptance.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "chargefcs/analytic.hpp"
#include "chargefcs/core.hpp"
#include "chargefcs/coupled.hpp"
#include "chargefcs/experiment.hpp"
#include "chargefcs/magnon.hpp"
#include "chargefcs/quantum.hpp"
#include "chargefcs/replica.hpp"
#include "chargefcs/sep.hpp"
#include "chargefcs/stats.hpp"

namespace chargefcs::acceptance {
namespace {

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

CriterionResult timed(int id, std::string name, const std::function<void(CriterionResult&)>& body) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    const auto start = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail += std::string(r.detail.empty() ? "" : "; ") + "error: " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

struct MeanVar {
    double c1, c1_se, c2, c2_se;
};

MeanVar first_two_cumulants(const Histogram& h) {
    const auto m = central_moments(h);
    const double n = double(h.n_samples);
    return {m.mean, std::sqrt(m.mu2 / n), m.mu2, std::sqrt(std::max(0.0, m.mu4 - m.mu2 * m.mu2) / n)};
}

Histogram sep_histogram(int L, int t, ChemicalPotential mu, std::uint64_t n, std::uint64_t seed,
                        std::uint64_t first = 0) {
    sep::SepRunConfig cfg;
    cfg.params.L = L;
    cfg.params.t = t;
    cfg.params.mu = mu;
    cfg.params.seed = seed;
    cfg.n_samples = n;
    cfg.first_sample = first;
    return sep::run_sep_fcs(cfg).histogram;
}

}  // namespace

TwoTermFit fit_two_terms(const std::vector<double>& f, const std::vector<double>& g, const std::vector<double>& y,
                         const std::vector<double>& sigma) {
    if (f.size() != g.size() || f.size() != y.size() || f.size() != sigma.size() || f.size() < 2)
        throw ConfigError("fit_two_terms: need at least two points of matching length");
    double sff = 0, sfg = 0, sgg = 0, sfy = 0, sgy = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = 1.0 / (sigma[i] * sigma[i]);
        sff += w * f[i] * f[i];
        sfg += w * f[i] * g[i];
        sgg += w * g[i] * g[i];
        sfy += w * f[i] * y[i];
        sgy += w * g[i] * y[i];
    }
    const double det = sff * sgg - sfg * sfg;
    if (!(std::abs(det) > 0)) throw NumericalError("fit_two_terms: singular design");
    TwoTermFit r;
    r.a = (sgg * sfy - sfg * sgy) / det;
    r.b = (sff * sgy - sfg * sfy) / det;
    r.sigma_a = std::sqrt(sgg / det);
    r.sigma_b = std::sqrt(sff / det);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double res = (y[i] - r.a * f[i] - r.b * g[i]) / sigma[i];
        r.chi2 += res * res;
    }
    return r;
}

CriterionResult analytic_self_consistency() {
    return timed(1, "analytic self-consistency", [](CriterionResult& r) {
        constexpr double kTol = 1e-6;
        constexpr double kBudgetSeconds = 1.0;
        const auto start = std::chrono::steady_clock::now();
        const std::pair<double, double> densities[] = {{1.0, 0.0}, {0.88, 0.12}, {0.5, 0.5}};
        double worst = 0.0;
        for (const auto& [rl, rr] : densities)
            for (int m = 1; m <= 4; ++m) {
                const double c = analytic::sep_cumulant(m, 100.0, rl, rr);
                const double fd = analytic::sep_cumulant_finite_difference(m, 100.0, rl, rr);
                worst = std::max(worst, std::abs(fd - c) / std::abs(c));
            }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.passed = worst <= kTol && secs < kBudgetSeconds;
        r.detail = fmt("max relative |FD - series| = %.2e (tol %.0e), %.3f s (budget %.0f s)", worst, kTol, secs,
                       kBudgetSeconds);
    });
}

CriterionResult sep_sampler_vs_analytics() {
    return timed(2, "SEP sampler vs analytics", [](CriterionResult& r) {
        constexpr int kL = 128;
        constexpr std::uint64_t kN = 1'000'000;
        constexpr double kSigmas = 3.0;
        constexpr int kT = 100;
        const std::vector<int> times{36, 64, 100, 144, 196};
        const double target_c1 = std::sqrt(kT / std::numbers::pi);
        const double target_c2 = 0.5 * std::sqrt(kT / std::numbers::pi);

        std::vector<double> f, g, y1, s1, y2, s2;
        MeanVar at100_inf{}, at100_zero{};
        for (int t : times) {
            const auto a = first_two_cumulants(sep_histogram(kL, t, ChemicalPotential::infinity(), kN, 101));
            const auto b = first_two_cumulants(sep_histogram(kL, t, ChemicalPotential(0.0), kN, 202));
            if (t == kT) {
                at100_inf = a;
                at100_zero = b;
            }
            f.push_back(std::sqrt(double(t)));
            g.push_back(1.0 / std::sqrt(double(t)));
            y1.push_back(a.c1);
            s1.push_back(a.c1_se);
            y2.push_back(b.c2);
            s2.push_back(b.c2_se);
        }
        // The sampler is discrete-time; the closed form is the t -> inf limit. Fit the
        // leading sqrt(t) coefficient together with a 1/sqrt(t) drift and compare it.
        const auto fit1 = fit_two_terms(f, g, y1, s1);
        const auto fit2 = fit_two_terms(f, g, y2, s2);
        const double lim1 = fit1.a * std::sqrt(double(kT)), lim1_se = fit1.sigma_a * std::sqrt(double(kT));
        const double lim2 = fit2.a * std::sqrt(double(kT)), lim2_se = fit2.sigma_a * std::sqrt(double(kT));
        const double pull1 = (lim1 - target_c1) / lim1_se, pull2 = (lim2 - target_c2) / lim2_se;
        const double raw1 = (at100_inf.c1 - target_c1) / at100_inf.c1_se;
        const double raw2 = (at100_zero.c2 - target_c2) / at100_zero.c2_se;
        r.passed = std::abs(pull1) <= kSigmas && std::abs(pull2) <= kSigmas;
        r.detail = fmt("mu=inf: fitted sqrt(t) limit at t=100 %.5f +- %.5f vs %.5f (pull %.2f); raw C1(100) %.5f +- "
                       "%.5f (pull %.2f). mu=0: fitted %.5f +- %.5f vs %.5f (pull %.2f); raw C2(100) %.5f +- %.5f "
                       "(pull %.2f). N=%llu per t, L=%d, t in {36..196}",
                       lim1, lim1_se, target_c1, pull1, at100_inf.c1, at100_inf.c1_se, raw1, lim2, lim2_se, target_c2,
                       pull2, at100_zero.c2, at100_zero.c2_se, raw2, (unsigned long long)kN, kL);
    });
}

CriterionResult kurtosis_decay() {
    return timed(3, "kurtosis decay", [](CriterionResult& r) {
        constexpr int kL = 256;
        constexpr int kBatches = 100;
        constexpr std::uint64_t kPerBatch = 100'000;  // 10^7 samples per t
        constexpr double kSigmas = 3.0;
        const double target = (4.0 - 3.0 * std::sqrt(2.0)) * std::sqrt(std::numbers::pi) / 2.0;
        const std::vector<int> times{64, 100, 196};
        std::vector<double> f, g, y, s;
        std::string per_t;
        for (int t : times) {
            std::vector<Histogram> batches;
            for (int k = 0; k < kBatches; ++k)
                batches.push_back(sep_histogram(kL, t, ChemicalPotential(0.0), kPerBatch, 303, std::uint64_t(k) * kPerBatch));
            const auto kp = sep::kurtosis_proxy(batches);
            const double v = (kp.value - 3.0) * std::sqrt(double(t)), se = kp.std_error * std::sqrt(double(t));
            f.push_back(1.0);
            g.push_back(1.0 / std::sqrt(double(t)));
            y.push_back(v);
            s.push_back(se);
            per_t += fmt(" t=%d: %.4f +- %.4f (raw pull %.2f);", t, v, se, (v - target) / se);
        }
        // Same treatment as the cumulants: asymptotic value plus a fitted 1/sqrt(t) drift.
        const auto fit = fit_two_terms(f, g, y, s);
        const double pull = (fit.a - target) / fit.sigma_a;
        r.passed = std::abs(pull) <= kSigmas;
        r.detail = fmt("(kappa~-3)sqrt(t) extrapolated %.4f +- %.4f vs %.5f (pull %.2f, drift %.3f/sqrt(t), chi2 %.2f);",
                       fit.a, fit.sigma_a, target, pull, fit.b, fit.chi2) +
                   per_t + fmt(" L=%d, %d batches x %llu per t", kL, kBatches, (unsigned long long)kPerBatch);
    });
}

CriterionResult keystone_equality() {
    return timed(4, "keystone cross-engine equality", [](CriterionResult& r) {
        constexpr double kTol = 1e-9;
        constexpr int kTMax = 6;
        double worst = 0.0;
        int cases = 0;
        for (int L : {6, 8})
            for (double a : {0.05, 0.1, 0.3})
                for (auto mu : {ChemicalPotential(0.5), ChemicalPotential(2.0), ChemicalPotential::infinity()}) {
                    ModelParams p;
                    p.L = L;
                    p.n_chains = 2;
                    p.d = d_of_a(a);
                    p.mu = mu;
                    const auto dc2 = coupled::dc2_exact_series(p, kTMax);
                    // The boundary guard is meant for asymptotics; this comparison is exact at any t.
                    const auto m = magnon::m_series_discrete(L, kTMax, a_of_d(p.d), false);
                    const double th2 = mu.tanh_half() * mu.tanh_half();
                    for (int t = 0; t <= kTMax; ++t) {
                        worst = std::max(worst, std::abs(th2 * m[std::size_t(t)] - dc2[std::size_t(t)]));
                        ++cases;
                    }
                }
        r.passed = worst <= kTol;
        r.detail = fmt("max |tanh^2(mu/2) M(t) - (C2_SEP - C2bar)| = %.2e over %d (L, a, mu, t) cases (tol %.0e)",
                       worst, cases, kTol);
    });
}

CriterionResult spinwave_asymptote() {
    return timed(5, "spin-wave asymptote", [](CriterionResult& r) {
        constexpr int kL = 400;
        constexpr double kA = 0.05;
        constexpr double kTol = 0.1;
        const std::vector<double> times{200, 250, 300, 350, 400};
        const auto m = magnon::m_series_hamiltonian(kL, times, kA);
        double worst = 0.0;
        std::string vals;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double scaled = m[i] * 16.0 * std::sqrt(std::numbers::pi * times[i]) / kA;
            worst = std::max(worst, std::abs(scaled - 1.0));
            vals += fmt(" %.0f:%.4f", times[i], scaled);
        }
        r.passed = worst <= kTol;
        r.detail = fmt("max |M_H 16 sqrt(pi t)/a - 1| = %.4f (tol %.1f); t:value", worst, kTol) + vals;
    });
}

CriterionResult discrete_scaling() {
    return timed(6, "discrete-model scaling", [](CriterionResult& r) {
        constexpr int kL = 160;
        constexpr int kTMax = 200;
        constexpr double kSlopeLo = -0.65, kSlopeHi = -0.35, kCollapseTol = 0.10;
        const auto mu = ChemicalPotential(0.1);
        const double th2 = mu.tanh_half() * mu.tanh_half();
        const std::vector<double> ds{1.5, 2.0, 3.0};
        std::vector<std::vector<double>> scaled;
        bool slopes_ok = true;
        std::string slopes;
        double plateau = 0.0;
        for (double d : ds) {
            const double a = a_of_d(d);
            const auto m = magnon::m_series_discrete(kL, kTMax, a);
            std::vector<double> ts, dc;
            for (int t = 20; t <= kTMax; ++t) {
                ts.push_back(t);
                dc.push_back(th2 * m[std::size_t(t)]);
            }
            const double s = loglog_slope(ts, dc);
            slopes_ok = slopes_ok && s >= kSlopeLo && s <= kSlopeHi;
            slopes += fmt(" d=%.1f:%.3f", d, s);
            std::vector<double> sc;
            for (int t = 50; t <= kTMax; ++t) sc.push_back(th2 * m[std::size_t(t)] * std::sqrt(double(t)) / a);
            plateau = sc.back();
            scaled.push_back(std::move(sc));
        }
        double spread = 0.0;
        for (std::size_t i = 0; i < scaled.front().size(); ++i) {
            double lo = scaled[0][i], hi = lo, mean = 0.0;
            for (const auto& s : scaled) {
                lo = std::min(lo, s[i]);
                hi = std::max(hi, s[i]);
                mean += s[i] / double(scaled.size());
            }
            spread = std::max(spread, (hi - lo) / std::abs(mean));
        }
        r.passed = slopes_ok && spread <= kCollapseTol;
        r.detail = fmt("log-log slopes over t in [20, 200]:%s (window [%.2f, %.2f]); max relative spread of dC2 "
                       "sqrt(t)/a for t >= 50 = %.4f (tol %.2f); plateau at t=200 %.4f = %.3f x tanh^2/(16 sqrt(pi))",
                       slopes.c_str(), kSlopeLo, kSlopeHi, spread, kCollapseTol, plateau,
                       plateau / (th2 / (16.0 * std::sqrt(std::numbers::pi))));
    });
}

CriterionResult weingarten_vs_haar() {
    return timed(7, "Weingarten vs Haar oracle", [](CriterionResult& r) {
        constexpr std::uint64_t kN = 100'000;
        constexpr double kPulls = 5.0;
        constexpr double kSlopeMax = -7.0;
        constexpr double kSingletTol = 1e-12;
        const auto exact = replica::averaged_gate_paired(1);
        const auto est = replica::haar_mc_average(1, kN, 707);
        double max_pull = 0.0;
        bool zeros_ok = true;
        for (std::size_t i = 0; i < exact.data.size(); ++i) {
            const double diff = std::abs(est.mean.data[i] - exact.data[i]);
            const double se = est.std_error.data[i];
            if (se > 0) max_pull = std::max(max_pull, diff / se);
            else zeros_ok = zeros_ok && diff <= 1e-12;
        }
        const bool haar_ok = max_pull <= kPulls && zeros_ok;

        std::vector<double> ds, devs;
        bool singlet_ok = true;
        double singlet_worst = 0.0;
        for (int d : {2, 3, 4}) {
            ds.push_back(d);
            devs.push_back(replica::projected_gate_deviation(d));
            const double e = std::abs(replica::singlet_element(d) - a_of_d(d));
            singlet_worst = std::max(singlet_worst, e);
            singlet_ok = singlet_ok && e <= kSingletTol;
        }
        // The slope is only defined when every deviation is resolved above round-off.
        constexpr double kRoundoff = 1e-14;
        bool resolved = true;
        for (double v : devs) resolved = resolved && v > kRoundoff;
        bool decreasing = devs[0] > devs[1] && devs[1] > devs[2];
        double slope = std::nan("");
        if (resolved) slope = loglog_slope(ds, devs);
        const bool slope_ok = resolved && decreasing && slope <= kSlopeMax;

        r.passed = haar_ok && singlet_ok && slope_ok;
        r.detail = fmt("Haar d=1 N=%llu: max pull %.2f (tol %.0f), structural zeros %s; singlet max |<v|G|v> - a(d)| "
                       "= %.1e (tol %.0e); projected-gate deviation d=2,3,4: %.1e %.1e %.1e, slope %s (need <= %.0f)",
                       (unsigned long long)kN, max_pull, kPulls, zeros_ok ? "exact" : "VIOLATED", singlet_worst,
                       kSingletTol, devs[0], devs[1], devs[2],
                       resolved ? fmt("%.2f", slope).c_str() : "undefined", kSlopeMax);
        if (!resolved)
            r.detail += "; the identity-pairing block equals K x K + a(d) P x P exactly for every d, so the "
                        "deviation is round-off and no d^-8 decay can be exhibited";
    });
}

CriterionResult quantum_self_averaging() {
    return timed(8, "quantum self-averaging", [](CriterionResult& r) {
        constexpr double kRelTol = 0.10;
        constexpr double kSlopeLo = -2.5, kSlopeHi = -1.2;
        quantum::EnsembleConfig cfg;
        cfg.L = 20;
        cfg.times = {8, 12, 16, 20, 24};
        cfg.lambdas = analytic::uniform_grid(-2.0, 2.0, 41);
        cfg.n_circuits = 35;
        cfg.seed = 808;
        const auto ensemble = quantum::run_ensemble(cfg);
        const auto mean = quantum::mean_chi(ensemble);
        const std::size_t nl = cfg.lambdas.size(), last = cfg.times.size() - 1;
        const double t = cfg.times.back();
        double worst = 0.0;
        for (std::size_t li = 0; li < nl; ++li) {
            if (cfg.lambdas[li] == 0.0) continue;
            const auto sep = analytic::sep_cgf(cfg.lambdas[li], 1.0, 1.0, 0.0);
            const auto q = mean[last * nl + li] / std::sqrt(t);
            worst = std::max(worst, std::abs(q - sep) / std::abs(sep));
        }
        const auto fit = quantum::fluctuation_decay(ensemble);
        std::string devs;
        for (std::size_t i = 0; i < fit.times.size(); ++i) devs += fmt(" %d:%.3e", fit.times[i], fit.deviation[i]);
        r.passed = worst <= kRelTol && fit.slope >= kSlopeLo && fit.slope <= kSlopeHi;
        r.detail = fmt("max |chibar/sqrt(t) - chi_SEP|/|chi_SEP| at t=24 over lambda in [-2,2] = %.4f (tol %.2f); "
                       "fluctuation slope %.3f (window [%.1f, %.1f]); L=20, 35 circuits; deviation",
                       worst, kRelTol, fit.slope, kSlopeLo, kSlopeHi) +
                   devs;
    });
}

CriterionResult determinism() {
    return timed(9, "determinism across thread counts", [](CriterionResult& r) {
        using cli::Engine;
        std::vector<cli::ExperimentSpec> specs;
        auto add = [&](Engine e, auto&& tweak) {
            cli::ExperimentSpec s;
            s.engine = e;
            s.params.seed = 99;
            tweak(s);
            specs.push_back(s);
        };
        add(Engine::sep_mc, [](auto& s) {
            s.params.L = 64;
            s.params.mu = ChemicalPotential(0.0);
            s.t_list = {10, 40};
            s.n_samples = 20'000;
            s.lambda_grid = analytic::uniform_grid(-2, 2, 9);
        });
        add(Engine::coupled_mc, [](auto& s) {
            s.params.L = 32;
            s.params.n_chains = 2;
            s.params.mu = ChemicalPotential(2.0);
            s.t_list = {10, 20};
            s.d_list = {1.5, 2.0};
            s.n_samples = 20'000;
        });
        add(Engine::coupled_mc, [](auto& s) {
            s.params.L = 16;
            s.params.n_chains = 3;
            s.params.mu = ChemicalPotential(0.5);
            s.t_list = {8};
            s.n_samples = 20'000;
        });
        add(Engine::replica_check, [](auto& s) {
            s.d_list = {1, 2};
            s.n_samples = 3'000;
        });
        add(Engine::quantum_cgf, [](auto& s) {
            s.params.L = 10;
            s.t_list = {3, 6};
            s.n_circuits = 4;
            s.lambda_grid = analytic::uniform_grid(-2, 2, 11);
        });
        add(Engine::quantum_cgf, [](auto& s) {
            s.params.L = 14;
            s.params.mu = ChemicalPotential(0.0);
            s.t_list = {3};
            s.n_circuits = 1;
            s.n_vectors = 6;
            s.lambda_grid = analytic::uniform_grid(-1, 1, 5);
        });
        add(Engine::quantum_fluct, [](auto& s) {
            s.params.L = 8;
            s.t_list = {2, 4, 6};
            s.n_circuits = 8;
            s.lambda_grid = analytic::uniform_grid(-2, 2, 11);
        });

        const int saved = omp_get_max_threads();
        bool all_same = true;
        std::string report;
        for (const auto& s : specs) {
            std::string first;
            bool same = true;
            for (int threads : {1, 2, 5}) {
                omp_set_num_threads(threads);
                const auto csv = cli::run_engine(s).to_string();
                if (threads == 1) first = csv;
                else same = same && csv == first;
            }
            all_same = all_same && same;
            report += fmt(" %s%s:%s", cli::to_string(s.engine).c_str(),
                          s.params.n_chains > 1 ? fmt("(n=%d)", s.params.n_chains).c_str() : "", same ? "same" : "DIFF");
        }
        omp_set_num_threads(saved);
        r.passed = all_same;
        r.detail = "byte-identical CSV at 1, 2, 5 threads:" + report;
    });
}

std::vector<CriterionResult> run(const std::vector<int>& ids) {
    const std::vector<std::function<CriterionResult()>> all = {
        analytic_self_consistency, sep_sampler_vs_analytics, kurtosis_decay,
        keystone_equality,         spinwave_asymptote,       discrete_scaling,
        weingarten_vs_haar,        quantum_self_averaging,   determinism,
    };
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int id = int(i) + 1;
        if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
        out.push_back(all[i]());
    }
    return out;
}

std::string format(const CriterionResult& r) {
    return fmt("[%s] %d %s (%.1f s): ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds) + r.detail;
}

}  // namespace chargefcs::acceptance
