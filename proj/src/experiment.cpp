#include "chargefcs/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "chargefcs/analytic.hpp"
#include "chargefcs/coupled.hpp"
#include "chargefcs/magnon.hpp"
#include "chargefcs/quantum.hpp"
#include "chargefcs/replica.hpp"
#include "chargefcs/sep.hpp"
#include "chargefcs/stats.hpp"
#include "chargefcs/transfer.hpp"

namespace chargefcs::cli {

using nlohmann::json;

namespace {

const std::map<std::string, Engine>& engine_names() {
    static const std::map<std::string, Engine> names = {
        {"sep-mc", Engine::sep_mc},
        {"sep-exact", Engine::sep_exact},
        {"coupled-mc", Engine::coupled_mc},
        {"coupled-exact", Engine::coupled_exact},
        {"magnon-discrete", Engine::magnon_discrete},
        {"magnon-hamiltonian", Engine::magnon_hamiltonian},
        {"replica-check", Engine::replica_check},
        {"quantum-cgf", Engine::quantum_cgf},
        {"quantum-fluct", Engine::quantum_fluct},
        {"analytic", Engine::analytic},
    };
    return names;
}

double json_real(const json& v, const char* what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ConfigError(std::string(what) + " must be a number or \"inf\" / \"-inf\"");
}

json real_to_json(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; }))
            throw ConfigError(std::string("unknown field '") + k + "' in " + where);
    }
}

std::vector<double> real_list(const json& v, const char* what) {
    if (!v.is_array()) throw ConfigError(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(json_real(x, what));
    return out;
}

bool is_integer(double d) { return std::isfinite(d) && d == std::floor(d); }

// Rows are keyed by the shared columns; these build them.
struct RowContext {
    std::string engine;
    std::string d;
    std::string mu;
};

CsvTable::Row row(const RowContext& ctx, std::string series, std::string t, std::string lambda, double value,
                  std::string err = {}) {
    return {std::move(series), ctx.engine, ctx.d, ctx.mu, std::move(t), std::move(lambda), format_double(value),
            std::move(err)};
}

std::string fmt_int(long long v) { return std::to_string(v); }

std::vector<double> cumulants_from_raw(double m1, double m2, double m3, double m4) {
    return {m1, m2 - m1 * m1, m3 - 3 * m2 * m1 + 2 * m1 * m1 * m1,
            m4 - 4 * m3 * m1 - 3 * m2 * m2 + 12 * m2 * m1 * m1 - 6 * m1 * m1 * m1 * m1};
}

void run_analytic(const ExperimentSpec& s, CsvTable& out) {
    const RowContext ctx{"analytic", "", format_mu(s.params.mu)};
    const double rl = s.params.rho_left(), rr = s.params.rho_right();
    for (int t : s.resolved_times()) {
        for (int m = 1; m <= 4; ++m) out.add(row(ctx, "C" + fmt_int(m), fmt_int(t), "", analytic::sep_cumulant(m, t, rl, rr)));
        for (double l : s.resolved_lambdas()) {
            const auto chi = analytic::sep_cgf(l, t, rl, rr);
            out.add(row(ctx, "chi_re", fmt_int(t), format_double(l), chi.real()));
            out.add(row(ctx, "chi_im", fmt_int(t), format_double(l), chi.imag()));
        }
    }
}

void run_sep_mc(const ExperimentSpec& s, CsvTable& out) {
    const RowContext ctx{"sep-mc", "", format_mu(s.params.mu)};
    for (int t : s.resolved_times()) {
        sep::SepRunConfig cfg;
        cfg.params = s.params;
        cfg.params.n_chains = 1;
        cfg.params.t = t;
        cfg.n_samples = s.n_samples;
        cfg.lambda_grid = s.resolved_lambdas();
        const auto res = sep::run_sep_fcs(cfg);
        const auto cum = cumulants_from_histogram(res.histogram, 4, kDefaultBootstrapResamples, s.params.seed);
        for (int m = 1; m <= 4; ++m)
            out.add(row(ctx, "C" + fmt_int(m), fmt_int(t), "", cum.order(m).value, format_double(cum.order(m).std_error)));
        for (const auto& [q, n] : res.histogram.counts)
            out.add(row(ctx, "P(Q=" + fmt_int(q) + ")", fmt_int(t), "", double(n) / double(res.histogram.n_samples)));
        for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
            out.add(row(ctx, "chi_re", fmt_int(t), format_double(cfg.lambda_grid[i]), res.cgf[i].real()));
            out.add(row(ctx, "chi_im", fmt_int(t), format_double(cfg.lambda_grid[i]), res.cgf[i].imag()));
        }
    }
}

void run_sep_exact(const ExperimentSpec& s, CsvTable& out) {
    const RowContext ctx{"sep-exact", "", format_mu(s.params.mu)};
    const auto lambdas = s.resolved_lambdas();
    for (int t : s.resolved_times()) {
        ModelParams p = s.params;
        p.n_chains = 1;
        p.t = t;
        const auto m = sep::exact_sep_moments(p, 4);
        const auto c = cumulants_from_raw(m.moment({1}), m.moment({2}), m.moment({3}), m.moment({4}));
        for (int k = 1; k <= 4; ++k) out.add(row(ctx, "C" + fmt_int(k), fmt_int(t), "", c[k - 1]));
        std::vector<std::complex<double>> z;
        for (double l : lambdas) z.push_back(sep::exact_sep_cgf(p, l));
        const auto chi = quantum::unwrap_log(lambdas, z);
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            out.add(row(ctx, "chi_re", fmt_int(t), format_double(lambdas[i]), chi[i].real()));
            out.add(row(ctx, "chi_im", fmt_int(t), format_double(lambdas[i]), chi[i].imag()));
        }
    }
}

void run_coupled_mc(const ExperimentSpec& s, CsvTable& out) {
    for (double d : s.resolved_ds()) {
        const RowContext ctx{"coupled-mc", format_double(d), format_mu(s.params.mu)};
        for (int t : s.resolved_times()) {
            ModelParams p = s.params;
            p.d = d;
            p.t = t;
            const auto samples = coupled::coupled_mc_run(p, s.n_samples);
            const auto cum = cumulants_from_histogram(samples.marginal(0), 2, kDefaultBootstrapResamples, p.seed);
            out.add(row(ctx, "C1", fmt_int(t), "", cum.order(1).value, format_double(cum.order(1).std_error)));
            out.add(row(ctx, "C2_chain", fmt_int(t), "", cum.order(2).value, format_double(cum.order(2).std_error)));
            if (p.n_chains == 2) {
                const auto c2 = coupled::c2bar_mc(samples);
                out.add(row(ctx, "C2bar", fmt_int(t), "", c2.value, format_double(c2.std_error)));
            }
            if (p.n_chains == 3) {
                const auto c3 = coupled::c3bar_mc(samples);
                out.add(row(ctx, "C3bar", fmt_int(t), "", c3.value, format_double(c3.std_error)));
            }
        }
    }
}

void run_coupled_exact(const ExperimentSpec& s, CsvTable& out) {
    const auto times = s.resolved_times();
    for (double d : s.resolved_ds()) {
        const RowContext ctx{"coupled-exact", format_double(d), format_mu(s.params.mu)};
        ModelParams p = s.params;
        p.d = d;
        p.t = *std::max_element(times.begin(), times.end());
        const int order = p.n_chains == 3 ? 3 : 2;
        const auto series = exact_moment_series(coupled::gate_for(p), p.L, p.t, p.mu, order);
        for (int t : times) {
            const auto& m = series[std::size_t(t)];
            if (p.n_chains == 1) {
                out.add(row(ctx, "C1", fmt_int(t), "", m.moment({1})));
                out.add(row(ctx, "C2_chain", fmt_int(t), "", m.moment({2}) - m.moment({1}) * m.moment({1})));
                continue;
            }
            const double m1 = p.n_chains == 2 ? m.moment({1, 0}) : m.moment({1, 0, 0});
            out.add(row(ctx, "C1", fmt_int(t), "", m1));
            if (p.n_chains == 2) {
                const double m20 = m.moment({2, 0}), m11 = m.moment({1, 1});
                out.add(row(ctx, "C2_chain", fmt_int(t), "", m20 - m1 * m1));
                out.add(row(ctx, "C2bar", fmt_int(t), "", m20 - m11));
                out.add(row(ctx, "dC2", fmt_int(t), "", m11 - m1 * m1));
            } else {
                const double m300 = m.moment({3, 0, 0}), m210 = m.moment({2, 1, 0}), m111 = m.moment({1, 1, 1});
                const double m200 = m.moment({2, 0, 0}), m110 = m.moment({1, 1, 0});
                const double c3_chain = m300 - 3 * m200 * m1 + 2 * m1 * m1 * m1;
                const double c3bar = m300 - 3 * m210 + 2 * m111;
                out.add(row(ctx, "C2bar", fmt_int(t), "", m200 - m110));
                out.add(row(ctx, "C3_chain", fmt_int(t), "", c3_chain));
                out.add(row(ctx, "C3bar", fmt_int(t), "", c3bar));
                out.add(row(ctx, "dC3", fmt_int(t), "", c3_chain - c3bar));
            }
        }
    }
}

void run_magnon_discrete(const ExperimentSpec& s, CsvTable& out) {
    const double th2 = s.params.mu.tanh_half() * s.params.mu.tanh_half();
    for (double d : s.resolved_ds()) {
        const RowContext ctx{"magnon-discrete", format_double(d), format_mu(s.params.mu)};
        const double a = a_of_d(d);
        const auto m = magnon::m_series_discrete(s.params.L, s.params.t, a);
        std::vector<int> times = s.t_list;
        if (times.empty())
            for (int t = 1; t <= s.params.t; ++t) times.push_back(t);
        for (int t : times) {
            const double dc2 = th2 * m[std::size_t(t)];
            out.add(row(ctx, "M", fmt_int(t), "", m[std::size_t(t)]));
            out.add(row(ctx, "dC2", fmt_int(t), "", dc2));
            if (t > 0 && a > 0) out.add(row(ctx, "dC2_scaled", fmt_int(t), "", dc2 * std::sqrt(double(t)) / a));
            out.add(row(ctx, "dC2_spinwave", fmt_int(t), "", t > 0 ? analytic::spinwave_dc2(s.params.mu, t, d) : 0.0));
        }
    }
}

void run_magnon_hamiltonian(const ExperimentSpec& s, CsvTable& out) {
    const auto ti = s.resolved_times();
    const std::vector<double> times(ti.begin(), ti.end());
    for (double d : s.resolved_ds()) {
        const RowContext ctx{"magnon-hamiltonian", format_double(d), format_mu(s.params.mu)};
        const double a = a_of_d(d);
        const auto m = magnon::m_series_hamiltonian(s.params.L, times, a);
        for (std::size_t k = 0; k < times.size(); ++k) {
            out.add(row(ctx, "M_H", fmt_int(ti[k]), "", m[k]));
            if (times[k] > 0 && a > 0)
                out.add(row(ctx, "M_scaled", fmt_int(ti[k]), "", m[k] * 16.0 * std::sqrt(std::numbers::pi * times[k]) / a));
        }
    }
}

void run_replica_check(const ExperimentSpec& s, CsvTable& out) {
    for (double dd : s.resolved_ds()) {
        const int d = int(dd);
        const RowContext ctx{"replica-check", format_double(dd), ""};
        out.add(row(ctx, "a", "", "", a_of_d(dd)));
        out.add(row(ctx, "singlet", "", "", replica::singlet_element(d)));
        if (d >= 2) out.add(row(ctx, "deviation", "", "", replica::projected_gate_deviation(d)));
        if (d <= 2 && s.n_samples >= 2) {
            const auto exact = replica::averaged_gate_paired(d);
            const auto est = replica::haar_mc_average(d, s.n_samples, s.params.seed);
            double max_pull = 0.0;
            for (std::size_t i = 0; i < exact.data.size(); ++i) {
                const double diff = std::abs(est.mean.data[i] - exact.data[i]);
                const double se = est.std_error.data[i];
                if (se > 0) max_pull = std::max(max_pull, diff / se);
                else if (diff > 1e-12) max_pull = std::numeric_limits<double>::infinity();
            }
            out.add(row(ctx, "haar_max_pull", "", "", max_pull));
            out.add(row(ctx, "haar_max_imag", "", "", est.max_abs_imag));
        }
    }
}

quantum::EnsembleConfig ensemble_config(const ExperimentSpec& s) {
    quantum::EnsembleConfig cfg;
    cfg.L = s.params.L;
    cfg.times = s.resolved_times();
    cfg.lambdas = s.resolved_lambdas();
    cfg.n_circuits = s.n_circuits;
    cfg.seed = s.params.seed;
    return cfg;
}

void run_quantum_cgf(const ExperimentSpec& s, CsvTable& out) {
    const RowContext ctx{"quantum-cgf", "", format_mu(s.params.mu)};
    const auto cfg = ensemble_config(s);
    const auto& lambdas = cfg.lambdas;
    if (s.params.mu != ChemicalPotential::infinity()) {
        // Equilibrium (mu = 0): one depth per time, one circuit at a time.
        for (int c = 0; c < s.n_circuits; ++c) {
            for (int t : cfg.times) {
                const quantum::Circuit circ(cfg.L, t, cfg.seed, std::uint64_t(c));
                std::vector<std::complex<double>> z;
                std::vector<double> err;
                for (double l : lambdas) {
                    const auto e = quantum::cgf_mixed_equilibrium(circ, l, s.n_vectors, s.params.seed);
                    z.push_back(e.z);
                    err.push_back(e.std_error);
                }
                const auto chi = quantum::unwrap_log(lambdas, z);
                const std::string tag = "_circuit_" + fmt_int(c);
                for (std::size_t i = 0; i < lambdas.size(); ++i) {
                    const std::string e = err[i] > 0 ? format_double(err[i] / std::abs(z[i])) : "";
                    out.add(row(ctx, "chi_re" + tag, fmt_int(t), format_double(lambdas[i]), chi[i].real(), e));
                    out.add(row(ctx, "chi_im" + tag, fmt_int(t), format_double(lambdas[i]), chi[i].imag(), e));
                }
            }
        }
        return;
    }
    const auto ensemble = quantum::run_ensemble(cfg);
    const auto mean = quantum::mean_chi(ensemble);
    const std::size_t nl = lambdas.size();
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        const int t = cfg.times[ti];
        for (std::size_t li = 0; li < nl; ++li) {
            const std::string ts = fmt_int(t), ls = format_double(lambdas[li]);
            double var_re = 0.0, var_im = 0.0;
            const auto m = mean[ti * nl + li];
            for (std::size_t c = 0; c < ensemble.size(); ++c) {
                const auto x = ensemble[c].chi_at(ti, li);
                out.add(row(ctx, "chi_re_circuit_" + fmt_int(long(c)), ts, ls, x.real()));
                out.add(row(ctx, "chi_im_circuit_" + fmt_int(long(c)), ts, ls, x.imag()));
                var_re += (x.real() - m.real()) * (x.real() - m.real());
                var_im += (x.imag() - m.imag()) * (x.imag() - m.imag());
            }
            const double n = double(ensemble.size());
            const std::string se_re = n > 1 ? format_double(std::sqrt(var_re / (n - 1) / n)) : "";
            const std::string se_im = n > 1 ? format_double(std::sqrt(var_im / (n - 1) / n)) : "";
            out.add(row(ctx, "chi_re_mean", ts, ls, m.real(), se_re));
            out.add(row(ctx, "chi_im_mean", ts, ls, m.imag(), se_im));
            const auto sep = analytic::sep_cgf(lambdas[li], t, 1.0, 0.0);
            out.add(row(ctx, "chi_re_sep", ts, ls, sep.real()));
            out.add(row(ctx, "chi_im_sep", ts, ls, sep.imag()));
        }
    }
}

void run_quantum_fluct(const ExperimentSpec& s, CsvTable& out) {
    const RowContext ctx{"quantum-fluct", "", format_mu(s.params.mu)};
    const auto ensemble = quantum::run_ensemble(ensemble_config(s));
    const auto fit = quantum::fluctuation_decay(ensemble);
    for (std::size_t i = 0; i < fit.times.size(); ++i)
        out.add(row(ctx, "deviation", fmt_int(fit.times[i]), "", fit.deviation[i]));
    out.add(row(ctx, "slope", "", "", fit.slope));
}

}  // namespace

Engine engine_from_string(std::string_view name) {
    const auto& names = engine_names();
    const auto it = names.find(std::string(name));
    if (it == names.end()) throw ConfigError("unknown engine '" + std::string(name) + "'");
    return it->second;
}

std::string to_string(Engine e) {
    for (const auto& [k, v] : engine_names())
        if (v == e) return k;
    throw ConfigError("unknown engine id");
}

std::vector<Engine> all_engines() {
    std::vector<Engine> out;
    for (const auto& [k, v] : engine_names()) out.push_back(v);
    return out;
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("spec must be a JSON object");
    reject_unknown(j,
                   {"engine", "params", "n_samples", "lambda_grid", "t_list", "d_list", "n_circuits", "n_vectors",
                    "output"},
                   "spec");
    if (!j.contains("engine")) throw ConfigError("spec needs an 'engine' field");
    ExperimentSpec s;
    s.engine = engine_from_string(get_or<std::string>(j, "engine", ""));
    if (j.contains("params")) {
        const auto& p = j.at("params");
        if (!p.is_object()) throw ConfigError("'params' must be an object");
        reject_unknown(p, {"L", "t", "d", "n_chains", "mu", "seed"}, "params");
        s.params.L = get_or<int>(p, "L", s.params.L);
        s.params.t = get_or<int>(p, "t", s.params.t);
        if (p.contains("d")) s.params.d = json_real(p.at("d"), "params.d");
        s.params.n_chains = get_or<int>(p, "n_chains", s.params.n_chains);
        if (p.contains("mu")) s.params.mu = ChemicalPotential::from_double(json_real(p.at("mu"), "params.mu"));
        s.params.seed = get_or<std::uint64_t>(p, "seed", s.params.seed);
    }
    s.n_samples = get_or<std::uint64_t>(j, "n_samples", s.n_samples);
    if (j.contains("lambda_grid")) {
        const auto& g = j.at("lambda_grid");
        if (g.is_object()) {
            reject_unknown(g, {"lo", "hi", "n"}, "lambda_grid");
            s.lambda_grid = analytic::uniform_grid(get_or<double>(g, "lo", -3.0), get_or<double>(g, "hi", 3.0),
                                                   get_or<int>(g, "n", 101));
        } else {
            s.lambda_grid = real_list(g, "lambda_grid");
        }
    }
    if (j.contains("t_list")) s.t_list = get_or<std::vector<int>>(j, "t_list", {});
    if (j.contains("d_list")) s.d_list = real_list(j.at("d_list"), "d_list");
    s.n_circuits = get_or<int>(j, "n_circuits", s.n_circuits);
    s.n_vectors = get_or<int>(j, "n_vectors", s.n_vectors);
    s.output = get_or<std::string>(j, "output", s.output);
    return s;
}

json ExperimentSpec::to_json() const {
    json p;
    p["L"] = params.L;
    p["t"] = params.t;
    p["d"] = real_to_json(params.d);
    p["n_chains"] = params.n_chains;
    p["mu"] = real_to_json(params.mu.value());
    p["seed"] = params.seed;
    json j;
    j["engine"] = to_string(engine);
    j["params"] = p;
    j["n_samples"] = n_samples;
    j["lambda_grid"] = resolved_lambdas();
    j["t_list"] = resolved_times();
    json ds = json::array();
    for (double d : resolved_ds()) ds.push_back(real_to_json(d));
    j["d_list"] = ds;
    j["n_circuits"] = n_circuits;
    j["n_vectors"] = n_vectors;
    j["output"] = output;
    return j;
}

std::vector<double> ExperimentSpec::resolved_lambdas() const {
    return lambda_grid.empty() ? analytic::default_lambda_grid() : lambda_grid;
}

std::vector<int> ExperimentSpec::resolved_times() const {
    return t_list.empty() ? std::vector<int>{params.t} : t_list;
}

std::vector<double> ExperimentSpec::resolved_ds() const {
    return d_list.empty() ? std::vector<double>{params.d} : d_list;
}

void ExperimentSpec::validate() const {
    params.validate();
    const auto times = resolved_times();
    for (int t : times)
        if (t < 0) throw ConfigError("t_list entries must be non-negative");
    for (double d : resolved_ds())
        if (!(d >= 1.0)) throw ConfigError("d_list entries must be >= 1");
    const auto lambdas = resolved_lambdas();
    for (double l : lambdas)
        if (!std::isfinite(l)) throw ConfigError("lambda_grid entries must be finite");
    if (output.empty()) throw ConfigError("output path must not be empty");
    const bool ascending_times = std::is_sorted(times.begin(), times.end());
    const int t_max = *std::max_element(times.begin(), times.end());

    switch (engine) {
        case Engine::analytic:
            break;
        case Engine::sep_mc:
            if (n_samples < 2) throw ConfigError("sep-mc needs n_samples >= 2");
            break;
        case Engine::sep_exact:
            if (params.L > sep::kMaxExactSepSites)
                throw ResourceError("sep-exact: L = " + std::to_string(params.L) + " exceeds the cap of " +
                                    std::to_string(sep::kMaxExactSepSites) + " sites");
            break;
        case Engine::coupled_mc:
            if (params.n_chains < 2) throw ConfigError("coupled-mc needs n_chains >= 2");
            if (n_samples < 2) throw ConfigError("coupled-mc needs n_samples >= 2");
            break;
        case Engine::coupled_exact: {
            if (params.n_chains * params.L > 62 ||
                (std::uint64_t(1) << (params.n_chains * params.L)) > kMaxExactStates)
                throw ResourceError("coupled-exact: 2^(n_chains L) exceeds the cap of " +
                                    std::to_string(kMaxExactStates) + " states");
            break;
        }
        case Engine::magnon_discrete:
            if (!t_list.empty() && t_max > params.t)
                throw ConfigError("magnon-discrete: t_list entries must not exceed params.t");
            if (params.t > magnon::boundary_guard_limit(params.L))
                throw ConfigError("magnon-discrete: t = " + std::to_string(params.t) + " exceeds the boundary guard " +
                                  std::to_string(magnon::boundary_guard_limit(params.L)) + " for L = " +
                                  std::to_string(params.L));
            break;
        case Engine::magnon_hamiltonian:
            if (!ascending_times) throw ConfigError("magnon-hamiltonian: t_list must be ascending");
            break;
        case Engine::replica_check:
            for (double d : resolved_ds())
                if (!is_integer(d) || d > 16) throw ConfigError("replica-check: d must be an integer in [1, 16]");
            break;
        case Engine::quantum_cgf:
        case Engine::quantum_fluct:
            if (params.L > quantum::kMaxQuantumSites)
                throw ResourceError("quantum: L = " + std::to_string(params.L) + " exceeds the statevector cap of " +
                                    std::to_string(quantum::kMaxQuantumSites) + " sites");
            if (!ascending_times) throw ConfigError("quantum: t_list must be ascending");
            if (n_circuits < 1) throw ConfigError("quantum: n_circuits must be >= 1");
            if (!std::is_sorted(lambdas.begin(), lambdas.end()) ||
                std::adjacent_find(lambdas.begin(), lambdas.end()) != lambdas.end())
                throw ConfigError("quantum: lambda_grid must be strictly ascending");
            if (engine == Engine::quantum_fluct) {
                if (params.mu != ChemicalPotential::infinity())
                    throw ConfigError("quantum-fluct: only mu = inf is supported");
                if (n_circuits < 8) throw ConfigError("quantum-fluct: needs at least 8 circuits");
            } else if (params.mu != ChemicalPotential::infinity() && params.mu != ChemicalPotential(0.0)) {
                throw ConfigError("quantum-cgf: mu must be inf (domain wall) or 0 (infinite temperature)");
            }
            break;
    }
}

const std::vector<std::string>& CsvTable::header() {
    static const std::vector<std::string> h = {"series", "engine", "d", "mu", "t", "lambda", "value", "stderr"};
    return h;
}

void CsvTable::append(const CsvTable& other) {
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::string CsvTable::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < header().size(); ++i) s += (i ? "," : "") + header()[i];
    s += '\n';
    for (const auto& r : rows_) {
        s += r.series + ',' + r.engine + ',' + r.d + ',' + r.mu + ',' + r.t + ',' + r.lambda + ',' + r.value + ',' +
             r.stderr_ + '\n';
    }
    return s;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_mu(ChemicalPotential mu) { return format_double(mu.value()); }

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
    return buf;
}

CsvTable run_engine(const ExperimentSpec& spec) {
    spec.validate();
    CsvTable out;
    switch (spec.engine) {
        case Engine::analytic: run_analytic(spec, out); break;
        case Engine::sep_mc: run_sep_mc(spec, out); break;
        case Engine::sep_exact: run_sep_exact(spec, out); break;
        case Engine::coupled_mc: run_coupled_mc(spec, out); break;
        case Engine::coupled_exact: run_coupled_exact(spec, out); break;
        case Engine::magnon_discrete: run_magnon_discrete(spec, out); break;
        case Engine::magnon_hamiltonian: run_magnon_hamiltonian(spec, out); break;
        case Engine::replica_check: run_replica_check(spec, out); break;
        case Engine::quantum_cgf: run_quantum_cgf(spec, out); break;
        case Engine::quantum_fluct: run_quantum_fluct(spec, out); break;
    }
    return out;
}

RunOutput run(const ExperimentSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    RunOutput r;
    r.csv = run_engine(spec).to_string();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.manifest["config"] = spec.to_json();
    r.manifest["engine_version"] = kEngineVersion;
    r.manifest["seed"] = spec.params.seed;
    r.manifest["wall_time_seconds"] = wall;
    r.manifest["output_hash"] = content_hash(r.csv);
    r.manifest["csv_schema_version"] = kCsvSchemaVersion;
    return r;
}

RunOutput run_and_write(const ExperimentSpec& spec, const std::filesystem::path& base_dir) {
    auto r = run(spec);
    const std::filesystem::path csv_path = base_dir / spec.output;
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    std::ofstream(csv_path, std::ios::binary) << r.csv;
    auto manifest_path = csv_path;
    manifest_path.replace_extension(".manifest.json");
    std::ofstream(manifest_path) << r.manifest.dump(2) << '\n';
    if (!std::filesystem::exists(csv_path)) throw ResourceError("could not write " + csv_path.string());
    return r;
}

ExperimentSpec spec_from_document(const json& doc) {
    if (doc.is_object() && doc.contains("config") && doc.contains("engine_version")) return ExperimentSpec::from_json(doc.at("config"));
    return ExperimentSpec::from_json(doc);
}

std::string schema(Engine e) {
    std::ostringstream os;
    os << "engine: " << to_string(e) << "\n";
    os << "csv schema version: " << kCsvSchemaVersion << "\n";
    os << "columns: series,engine,d,mu,t,lambda,value,stderr (empty cell = not applicable)\n";
    os << "series:\n";
    switch (e) {
        case Engine::analytic:
            os << "  C1..C4        asymptotic SEP cumulants at each t\n"
                  "  chi_re,chi_im sqrt(t) F(omega(lambda)) on the lambda grid\n";
            break;
        case Engine::sep_mc:
            os << "  C1..C4        sample cumulants, stderr from a seeded bootstrap\n"
                  "  P(Q=<q>)      empirical probability of transfer q\n"
                  "  chi_re,chi_im log of the empirical <e^{i lambda Q}>\n";
            break;
        case Engine::sep_exact:
            os << "  C1..C4        exact cumulants from the transfer operator (L <= 14)\n"
                  "  chi_re,chi_im exact log Z, phase unwrapped from lambda = 0\n";
            break;
        case Engine::coupled_mc:
            os << "  C1, C2_chain  single-chain mean and variance\n"
                  "  C2bar         E[Q1^2] - E[Q1 Q2] (n_chains = 2)\n"
                  "  C3bar         E[Q^3] - 3E[Q^2 Q'] + 2E[Q Q' Q''] (n_chains = 3)\n";
            break;
        case Engine::coupled_exact:
            os << "  C1, C2_chain, C2bar, dC2 (n_chains = 2)\n"
                  "  C1, C2bar, C3_chain, C3bar, dC3 (n_chains = 3)\n";
            break;
        case Engine::magnon_discrete:
            os << "  M             two-magnon overlap M(t) for a = a(d)\n"
                  "  dC2           tanh^2(mu/2) M(t)\n"
                  "  dC2_scaled    dC2 sqrt(t) / a\n"
                  "  dC2_spinwave  a tanh^2(mu/2) / (16 sqrt(pi t))\n";
            break;
        case Engine::magnon_hamiltonian:
            os << "  M_H           M(t) of the continuous-time generator\n"
                  "  M_scaled      M_H 16 sqrt(pi t) / a, tends to 1\n";
            break;
        case Engine::replica_check:
            os << "  a             a(d)\n"
                  "  singlet       <v|G|v> of the averaged two-replica gate\n"
                  "  deviation     max |G_identity - (K x K + a P x P)| (d >= 2)\n"
                  "  haar_max_pull, haar_max_imag  Haar Monte Carlo vs Weingarten (d <= 2)\n";
            break;
        case Engine::quantum_cgf:
            os << "  chi_re_circuit_<k>, chi_im_circuit_<k>  per-circuit log Z\n"
                  "  chi_re_mean, chi_im_mean  circuit average with stderr (mu = inf)\n"
                  "  chi_re_sep, chi_im_sep    domain-wall SEP asymptote\n"
                  "  mu = 0 gives infinite-temperature per-circuit rows only\n";
            break;
        case Engine::quantum_fluct:
            os << "  deviation     circuit mean of int dlambda |chi - chi_SEP|^2 / t\n"
                  "  slope         log-log slope of deviation against t\n";
            break;
    }
    return os.str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const ResourceError*>(&e)) return 3;
    if (dynamic_cast<const NumericalError*>(&e)) return 4;
    if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
    return 1;
}

}  // namespace chargefcs::cli
