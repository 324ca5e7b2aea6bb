#include "chargefcs/figures.hpp"

#include <cmath>
#include <fstream>

#include "chargefcs/analytic.hpp"
#include "chargefcs/quantum.hpp"
#include "chargefcs/sep.hpp"

namespace chargefcs::cli {

using nlohmann::json;

namespace {

CsvTable::Row make_row(std::string series, std::string engine, std::string d, std::string mu, double t, double value,
                       std::string err = {}) {
    return {std::move(series), std::move(engine), std::move(d), std::move(mu), format_double(t), "",
            format_double(value), std::move(err)};
}

// c * t^p through (t0, y0), sampled at `times`.
void add_guide(CsvTable& table, const std::string& series, double exponent, double t0, double y0,
               const std::vector<double>& times) {
    for (double t : times) table.add(make_row(series, "guide", "", "", t, y0 * std::pow(t / t0, exponent)));
}

std::vector<int> range(int lo, int hi, int step) {
    std::vector<int> v;
    for (int t = lo; t <= hi; t += step) v.push_back(t);
    return v;
}

ExperimentSpec base_spec(Engine e, const FigureOptions& o) {
    ExperimentSpec s;
    s.engine = e;
    s.params.seed = o.seed;
    return s;
}

FigureBundle fig1b(const FigureOptions& o) {
    auto s = base_spec(Engine::quantum_cgf, o);
    s.params.L = o.quick ? 10 : 20;
    s.params.mu = ChemicalPotential::infinity();
    s.t_list = o.quick ? std::vector<int>{4, 8} : std::vector<int>{10, 24};
    s.params.t = s.t_list.back();
    s.n_circuits = o.quick ? 8 : 35;
    s.lambda_grid = analytic::uniform_grid(-3.0, 3.0, o.quick ? 31 : 61);
    FigureBundle b{run_engine(s), {}};
    b.meta = {{"panel", "fig1b"},
              {"x", "lambda"},
              {"y", "value"},
              {"y_transform", "value/sqrt(t)"},
              {"xscale", "linear"},
              {"yscale", "linear"},
              {"facet", "t"},
              {"overlay_series", {"chi_re_sep", "chi_im_sep"}},
              {"mean_series", {"chi_re_mean", "chi_im_mean"}},
              {"guides", json::array()},
              {"config", s.to_json()}};
    return b;
}

FigureBundle fig2a(const FigureOptions& o) {
    const std::vector<double> ds{1.5, 2.0, 3.0};
    const auto mu = ChemicalPotential(0.1);
    FigureBundle b;

    auto mc = base_spec(Engine::coupled_mc, o);
    mc.params.L = o.quick ? 32 : 64;
    mc.params.n_chains = 2;
    mc.params.mu = mu;
    mc.t_list = o.quick ? std::vector<int>{4, 8} : std::vector<int>{10, 20, 40, 80};
    mc.d_list = ds;
    mc.n_samples = o.quick ? 2000 : 200'000;
    b.table.append(run_engine(mc));

    auto an = base_spec(Engine::analytic, o);
    an.params.mu = mu;
    an.t_list = o.quick ? range(2, 8, 2) : range(5, 200, 5);
    an.lambda_grid = {0.0};
    b.table.append(run_engine(an));

    auto mg = base_spec(Engine::magnon_discrete, o);
    mg.params.L = o.quick ? 24 : 160;
    mg.params.t = o.quick ? 30 : 200;
    mg.params.mu = mu;
    mg.d_list = ds;
    const auto inset = run_engine(mg);
    b.table.append(inset);

    std::vector<double> gt;
    for (int t : range(o.quick ? 5 : 20, mg.params.t, o.quick ? 5 : 20)) gt.push_back(t);
    add_guide(b.table, "guide_t^-0.5", -0.5, gt.front(), analytic::spinwave_dc2(mu, gt.front(), 2.0), gt);
    b.meta = {{"panel", "fig2a"},
              {"x", "t"},
              {"main_series", {"C2bar", "C2"}},
              {"inset_series", {"dC2", "dC2_spinwave"}},
              {"collapse_series", "dC2_scaled"},
              {"xscale", "log"},
              {"yscale", "log"},
              {"guides", {{{"series", "guide_t^-0.5"}, {"exponent", -0.5}}}},
              {"config", {mc.to_json(), an.to_json(), mg.to_json()}}};
    return b;
}

FigureBundle fig2b(const FigureOptions& o) {
    const std::vector<double> ds{1.5, 2.0, 3.0};
    FigureBundle b;
    json configs = json::array();

    for (double m : {0.1, 2.0}) {
        auto ex = base_spec(Engine::coupled_exact, o);
        ex.params.L = o.quick ? 4 : 6;
        ex.params.n_chains = 3;
        ex.params.mu = ChemicalPotential(m);
        ex.t_list = range(1, o.quick ? 3 : 6, 1);
        ex.d_list = ds;
        const auto t = run_engine(ex);
        b.table.append(t);
        for (const auto& r : t.rows()) {
            if (r.series != "dC3") continue;
            auto scaled = r;
            scaled.series = "dC3_over_a";
            scaled.value = format_double(std::stod(r.value) / a_of_d(std::stod(r.d)));
            b.table.add(scaled);
        }
        configs.push_back(ex.to_json());
    }

    // Softened model: dC3 ~ 3 mu M_H(t) / 4 in linear response, shown per unit a.
    auto hm = base_spec(Engine::magnon_hamiltonian, o);
    hm.params.L = o.quick ? 30 : 200;
    hm.params.mu = ChemicalPotential(0.1);
    hm.t_list = o.quick ? range(2, 20, 2) : range(5, 100, 5);
    hm.d_list = {2.0};
    const auto ht = run_engine(hm);
    const double a = a_of_d(2.0), mu = 0.1;
    for (const auto& r : ht.rows()) {
        if (r.series != "M_H") continue;
        const double t = std::stod(r.t);
        b.table.add(make_row("dC3_spinwave_over_a", "magnon-hamiltonian", r.d, r.mu, t, 0.75 * mu * std::stod(r.value) / a));
        b.table.add(make_row("dC3_asymptote_over_a", "analytic", r.d, r.mu, t, analytic::spinwave_dc3(mu, t, 2.0) / a));
    }
    configs.push_back(hm.to_json());
    b.meta = {{"panel", "fig2b"},
              {"x", "t"},
              {"main_series", {"dC3_spinwave_over_a", "dC3_asymptote_over_a"}},
              {"inset_series", {"dC3_over_a"}},
              {"xscale", "log"},
              {"yscale", "log"},
              {"guides", json::array()},
              {"config", configs}};
    return b;
}

FigureBundle fig2c(const FigureOptions& o) {
    FigureBundle b;
    const std::vector<int> times = o.quick ? std::vector<int>{4, 9, 16} : std::vector<int>{16, 25, 36, 64, 100};
    const int n_batches = o.quick ? 8 : 20;
    const std::uint64_t per_batch = o.quick ? 2'000 : 50'000;
    const int L = o.quick ? 32 : 128;
    std::vector<double> gt;
    for (int t : times) {
        std::vector<Histogram> batches;
        for (int k = 0; k < n_batches; ++k) {
            sep::SepRunConfig cfg;
            cfg.params.L = L;
            cfg.params.t = t;
            cfg.params.mu = ChemicalPotential(0.0);
            cfg.params.seed = o.seed;
            cfg.n_samples = per_batch;
            cfg.first_sample = std::uint64_t(k) * per_batch;
            batches.push_back(sep::run_sep_fcs(cfg).histogram);
        }
        const auto kp = sep::kurtosis_proxy(batches);
        b.table.add(make_row("kappa_proxy", "sep-mc", "", "0", t, kp.value, format_double(kp.std_error)));
        b.table.add(make_row("excess_proxy_abs", "sep-mc", "", "0", t, std::abs(kp.value - 3.0), format_double(kp.std_error)));
        b.table.add(make_row("kappa_prediction", "analytic", "", "0", t, 3.0 + analytic::kurtosis_prediction(t)));
        b.table.add(make_row("excess_prediction_abs", "analytic", "", "0", t, std::abs(analytic::kurtosis_prediction(t))));
        gt.push_back(t);
    }
    add_guide(b.table, "guide_t^-0.5", -0.5, gt.front(), std::abs(analytic::kurtosis_prediction(gt.front())), gt);
    b.meta = {{"panel", "fig2c"},
              {"x", "t"},
              {"main_series", {"kappa_proxy", "kappa_prediction"}},
              {"log_series", {"excess_proxy_abs", "excess_prediction_abs"}},
              {"xscale", "log"},
              {"yscale", "linear"},
              {"guides", {{{"series", "guide_t^-0.5"}, {"exponent", -0.5}}}},
              {"config",
               {{"L", L}, {"mu", 0}, {"times", times}, {"n_batches", n_batches}, {"samples_per_batch", per_batch},
                {"seed", o.seed}}}};
    return b;
}

FigureBundle figS1(const FigureOptions& o) {
    auto s = base_spec(Engine::magnon_hamiltonian, o);
    s.params.L = o.quick ? 40 : 400;
    s.d_list = {d_of_a(0.05)};
    s.t_list = o.quick ? range(5, 50, 5) : range(10, 400, 10);
    FigureBundle b{run_engine(s), {}};
    std::vector<double> ts(s.t_list.begin(), s.t_list.end());
    for (double t : ts) b.table.add(make_row("asymptote", "analytic", "", "", t, 1.0));
    b.meta = {{"panel", "figS1"},
              {"x", "t"},
              {"main_series", {"M_scaled", "asymptote"}},
              {"xscale", "linear"},
              {"yscale", "linear"},
              {"guides", json::array()},
              {"config", s.to_json()}};
    return b;
}

FigureBundle figS2(const FigureOptions& o) {
    quantum::EnsembleConfig cfg;
    cfg.L = o.quick ? 10 : 20;
    cfg.times = o.quick ? std::vector<int>{2, 4, 6, 8} : std::vector<int>{8, 12, 16, 20, 24};
    cfg.lambdas = analytic::uniform_grid(-2.0, 2.0, o.quick ? 21 : 41);
    cfg.n_circuits = o.quick ? 8 : 35;
    cfg.seed = o.seed;
    const auto ensemble = quantum::run_ensemble(cfg);
    FigureBundle b;
    for (std::size_t c = 0; c < std::min<std::size_t>(8, ensemble.size()); ++c) {
        const auto dev = quantum::circuit_deviation(ensemble[c]);
        for (std::size_t i = 0; i < dev.size(); ++i)
            b.table.add(make_row("deviation_circuit_" + std::to_string(c), "quantum-fluct", "", "inf", cfg.times[i], dev[i]));
    }
    const auto fit = quantum::fluctuation_decay(ensemble);
    for (std::size_t i = 0; i < fit.times.size(); ++i)
        b.table.add(make_row("deviation_mean", "quantum-fluct", "", "inf", fit.times[i], fit.deviation[i]));
    b.table.add({"slope", "quantum-fluct", "", "inf", "", "", format_double(fit.slope), ""});
    std::vector<double> ts(cfg.times.begin(), cfg.times.end());
    add_guide(b.table, "guide_t^-2", -2.0, ts.front(), fit.deviation.front(), ts);
    b.meta = {{"panel", "figS2"},
              {"x", "t"},
              {"main_series", {"deviation_mean"}},
              {"circuit_series_prefix", "deviation_circuit_"},
              {"xscale", "log"},
              {"yscale", "log"},
              {"guides", {{{"series", "guide_t^-2"}, {"exponent", -2.0}}}},
              {"config",
               {{"L", cfg.L}, {"times", cfg.times}, {"lambda_lo", -2.0}, {"lambda_hi", 2.0},
                {"n_lambda", cfg.lambdas.size()}, {"n_circuits", cfg.n_circuits}, {"seed", cfg.seed}}}};
    return b;
}

}  // namespace

std::vector<std::string> figure_names() { return {"fig1b", "fig2a", "fig2b", "fig2c", "figS1", "figS2"}; }

FigureBundle figure_dataset(std::string_view name, const FigureOptions& opts) {
    FigureBundle b;
    if (name == "fig1b") b = fig1b(opts);
    else if (name == "fig2a") b = fig2a(opts);
    else if (name == "fig2b") b = fig2b(opts);
    else if (name == "fig2c") b = fig2c(opts);
    else if (name == "figS1") b = figS1(opts);
    else if (name == "figS2") b = figS2(opts);
    else throw ConfigError("unknown figure '" + std::string(name) + "'");
    b.meta["engine_version"] = kEngineVersion;
    b.meta["csv_schema_version"] = kCsvSchemaVersion;
    b.meta["quick"] = opts.quick;
    return b;
}

void write_figure(std::string_view name, const std::filesystem::path& out_dir, const FigureOptions& opts) {
    const auto b = figure_dataset(name, opts);
    std::filesystem::create_directories(out_dir);
    const std::string n(name);
    std::ofstream(out_dir / (n + ".csv"), std::ios::binary) << b.table.to_string();
    std::ofstream(out_dir / (n + ".meta.json")) << b.meta.dump(2) << '\n';
}

}  // namespace chargefcs::cli
