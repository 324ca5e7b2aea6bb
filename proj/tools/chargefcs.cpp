#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "chargefcs/acceptance.hpp"
#include "chargefcs/core.hpp"
#include "chargefcs/experiment.hpp"
#include "chargefcs/figures.hpp"

namespace cli = chargefcs::cli;

namespace {

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw chargefcs::ConfigError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw chargefcs::ConfigError(path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full counting statistics of charge transfer in U(1) random circuits and their classical models"};
    app.require_subcommand(1);
    int threads = 0;
    std::int64_t seed = -1;
    app.add_option("--threads", threads, "OpenMP worker count (default: runtime default)")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "override the master seed")->check(CLI::NonNegativeNumber);

    auto* run_cmd = app.add_subcommand("run", "run one experiment spec (or rerun a manifest)");
    std::string spec_path, out_dir;
    run_cmd->add_option("spec", spec_path, "JSON spec or manifest")->required();
    run_cmd->add_option("--out-dir", out_dir, "directory the spec's output path is relative to");

    auto* fig_cmd = app.add_subcommand("figure", "emit the CSV bundle for one figure panel");
    std::string fig_name, fig_out = ".";
    bool quick = false;
    fig_cmd->add_option("name", fig_name, "fig1b | fig2a | fig2b | fig2c | figS1 | figS2 | all")->required();
    fig_cmd->add_option("--out", fig_out, "output directory");
    fig_cmd->add_flag("--quick", quick, "small sizes, for smoke tests");

    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
    std::vector<int> ids;
    verify_cmd->add_option("--only", ids, "criterion ids to run");

    auto* schema_cmd = app.add_subcommand("schema", "describe the CSV output of an engine");
    std::string schema_engine;
    schema_cmd->add_option("engine", schema_engine, "engine name")->required();

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (*run_cmd) {
            const auto doc = read_json(spec_path);
            auto spec = cli::spec_from_document(doc);
            if (seed >= 0) spec.params.seed = std::uint64_t(seed);
            const auto out = cli::run_and_write(spec, out_dir);
            const std::string hash = out.manifest.at("output_hash");
            std::cout << "wrote " << spec.output << " (" << hash << ")\n";
            if (doc.contains("output_hash") && seed < 0) {
                const bool same = doc.at("output_hash") == hash;
                std::cout << "reproduces manifest: " << (same ? "yes" : "no") << "\n";
                if (!same) return 1;
            }
        } else if (*fig_cmd) {
            cli::FigureOptions opts;
            opts.quick = quick;
            if (seed >= 0) opts.seed = std::uint64_t(seed);
            const auto names = fig_name == "all" ? cli::figure_names() : std::vector<std::string>{fig_name};
            for (const auto& n : names) {
                cli::write_figure(n, fig_out, opts);
                std::cout << "wrote " << fig_out << "/" << n << ".csv\n";
            }
        } else if (*verify_cmd) {
            bool ok = true;
            for (int id : ids.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9} : ids) {
                const auto r = chargefcs::acceptance::run({id});
                if (r.empty()) throw chargefcs::ConfigError("no criterion with id " + std::to_string(id));
                std::cout << chargefcs::acceptance::format(r.front()) << std::endl;
                ok = ok && r.front().passed;
            }
            return ok ? 0 : 1;
        } else if (*schema_cmd) {
            std::cout << cli::schema(cli::engine_from_string(schema_engine));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
    return 0;
}
