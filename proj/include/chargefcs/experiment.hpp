#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chargefcs/core.hpp"

namespace chargefcs::cli {

inline constexpr const char* kEngineVersion = "chargefcs 1.0.0";
/// Bumped whenever the CSV columns or series names change.
inline constexpr int kCsvSchemaVersion = 1;

enum class Engine {
    sep_mc,
    sep_exact,
    coupled_mc,
    coupled_exact,
    magnon_discrete,
    magnon_hamiltonian,
    replica_check,
    quantum_cgf,
    quantum_fluct,
    analytic,
};

Engine engine_from_string(std::string_view name);
std::string to_string(Engine e);
std::vector<Engine> all_engines();

/// One run. Every optional field has a default; to_json() writes the fully resolved form,
/// which from_json() reads back unchanged.
struct ExperimentSpec {
    Engine engine = Engine::analytic;
    ModelParams params;
    std::uint64_t n_samples = 100'000;
    /// Empty means the engine default (101 points on [-3, 3]).
    std::vector<double> lambda_grid;
    /// Empty means {params.t}.
    std::vector<int> t_list;
    /// Empty means {params.d}.
    std::vector<double> d_list;
    int n_circuits = 35;
    int n_vectors = 16;
    std::string output = "results.csv";

    static ExperimentSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// Throws ConfigError for invalid combinations and ResourceError when the request
    /// exceeds an engine cap. Called by run() before any work starts.
    void validate() const;

    std::vector<double> resolved_lambdas() const;
    std::vector<int> resolved_times() const;
    std::vector<double> resolved_ds() const;
};

/// Tidy table with the columns series,engine,d,mu,t,lambda,value,stderr. Empty cells mark
/// columns that do not apply to a row.
class CsvTable {
public:
    static const std::vector<std::string>& header();

    struct Row {
        std::string series;
        std::string engine;
        std::string d;
        std::string mu;
        std::string t;
        std::string lambda;
        std::string value;
        std::string stderr_;
    };

    void add(Row r) { rows_.push_back(std::move(r)); }
    void append(const CsvTable& other);
    const std::vector<Row>& rows() const { return rows_; }
    std::string to_string() const;

private:
    std::vector<Row> rows_;
};

/// %.17g, with "inf" / "-inf" / "nan" spelled out.
std::string format_double(double x);
std::string format_mu(ChemicalPotential mu);
/// "fnv1a64:<16 hex digits>".
std::string content_hash(std::string_view bytes);

CsvTable run_engine(const ExperimentSpec& spec);

struct RunOutput {
    std::string csv;
    nlohmann::json manifest;
};

/// Validates, runs, and builds the manifest (config, engine_version, seed,
/// wall_time_seconds, output_hash, csv_schema_version). Keys are sorted.
RunOutput run(const ExperimentSpec& spec);
/// run() and write `spec.output` plus `<stem>.manifest.json` next to it.
RunOutput run_and_write(const ExperimentSpec& spec, const std::filesystem::path& base_dir = {});

/// Accepts either a bare spec or a manifest (reads its "config" entry).
ExperimentSpec spec_from_document(const nlohmann::json& doc);

/// Column and series documentation for `chargefcs schema <engine>`.
std::string schema(Engine e);

/// 2 for ConfigError, 3 for ResourceError, 4 for NumericalError, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace chargefcs::cli
