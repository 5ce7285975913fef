#ifndef XTRAP_EXPERIMENT_HPP
#define XTRAP_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "xtrap/drivers.hpp"
#include "xtrap/problems.hpp"
#include "xtrap/records.hpp"

namespace xtrap::cli {

enum class OutputFormat { Csv, Json };
OutputFormat format_from_string(const std::string& s);

// What to solve: one of the built-in problem kinds plus its parameters.
struct ProblemSpec {
    std::string kind;   // linear | pagerank | pagerank-file | poisson | bratu
    Index dim = 10;     // linear: p; pagerank: n
    double spectral_radius = 0.5;
    double alpha = 0.99;          // pagerank damping
    Index nnz_per_col = 10;       // random pagerank pattern density
    std::string matrix_path;      // pagerank-file corpus
    Index grid_n = 32;            // poisson / bratu
    std::string poisson_variant = "q1u2";
    double bratu_lambda = 1.0;
};

struct ExperimentConfig {
    ProblemSpec problem;
    std::vector<drivers::MethodConfig> methods;
    double tol = 1e-7;
    std::size_t max_g_evals = 10000;
    std::uint64_t seed = 0;
    std::string out_path;
    OutputFormat format = OutputFormat::Csv;
};

// Parses the JSON experiment file documented in the README. Unknown or
// ill-typed fields raise ConfigError with the field path.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

problems::FixedPointProblem build_problem(const ProblemSpec& spec, std::uint64_t seed);

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<std::pair<std::string, std::string>> failures; // (method id, error)
};

// Runs every configured method on the problem; a failing method is reported
// in `failures` without aborting its siblings.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV columns: method, eval_index, residual, lambda_selected (empty when not
// applicable), status. Residuals print with enough digits to round-trip.
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(std::istream& in);

// JSON mirrors RunRecord verbatim; wall-clock timing is informational and can
// be suppressed where byte-stable output matters.
void write_json(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing = true);
std::vector<RunRecord> read_json(std::istream& in);

void emit_records(const std::vector<RunRecord>& records, const std::string& path, OutputFormat format,
                  bool include_timing = true);

} // namespace xtrap::cli

#endif
