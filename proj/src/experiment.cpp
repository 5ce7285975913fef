#include "xtrap/experiment.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>

namespace xtrap::cli {

using nlohmann::json;

OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw ConfigError("format", "expected 'csv' or 'json', got '" + s + "'");
}

namespace {

lambda::RegularizationPolicy parse_policy(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    const std::string policy = j.value("policy", "");
    if (policy == "fixed") return lambda::RegularizationPolicy::fixed(j.value("lambda", 0.0));
    std::vector<double> grid = lambda::default_grid();
    if (j.contains("grid")) grid = j.at("grid").get<std::vector<double>>();
    if (policy == "grid-search") return lambda::RegularizationPolicy::grid_search(std::move(grid));
    if (policy == "gcv") return lambda::RegularizationPolicy::gcv(std::move(grid));
    throw ConfigError(path + ".policy", "expected fixed | grid-search | gcv");
}

drivers::MethodConfig parse_method(const json& j, std::size_t index) {
    const std::string path = "methods[" + std::to_string(index) + "]";
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    drivers::MethodConfig cfg;
    if (!j.contains("method")) throw ConfigError(path + ".method", "required");
    cfg.method = drivers::method_from_string(j.at("method").get<std::string>());
    if (j.contains("window")) cfg.window = j.at("window").get<Index>();
    cfg.mixing_beta = j.value("mixing_beta", 1.0);
    cfg.tau = j.value("tau", 10.0);
    if (j.contains("reg")) cfg.reg = parse_policy(j.at("reg"), path + ".reg");
    cfg.use_t_tilde = j.value("use_t_tilde", false);
    cfg.svda_sum_normalize = j.value("svda_sum_normalize", true);
    return cfg;
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        if (!j.contains("problem")) throw ConfigError("problem", "required");
        const json& p = j.at("problem");
        cfg.problem.kind = p.value("kind", "");
        if (cfg.problem.kind.empty()) throw ConfigError("problem.kind", "required");
        cfg.problem.dim = p.value("dim", p.value("n", Index{10}));
        cfg.problem.spectral_radius = p.value("spectral_radius", 0.5);
        cfg.problem.alpha = p.value("alpha", 0.99);
        cfg.problem.nnz_per_col = p.value("nnz_per_col", Index{10});
        cfg.problem.matrix_path = p.value("path", "");
        cfg.problem.grid_n = p.value("grid_n", Index{32});
        cfg.problem.poisson_variant = p.value("variant", "q1u2");
        cfg.problem.bratu_lambda = p.value("lambda", 1.0);

        if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
            throw ConfigError("methods", "at least one method is required");
        for (std::size_t i = 0; i < j.at("methods").size(); ++i)
            cfg.methods.push_back(parse_method(j.at("methods")[i], i));

        cfg.tol = j.value("tol", 1e-7);
        if (!(cfg.tol > 0.0)) throw ConfigError("tol", "must be positive");
        cfg.max_g_evals = j.value("max_g_evals", std::size_t{10000});
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.out_path = j.value("out", "");
        cfg.format = format_from_string(j.value("format", "csv"));

        for (auto& m : cfg.methods) {
            m.tol = cfg.tol;
            m.max_g_evals = cfg.max_g_evals;
            m.seed = cfg.seed;
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError("<root>", std::string("invalid config: ") + e.what());
    }
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

problems::FixedPointProblem build_problem(const ProblemSpec& spec, std::uint64_t seed) {
    if (spec.kind == "linear") {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        const Index p = spec.dim;
        Matrix m(p, p);
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j) m(i, j) = normal(rng);
        const double rho = Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
        m *= spec.spectral_radius / rho;
        Vector b(p), s0(p);
        for (Index i = 0; i < p; ++i) b[i] = normal(rng);
        for (Index i = 0; i < p; ++i) s0[i] = normal(rng);
        return problems::make_linear_problem(m, b, s0);
    }
    if (spec.kind == "pagerank" || spec.kind == "pagerank-file") {
        problems::SparseStochasticMatrix s = (spec.kind == "pagerank")
                                                 ? problems::make_random_stochastic(spec.dim, spec.nnz_per_col, seed)
                                                 : problems::ingest_matrix_market(spec.matrix_path);
        const Index n = s.dimension();
        Vector u0 = Vector::Constant(n, 1.0 / static_cast<double>(n));
        return problems::make_pagerank_problem(s, spec.alpha, u0);
    }
    if (spec.kind == "poisson") {
        problems::PoissonVariant variant;
        if (spec.poisson_variant == "q1u2")
            variant = problems::PoissonVariant::q1u2;
        else if (spec.poisson_variant == "q1u4")
            variant = problems::PoissonVariant::q1u4;
        else
            throw ConfigError("problem.variant", "expected q1u2 | q1u4");
        return problems::make_nonlinear_poisson_problem(spec.grid_n, variant);
    }
    if (spec.kind == "bratu") return problems::make_bratu_problem(spec.grid_n, spec.bratu_lambda);
    throw ConfigError("problem.kind", "unknown kind '" + spec.kind + "'");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult result;
    std::optional<problems::FixedPointProblem> problem;
    std::string construction_error;
    try {
        problem = build_problem(cfg.problem, cfg.seed);
    } catch (const std::exception& e) {
        construction_error = e.what();
    }
    for (const auto& m : cfg.methods) {
        const std::string id = drivers::to_string(m.method);
        if (!problem) {
            result.failures.emplace_back(id, construction_error);
            continue;
        }
        try {
            result.records.push_back(drivers::run_method(*problem, m));
        } catch (const std::exception& e) {
            result.failures.emplace_back(id, e.what());
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

std::string round_trip_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << "method,eval_index,residual,lambda_selected,status\n";
    for (const auto& rec : records) {
        std::size_t lam_cursor = 0;
        for (std::size_t i = 0; i < rec.residuals.size(); ++i) {
            out << rec.method << ',' << i << ',' << round_trip_double(rec.residuals[i]) << ',';
            // A selection made after eval count c attaches to row c-1.
            if (lam_cursor < rec.selected_lambdas.size() && rec.selected_lambdas[lam_cursor].first == i + 1) {
                out << round_trip_double(rec.selected_lambdas[lam_cursor].second);
                ++lam_cursor;
            }
            out << ',' << to_string(rec.status) << '\n';
        }
    }
}

std::vector<RunRecord> read_csv(std::istream& in) {
    std::vector<RunRecord> records;
    std::string line;
    if (!std::getline(in, line)) throw IoError("read_csv: empty input");
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::array<std::string, 5> field;
        std::size_t start = 0, fi = 0;
        for (std::size_t i = 0; i <= line.size() && fi < 5; ++i) {
            if (i == line.size() || line[i] == ',') {
                field[fi++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (fi != 5) throw ParseError("read_csv: expected 5 fields", line_no);
        if (records.empty() || records.back().method != field[0]) {
            records.emplace_back();
            records.back().method = field[0];
        }
        RunRecord& rec = records.back();
        rec.residuals.push_back(std::stod(field[2]));
        if (!field[3].empty()) rec.selected_lambdas.emplace_back(rec.residuals.size(), std::stod(field[3]));
        rec.status = run_status_from_string(field[4]);
    }
    return records;
}

void write_json(std::ostream& out, const std::vector<RunRecord>& records, bool include_timing) {
    json arr = json::array();
    for (const auto& rec : records) {
        json r;
        r["method"] = rec.method;
        r["residuals"] = rec.residuals;
        json lams = json::array();
        for (const auto& [idx, lam] : rec.selected_lambdas) lams.push_back({idx, lam});
        r["selected_lambdas"] = lams;
        r["g_eval_count"] = rec.g_eval_count();
        if (include_timing) r["wall_ms"] = rec.wall_ms;
        r["status"] = to_string(rec.status);
        arr.push_back(std::move(r));
    }
    out << arr.dump(2) << '\n';
}

std::vector<RunRecord> read_json(std::istream& in) {
    json arr;
    try {
        in >> arr;
    } catch (const json::exception& e) {
        throw IoError(std::string("read_json: ") + e.what());
    }
    std::vector<RunRecord> records;
    for (const auto& r : arr) {
        RunRecord rec;
        rec.method = r.at("method").get<std::string>();
        rec.residuals = r.at("residuals").get<std::vector<double>>();
        for (const auto& pair : r.at("selected_lambdas"))
            rec.selected_lambdas.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<double>());
        rec.wall_ms = r.value("wall_ms", 0.0);
        rec.status = run_status_from_string(r.at("status").get<std::string>());
        records.push_back(std::move(rec));
    }
    return records;
}

void emit_records(const std::vector<RunRecord>& records, const std::string& path, OutputFormat format,
                  bool include_timing) {
    if (records.empty()) throw std::invalid_argument("emit_records: no records");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    if (format == OutputFormat::Csv)
        write_csv(out, records);
    else
        write_json(out, records, include_timing);
    if (!out) throw IoError("write to '" + path + "' failed");
}

} // namespace xtrap::cli
