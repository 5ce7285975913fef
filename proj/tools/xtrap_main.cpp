#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "xtrap/experiment.hpp"

namespace {

int run(const std::string& config_path, const std::string& out_override, const std::string& format_override,
        std::optional<std::uint64_t> seed_override) {
    using namespace xtrap;

    cli::ExperimentConfig cfg = cli::load_experiment_config(config_path);
    if (seed_override) {
        cfg.seed = *seed_override;
        for (auto& m : cfg.methods) m.seed = *seed_override;
    }
    if (!out_override.empty()) cfg.out_path = out_override;
    if (!format_override.empty()) cfg.format = cli::format_from_string(format_override);
    if (cfg.out_path.empty()) cfg.out_path = (cfg.format == cli::OutputFormat::Csv) ? "records.csv" : "records.json";

    // Environment override applies to the output directory only.
    if (const char* dir = std::getenv("XTRAP_OUT_DIR")) {
        std::filesystem::path p(cfg.out_path);
        cfg.out_path = (std::filesystem::path(dir) / p.filename()).string();
    }

    cli::ExperimentResult result = cli::run_experiment(cfg);

    for (const auto& [method, error] : result.failures)
        std::cerr << "error: method " << method << " failed: " << error << '\n';

    if (!result.records.empty()) {
        cli::emit_records(result.records, cfg.out_path, cfg.format);
        for (const auto& rec : result.records)
            std::cout << rec.method << ": " << to_string(rec.status) << " after " << rec.g_eval_count()
                      << " G-evaluations"
                      << (rec.residuals.empty() ? "" : ", final residual " + std::to_string(rec.residuals.back()))
                      << '\n';
        std::cout << "wrote " << cfg.out_path << '\n';
    }

    if (!result.failures.empty()) return 1;
    bool any_diverged = false;
    bool all_converged = !result.records.empty();
    for (const auto& rec : result.records) {
        if (rec.status == RunStatus::Diverged) any_diverged = true;
        if (rec.status != RunStatus::Converged) all_converged = false;
    }
    if (any_diverged) return 2;
    return all_converged ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shanks-based extrapolation and Anderson-type mixing benchmark runner"};

    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<std::uint64_t> seed;
    bool list_methods = false;

    app.add_option("--config", config_path, "experiment config file (JSON)");
    app.add_option("--out", out_path, "output path (overrides config)");
    app.add_option("--format", format, "csv or json (overrides config)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_flag("--list-methods", list_methods, "print the available method ids and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_methods) {
        using xtrap::drivers::Method;
        for (Method m : {Method::PlainFixedPoint, Method::SVDA, Method::RNLA, Method::RRRE, Method::RTSA, Method::AA,
                         Method::RAA, Method::AtmRre, Method::AtmMpe, Method::AtmMmpe, Method::StabilizedAA})
            std::cout << xtrap::drivers::to_string(m) << '\n';
        return 0;
    }

    if (config_path.empty()) {
        std::cerr << "error: --config is required (or use --list-methods)\n";
        return 1;
    }

    try {
        return run(config_path, out_path, format, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
