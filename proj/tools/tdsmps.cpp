#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>

#include "tdsmps/errors.hpp"
#include "tdsmps/experiment.hpp"
#include "tdsmps/suites.hpp"

namespace fs = std::filesystem;

namespace {

void set_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("TDSMPS_THREADS")) {
            threads = std::atoi(env);
        }
    }
    if (threads > 0) {
        Eigen::setNbThreads(threads);
    }
}

int cmd_run(const fs::path& config_path, const std::string& output, const std::string& resume, double budget) {
    tdsmps::ExperimentConfig config = tdsmps::load_config(config_path);
    if (!output.empty()) {
        config.output_dir = output;
    }
    tdsmps::RunOptions options;
    options.max_seconds = budget;
    options.log = &std::cerr;
    if (!resume.empty()) {
        options.resume = fs::path(resume);
    }
    const auto outcome = tdsmps::run_experiment(config, options);
    if (!outcome.completed) {
        fmt::print("stopped at beta={:g}: {}\nresume with --resume {}\n", outcome.beta_reached, outcome.message,
                   outcome.checkpoint.string());
        return 3;
    }
    fmt::print("completed beta={:g}, results in {}\n", outcome.beta_reached, outcome.results.string());
    return 0;
}

int cmd_analyze(const fs::path& dir) {
    const auto report = tdsmps::analyze_directory(dir);
    std::ofstream(dir / "report.json") << report.dump(2) << '\n';
    std::cout << report.dump(2) << '\n';
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    tdsmps::suites::SuiteOptions options;
    options.seed = seed;
    bool ok = true;
    for (const auto& r : tdsmps::suites::run_suites(suite, options)) {
        for (const auto& c : r.checks) {
            fmt::print("{} [{}] {}: {}\n", c.passed ? "PASS" : "FAIL", r.suite, c.name, c.detail);
        }
        ok = ok && r.passed();
    }
    fmt::print("{}\n", ok ? "all checks passed" : "some checks failed");
    return ok ? 0 : 1;
}

int cmd_report(const fs::path& dir, const std::string& output) {
    const auto config = tdsmps::load_config(dir / "config.json");
    const auto table = tdsmps::read_results(dir / "results.csv");
    std::vector<tdsmps::SpectrumRecord> spectra;
    if (fs::exists(dir / "spectra.csv")) {
        spectra = tdsmps::read_spectra(dir / "spectra.csv");
    }
    const std::string text = tdsmps::report_table(config, table, spectra);
    const fs::path target = output.empty() ? dir / "report.csv" : fs::path(output);
    std::ofstream(target) << text;
    fmt::print("wrote {}\n", target.string());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermofield-double MPS simulations and entanglement analysis"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: TDSMPS_THREADS or 1)");

    auto* run = app.add_subcommand("run", "Evolve a configured experiment and record results");
    std::string config_path;
    std::string output;
    std::string resume;
    double budget = 0;
    run->add_option("-c,--config", config_path, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output, "Output directory (overrides the config)");
    run->add_option("--resume", resume, "Checkpoint to resume from");
    run->add_option("--budget", budget, "Wall-clock budget in seconds");

    auto* analyze = app.add_subcommand("analyze", "Fit entropy and D_eps scaling, write report.json");
    std::string analyze_dir;
    analyze->add_option("dir", analyze_dir, "Result directory")->required()->check(CLI::ExistingDirectory);

    auto* verify = app.add_subcommand("verify", "Run oracle and property suites");
    std::string suite = "all";
    std::uint64_t seed = 1;
    verify->add_option("--suite", suite, "all, ed, trotter, bounds, majorization or norms");
    verify->add_option("--seed", seed, "Random seed for property checks");

    auto* report = app.add_subcommand("report", "Write a plot-ready table for a result directory");
    std::string report_dir;
    std::string report_out;
    report->add_option("dir", report_dir, "Result directory")->required()->check(CLI::ExistingDirectory);
    report->add_option("-o,--output", report_out, "Output file (default: <dir>/report.csv)");

    CLI11_PARSE(app, argc, argv);
    set_threads(threads);
    try {
        if (*run) {
            return cmd_run(config_path, output, resume, budget);
        }
        if (*analyze) {
            return cmd_analyze(analyze_dir);
        }
        if (*verify) {
            return cmd_verify(suite, seed);
        }
        return cmd_report(report_dir, report_out);
    } catch (const tdsmps::ParseError& e) {
        fmt::print(stderr, "parse error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
