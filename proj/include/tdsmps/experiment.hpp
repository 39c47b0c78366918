#pragma once

// Experiment configuration, result persistence and the run/analyze/report
// drivers behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdsmps/evolution.hpp"
#include "tdsmps/fitting.hpp"
#include "tdsmps/models.hpp"

namespace tdsmps {

inline constexpr int config_schema_version = 1;
inline constexpr int csv_schema_version = 1;
inline constexpr std::uint32_t checkpoint_format_version = 1;

/// Measurement grid: an explicit list, or `count` points between `min` and
/// `max` spaced logarithmically (default) or linearly. Generated points are
/// snapped to multiples of dtau.
struct BetaGridSpec {
    std::vector<double> values;
    double min = 1;
    double max = 16;
    int count = 9;
    std::string spacing = "log";
    bool include_zero = false;

    [[nodiscard]] bool is_explicit() const { return !values.empty(); }
    friend bool operator==(const BetaGridSpec&, const BetaGridSpec&) = default;
};

struct EvolutionSettings {
    double dtau = 0.01;
    int order = 4;
    long max_rank = 0; // 0: unlimited
    double rel_weight_cutoff = 1e-12;
    BetaGridSpec grid;
    friend bool operator==(const EvolutionSettings&, const EvolutionSettings&) = default;
};

struct Budget {
    double max_seconds = 0;        // 0: none
    long max_bond_dimension = 0;   // 0: none
    friend bool operator==(const Budget&, const Budget&) = default;
};

struct AnalysisSettings {
    double central_charge = 1.0;
    /// Scaling dimension entering xi_beta = beta / (pi * Delta).
    double scaling_dimension = 1.0;
    /// Fit window in beta; unset bounds default to the upper half of the grid.
    std::optional<double> fit_min;
    std::optional<double> fit_max;
    double saturation_tolerance = 0.02;
    friend bool operator==(const AnalysisSettings&, const AnalysisSettings&) = default;
};

struct ExperimentConfig {
    int schema_version = config_schema_version;
    std::string name = "experiment";
    ModelSpec model;
    EvolutionSettings evolution;
    std::vector<double> alphas{1.0, 0.5};
    std::vector<double> epsilons{1e-5, 1e-6};
    /// Tracked bonds (1-based). Empty: the center bond L/2.
    std::vector<long> bonds;
    bool track_all_bonds = false;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    Budget budget;
    AnalysisSettings analysis;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ParseError on unknown keys, wrong types or an unsupported schema.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

/// Sorted, deduplicated measurement betas.
std::vector<double> measurement_grid(const ExperimentConfig& config);
std::vector<long> tracked_bonds(const ExperimentConfig& config);
EvolutionConfig evolution_config(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

struct ResultRow {
    int version = csv_schema_version;
    std::string model_id;
    double beta = 0;
    long bond = 0;
    long bond_dimension = 0;
    std::vector<double> entropies; // one per alpha, in header order
    double eps_step = 0;
    double energy = 0;
    double log_norm = 0;
    double wall_ms = 0;
};

struct ResultTable {
    std::vector<double> alphas;
    std::vector<ResultRow> rows;
};

std::string csv_header(const std::vector<double>& alphas);
std::string format_row(const ResultRow& row);
/// Throws ParseError with the 1-based line number of the offending row.
ResultTable read_results(std::istream& in);
ResultTable read_results(const std::filesystem::path& path);

/// Full spectra at tracked bonds, one line per (beta, bond).
struct SpectrumRecord {
    double beta = 0;
    long bond = 0;
    std::vector<double> weights;
};
std::string format_spectrum(const SpectrumRecord& record);
std::vector<SpectrumRecord> read_spectra(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

struct Checkpoint {
    PurificationMps<double> state;
    double beta = 0;
    nlohmann::json provenance;
};

void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

struct RunOptions {
    std::optional<std::filesystem::path> resume;
    /// Overrides config.budget.max_seconds when positive.
    double max_seconds = 0;
    std::ostream* log = nullptr;
};

struct RunOutcome {
    bool completed = false;
    double beta_reached = 0;
    std::filesystem::path results;
    std::filesystem::path checkpoint;
    std::string message;
};

/// Files in the output directory: config.json, results.csv, spectra.csv,
/// checkpoint.bin and status.json. A budget stop returns completed = false
/// with `checkpoint` as the resume token.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Fits, theory predictions and saturation flags for a result directory.
nlohmann::json analyze_results(const ExperimentConfig& config, const ResultTable& table,
                               const std::vector<SpectrumRecord>& spectra);
nlohmann::json analyze_directory(const std::filesystem::path& dir);

/// Plot-ready table: beta, log(beta), then per alpha S and the CFT line, then
/// D_eps per epsilon, for the center bond.
std::string report_table(const ExperimentConfig& config, const ResultTable& table,
                         const std::vector<SpectrumRecord>& spectra);

} // namespace tdsmps
