#pragma once

// Self-check suites run by `tdsmps verify`: oracle equivalence, Trotter order,
// the approximation and entropy bounds, majorization and norm inequalities.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tdsmps/evolution.hpp"

namespace tdsmps::suites {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    [[nodiscard]] bool passed() const;
};

using PlanFactory = std::function<TrotterPlan(int order, double dtau)>;

struct SuiteOptions {
    std::uint64_t seed = 1;
    /// Plan used by the Trotter-order suite; defaults to build_trotter_plan.
    PlanFactory plan_factory;
};

/// Measured log-log slopes of the dense 2-norm error against dtau.
struct TrotterOrderResult {
    std::vector<double> dtaus;
    std::vector<double> errors;
    double slope = 0;
};

/// XXZ Delta=1, L=6, beta=1 evolved without truncation against exact_tds.
TrotterOrderResult trotter_order(int order, const std::vector<double>& dtaus, const PlanFactory& plan_factory = {});

SuiteResult ed_equivalence(const SuiteOptions& options = {});
SuiteResult trotter(const SuiteOptions& options = {});
/// Eq. (7) distance bound on random truncations, the entropy lower bound on
/// random spectra, and optimality of alpha* on a grid.
SuiteResult bounds(const SuiteOptions& options = {});
SuiteResult majorization(const SuiteOptions& options = {});
SuiteResult norms(const SuiteOptions& options = {});

std::vector<std::string> suite_names();
/// "all" or one of suite_names(). Throws ParameterError for unknown names.
std::vector<SuiteResult> run_suites(const std::string& selector, const SuiteOptions& options = {});

// Individual property checks, shared with the acceptance driver. Each returns
// the number of violations among `samples` trials.

struct PropertyCount {
    long trials = 0;
    long violations = 0;
    double worst = 0; // most negative slack seen
};

PropertyCount check_distance_bound(long samples, std::uint64_t seed);
PropertyCount check_entropy_lower_bound(long samples, std::uint64_t seed);
PropertyCount check_majorizing_distribution(long samples, std::uint64_t seed);
PropertyCount check_optimal_alpha(long samples, long grid_points, std::uint64_t seed);
PropertyCount check_purification_distance(long samples, std::uint64_t seed);
/// Three inequalities per sample: Hoelder, right projector, two-sided projector.
PropertyCount check_trace_norm_inequalities(long samples, std::uint64_t seed);

} // namespace tdsmps::suites
