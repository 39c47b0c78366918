#include "tdsmps/suites.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <fmt/format.h>

#include "tdsmps/errors.hpp"
#include "tdsmps/fitting.hpp"
#include "tdsmps/oracle.hpp"
#include "tdsmps/theory.hpp"

namespace tdsmps::suites {

bool SuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
long uniform_int(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

Eigen::VectorXd gaussian_vector(Rng& rng, Index n) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (Index k = 0; k < n; ++k) {
        v[k] = g(rng);
    }
    return v;
}

Eigen::MatrixXcd gaussian_complex(Rng& rng, Index rows, Index cols) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = {g(rng), g(rng)};
        }
    }
    return m;
}

// Descending random distribution with a random decay profile, so that tails
// range from flat to very small.
std::vector<double> random_spectrum(Rng& rng, long n) {
    const double power = uniform(rng, 1.0, 30.0);
    std::vector<double> w(static_cast<std::size_t>(n));
    double sum = 0;
    for (auto& x : w) {
        x = std::pow(uniform(rng, 1e-3, 1.0), power);
        sum += x;
    }
    for (auto& x : w) {
        x /= sum;
    }
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
}

// Dense vector of a random MPS with bond dimension up to max_bond, normalized.
Eigen::VectorXd random_mps_vector(Rng& rng, Index d, Index length, Index max_bond) {
    const Index p = d * d;
    std::vector<DenseTensor<double>> sites;
    Index left = 1;
    for (Index i = 0; i < length; ++i) {
        const Index right = i + 1 == length ? 1 : uniform_int(rng, 1, max_bond);
        DenseTensor<double> t({left, p, right});
        t.data() = gaussian_vector(rng, left * p * right);
        sites.push_back(std::move(t));
        left = right;
    }
    PurificationMps<double> st(d, std::move(sites));
    Eigen::VectorXd v = to_dense(st);
    return v / v.norm();
}

Check make_check(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

Check property_check(const std::string& name, const PropertyCount& c) {
    return make_check(name, c.violations == 0 && c.trials > 0,
                      fmt::format("{} trials, {} violations, worst slack {:.3e}", c.trials, c.violations, c.worst));
}

void record(PropertyCount& c, double slack, double tol) {
    ++c.trials;
    c.worst = c.trials == 1 ? slack : std::min(c.worst, slack);
    if (slack < -tol) {
        ++c.violations;
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Properties
// ---------------------------------------------------------------------------

PropertyCount check_distance_bound(long samples, std::uint64_t seed) {
    Rng rng(seed);
    constexpr Index length = 6;
    PropertyCount count;
    for (long s = 0; s < samples; ++s) {
        const Eigen::VectorXd v = s % 2 == 0 ? random_mps_vector(rng, 2, length, 12)
                                             : Eigen::VectorXd(gaussian_vector(rng, 4096).normalized());
        const auto mps = from_dense(v, 2, length);
        const Index rank = uniform_int(rng, 1, 8);
        const auto truncated = truncate_to(mps, rank, 0.0);
        const Eigen::VectorXd t = to_dense(truncated.state);
        const double dist2 = (v - t).squaredNorm();
        const oracle::DenseState dense{2, length, v};
        std::vector<double> eps;
        for (Index b = 1; b < length; ++b) {
            eps.push_back(truncation_error(oracle::reduced_spectrum(dense, b).weights, rank));
        }
        const double bound = theory::mps_error_bound(eps);
        record(count, bound * bound - dist2, 1e-12);
    }
    return count;
}

PropertyCount check_entropy_lower_bound(long samples, std::uint64_t seed) {
    Rng rng(seed);
    PropertyCount count;
    const double alphas[] = {0.1, 0.3, 0.5, 0.9};
    long attempts = 0;
    while (count.trials < samples && attempts < 200 * samples) {
        ++attempts;
        const long n = uniform_int(rng, 4, 64);
        const auto w = random_spectrum(rng, n);
        const long rank = uniform_int(rng, 2, n - 1);
        const double eps = truncation_error(w, rank);
        const double alpha = alphas[uniform_int(rng, 0, 3)];
        if (!(eps > 0) || !theory::entropy_bound_valid(eps, rank, alpha)) {
            continue;
        }
        const double bound = theory::entropy_lower_bound_from_truncation(eps, rank, alpha).value;
        record(count, renyi_entropy(w, alpha) - bound, 1e-12);
    }
    return count;
}

PropertyCount check_majorizing_distribution(long samples, std::uint64_t seed) {
    Rng rng(seed);
    PropertyCount count;
    long attempts = 0;
    while (count.trials < samples && attempts < 100 * samples) {
        ++attempts;
        const long n = uniform_int(rng, 3, 64);
        const auto w = random_spectrum(rng, n);
        const long rank = uniform_int(rng, 1, n - 1);
        const double eps = truncation_error(w, rank);
        const double h = w[static_cast<std::size_t>(rank - 1)];
        std::vector<double> top;
        try {
            top = theory::majorizing_distribution(eps, rank, h);
        } catch (const ParameterError&) {
            continue; // first weight equals h up to rounding
        }
        // Smallest gap between partial sums; negative means a violation.
        double su = 0;
        double sl = 0;
        double slack = 1;
        for (std::size_t k = 0; k < std::max(top.size(), w.size()); ++k) {
            su += k < top.size() ? top[k] : 0.0;
            sl += k < w.size() ? w[k] : 0.0;
            slack = std::min(slack, su - sl);
        }
        record(count, theory::majorizes(top, w, 1e-12) ? std::max(slack, 0.0) : slack, 1e-12);
    }
    return count;
}

PropertyCount check_optimal_alpha(long samples, long grid_points, std::uint64_t seed) {
    Rng rng(seed);
    PropertyCount count;
    while (count.trials < samples) {
        const double c = uniform(rng, 0.5, 3.0);
        const double eps = std::pow(10.0, -uniform(rng, 2.0, 12.0));
        const double y = std::pow(10.0, uniform(rng, 0.3, 4.0));
        if (!(theory::optimal_alpha_ratio(c, eps, y) > 1.0 + 1e-9)) {
            continue;
        }
        const double astar = theory::optimal_alpha(c, eps, y);
        const double at_star = theory::log_bond_dimension_bound_cft(c, astar, eps, y);
        double best = std::numeric_limits<double>::infinity();
        for (long k = 1; k <= grid_points; ++k) {
            const double a = static_cast<double>(k) / static_cast<double>(grid_points + 1);
            best = std::min(best, theory::log_bond_dimension_bound_cft(c, a, eps, y));
        }
        record(count, best - at_star, 1e-12 * std::max(1.0, std::abs(best)));
    }
    return count;
}

PropertyCount check_purification_distance(long samples, std::uint64_t seed) {
    Rng rng(seed);
    PropertyCount count;
    for (long s = 0; s < samples; ++s) {
        const Index n = uniform_int(rng, 2, 8);
        const Index m = uniform_int(rng, 1, 16 / n);
        Eigen::MatrixXcd a = gaussian_complex(rng, n, m);
        a /= a.norm();
        Eigen::MatrixXcd b = s % 2 == 0 ? gaussian_complex(rng, n, m)
                                        : Eigen::MatrixXcd(a + uniform(rng, 1e-4, 0.3) * gaussian_complex(rng, n, m));
        b /= b.norm();
        const Eigen::MatrixXcd rho = a * a.adjoint();
        const Eigen::MatrixXcd sigma = b * b.adjoint();
        const double lhs = oracle::trace_norm(Eigen::MatrixXcd(rho - sigma));
        const double rhs = 2.0 * (a - b).norm();
        record(count, rhs - lhs, 1e-12);
    }
    return count;
}

PropertyCount check_trace_norm_inequalities(long samples, std::uint64_t seed) {
    Rng rng(seed);
    PropertyCount count;
    for (long s = 0; s < samples; ++s) {
        const Index n = uniform_int(rng, 1, 16);
        const Eigen::MatrixXcd x = gaussian_complex(rng, n, n);
        const Index k = uniform_int(rng, 0, n);
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
        if (k > 0) {
            Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian_complex(rng, n, k));
            const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
            p = q * q.adjoint();
        }
        const double t = oracle::trace_norm(x);
        const double tol = 1e-10 * std::max(1.0, t);
        record(count, std::sqrt(static_cast<double>(n)) * x.norm() - t, tol);
        record(count, t - oracle::trace_norm(Eigen::MatrixXcd(x * p)), tol);
        record(count, t - oracle::trace_norm(Eigen::MatrixXcd(p * x * p)), tol);
    }
    return count;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

TrotterOrderResult trotter_order(int order, const std::vector<double>& dtaus, const PlanFactory& plan_factory) {
    ModelSpec m;
    m.kind = ModelKind::xxz_half;
    m.delta = 1.0;
    m.length = 6;
    const auto terms = build_bond_terms(m);
    const Eigen::VectorXd exact = oracle::exact_tds(m, 1.0).coefficients;
    TrotterOrderResult out;
    Series s;
    for (double dt : dtaus) {
        EvolutionConfig c;
        c.target_beta = 1.0;
        c.dtau = dt;
        c.order = order;
        c.rel_weight_cutoff = 0.0;
        c.beta_grid = {1.0};
        if (plan_factory) {
            c.plan_override = plan_factory(order, dt);
        }
        const auto st = evolve(build_infinite_temperature_tds<double>(2, m.length), terms, c);
        const double err = (to_dense(st) - exact).norm();
        out.dtaus.push_back(dt);
        out.errors.push_back(err);
    }
    std::vector<std::size_t> idx(dtaus.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        idx[k] = k;
    }
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return dtaus[a] < dtaus[b]; });
    for (auto k : idx) {
        s.push_back(std::log(out.dtaus[k]), std::log(out.errors[k]));
    }
    out.slope = fit_line(s).slope;
    return out;
}

SuiteResult trotter(const SuiteOptions& options) {
    SuiteResult r{"trotter", {}};
    const std::vector<double> dtaus{0.2, 0.1, 0.05, 0.025};
    for (auto [order, tol] : {std::pair{4, 0.4}, std::pair{2, 0.3}}) {
        const auto t = trotter_order(order, dtaus, options.plan_factory);
        r.checks.push_back(make_check(fmt::format("order {} convergence", order),
                                      std::abs(t.slope - order) <= tol,
                                      fmt::format("slope {:.3f} (expected {} +- {})", t.slope, order, tol)));
    }
    return r;
}

SuiteResult ed_equivalence(const SuiteOptions&) {
    SuiteResult r{"ed", {}};
    struct Case {
        ModelSpec model;
        std::vector<double> betas;
    };
    std::vector<Case> cases;
    {
        ModelSpec m;
        m.kind = ModelKind::xxz_half;
        m.delta = 1.0;
        m.length = 6;
        cases.push_back({m, {0.5, 1.0, 2.0}});
    }
    {
        ModelSpec m;
        m.kind = ModelKind::bilinear_biquadratic_spin1;
        m.theta = 0.0;
        m.length = 4;
        cases.push_back({m, {1.0}});
    }
    {
        ModelSpec m;
        m.kind = ModelKind::bose_hubbard;
        m.hopping = 0.25;
        m.interaction = 1.0;
        m.chemical_potential = 0.5;
        m.n_max = 3;
        m.length = 3;
        cases.push_back({m, {1.0}});
    }
    for (const auto& cs : cases) {
        const auto& m = cs.model;
        const auto terms = build_bond_terms(m);
        const Eigen::MatrixXd h = oracle::dense_hamiltonian(m);
        const long bond = m.length / 2;
        EvolutionConfig c;
        c.dtau = 0.01;
        c.order = 4;
        c.rel_weight_cutoff = 0.0;
        c.beta_grid = cs.betas;
        c.target_beta = cs.betas.back();
        evolve(build_infinite_temperature_tds<double>(m.local_dim(), m.length), terms, c,
               [&](const Snapshot<double>& snap) {
                   const auto exact = oracle::exact_tds(h, m.local_dim(), m.length, snap.beta);
                   const auto ed = oracle::reduced_spectrum(exact, bond);
                   const auto& mine = snap.spectra[static_cast<std::size_t>(bond - 1)];
                   double spec_dev = 0;
                   for (std::size_t k = 0; k < ed.weights.size(); ++k) {
                       const double a = k < mine.weights.size() ? mine.weights[k] : 0.0;
                       spec_dev = std::max(spec_dev, std::abs(a - ed.weights[k]));
                   }
                   const double ds = std::abs(renyi_entropy(mine, 1.0) - renyi_entropy(ed, 1.0));
                   const Eigen::MatrixXd rho = oracle::exact_thermal_density(h, snap.beta);
                   const auto energies = bond_energies(*snap.state, terms);
                   double de = 0;
                   for (const auto& t : terms) {
                       const Eigen::MatrixXd ht = oracle::embed_operator(t.matrix, t.site, m.local_dim(), m.length);
                       de = std::max(de, std::abs(energies[static_cast<std::size_t>(t.site)] - (rho * ht).trace()));
                   }
                   const oracle::DenseState mps_dense{m.local_dim(), m.length, to_dense(*snap.state)};
                   const double drho = (oracle::physical_density(mps_dense) - rho).cwiseAbs().maxCoeff();
                   const std::string tag = fmt::format("{} L={} beta={:g}", m.id(), m.length, snap.beta);
                   r.checks.push_back(make_check(tag + " spectrum", spec_dev <= 1e-8, fmt::format("{:.2e}", spec_dev)));
                   r.checks.push_back(make_check(tag + " S_1", ds <= 1e-6, fmt::format("{:.2e}", ds)));
                   r.checks.push_back(make_check(tag + " bond energies", de <= 1e-6, fmt::format("{:.2e}", de)));
                   r.checks.push_back(make_check(tag + " ancilla trace", drho <= 1e-8, fmt::format("{:.2e}", drho)));
               });
    }
    return r;
}

SuiteResult bounds(const SuiteOptions& options) {
    SuiteResult r{"bounds", {}};
    r.checks.push_back(property_check("distance bound, 100 truncations at L=6", check_distance_bound(100, options.seed)));
    r.checks.push_back(
        property_check("entropy lower bound, 1e4 spectra", check_entropy_lower_bound(10000, options.seed + 1)));
    r.checks.push_back(
        property_check("optimal alpha on a 1e4 grid, 100 triples", check_optimal_alpha(100, 10000, options.seed + 2)));
    // h* minimizes the h-dependent bound on a log grid.
    Rng rng(options.seed + 3);
    PropertyCount hc;
    for (int s = 0; s < 200; ++s) {
        const long rank = uniform_int(rng, 2, 50);
        const double eps = std::pow(10.0, -uniform(rng, 1.0, 8.0));
        const double alpha = uniform(rng, 0.05, 0.95);
        const double hstar = theory::optimal_tail_height(eps, rank, alpha);
        const double at_star = theory::entropy_bound_in_h(eps, rank, alpha, hstar);
        double best = std::numeric_limits<double>::infinity();
        for (int k = -400; k <= 400; ++k) {
            best = std::min(best, theory::entropy_bound_in_h(eps, rank, alpha, hstar * std::pow(10.0, k / 100.0)));
        }
        record(hc, best - at_star, 1e-12 * std::max(1.0, std::abs(best)));
    }
    r.checks.push_back(property_check("h* minimizes the tail-height bound", hc));
    return r;
}

SuiteResult majorization(const SuiteOptions& options) {
    SuiteResult r{"majorization", {}};
    r.checks.push_back(
        property_check("majorizing distribution dominates 1e3 spectra", check_majorizing_distribution(1000, options.seed)));
    Rng rng(options.seed + 7);
    PropertyCount mono;
    for (int s = 0; s < 1000; ++s) {
        const auto w = random_spectrum(rng, uniform_int(rng, 2, 64));
        const double a = uniform(rng, 0.05, 3.0);
        const double b = a + uniform(rng, 0.01, 2.0);
        record(mono, renyi_entropy(w, a) - renyi_entropy(w, b), 1e-12);
    }
    r.checks.push_back(property_check("Renyi entropy nonincreasing in alpha", mono));
    return r;
}

SuiteResult norms(const SuiteOptions& options) {
    SuiteResult r{"norms", {}};
    r.checks.push_back(
        property_check("purification trace-distance bound, 1e3 pairs", check_purification_distance(1000, options.seed)));
    r.checks.push_back(
        property_check("trace-norm inequalities, 1e3 matrices", check_trace_norm_inequalities(1000, options.seed + 1)));
    return r;
}

std::vector<std::string> suite_names() { return {"ed", "trotter", "bounds", "majorization", "norms"}; }

std::vector<SuiteResult> run_suites(const std::string& selector, const SuiteOptions& options) {
    std::vector<SuiteResult> out;
    auto want = [&](const std::string& name) { return selector == "all" || selector == name; };
    const auto names = suite_names();
    if (selector != "all" && std::find(names.begin(), names.end(), selector) == names.end()) {
        throw ParameterError("unknown suite '" + selector + "'");
    }
    if (want("ed")) {
        out.push_back(ed_equivalence(options));
    }
    if (want("trotter")) {
        out.push_back(trotter(options));
    }
    if (want("bounds")) {
        out.push_back(bounds(options));
    }
    if (want("majorization")) {
        out.push_back(majorization(options));
    }
    if (want("norms")) {
        out.push_back(norms(options));
    }
    return out;
}

} // namespace tdsmps::suites
