#pragma once

// Imaginary-time evolution of the purification.
//
// The state at inverse temperature beta is exp(-beta H / 2) (x) 1 applied to the
// infinite-temperature state, so a Trotter step of size `dtau` (measured in
// units of beta) advances the state by imaginary time dtau / 2. A layer with
// coefficient c applies exp(-c * dtau / 2 * h) on every bond of its parity.
// Parity refers to the 0-based left site of a bond: even layers hold the
// bonds (0,1), (2,3), ...; odd layers hold (1,2), (3,4), ....

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <type_traits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tdsmps/errors.hpp"
#include "tdsmps/models.hpp"
#include "tdsmps/mps.hpp"

namespace tdsmps {

enum class Parity { even = 0, odd = 1 };

struct TrotterLayer {
    Parity parity = Parity::even;
    double coefficient = 0;
    friend bool operator==(const TrotterLayer&, const TrotterLayer&) = default;
};

struct TrotterPlan {
    int order = 4;
    double dtau = 0.01;
    std::vector<TrotterLayer> layers;

    [[nodiscard]] double steps_per_unit_beta() const { return 1.0 / dtau; }
    /// Sum of layer coefficients of one parity across one full step.
    [[nodiscard]] double coefficient_sum(Parity p) const;
};

/// Fourth-order fractal coefficient p = 1 / (4 - 4^(1/3)).
double suzuki_fractal_coefficient();

/// Order 2: symmetric (even/2, odd, even/2). Order 4: five symmetric substeps
/// with weights (p, p, 1-4p, p, p).
TrotterPlan build_trotter_plan(int order, double dtau);

/// Hex digest of the plan's order, step and coefficients, for provenance.
std::string plan_hash(const TrotterPlan& plan);

/// exp(-x * h) for a hermitian h through its eigendecomposition.
Eigen::MatrixXd gate_exponential(const Eigen::MatrixXd& h, double x);

/// Layers for `steps` consecutive Trotter steps with neighboring layers of equal
/// parity merged (their gates commute within a parity).
std::vector<TrotterLayer> fused_layers(const TrotterPlan& plan, long steps);

struct EvolutionConfig {
    double start_beta = 0;
    double target_beta = 0;
    double dtau = 0.01;
    int order = 4;
    Index max_rank = unlimited_rank;
    double rel_weight_cutoff = 1e-12;
    /// Measurement points; those outside [start_beta, target_beta] are ignored.
    std::vector<double> beta_grid;
    /// Invoke the observer at start_beta when it is a grid point.
    bool observe_start = true;
    /// Bond-dimension budget; 0 disables the check.
    Index max_bond_dimension = 0;
    /// Wall-clock budget in seconds; 0 disables the check.
    double max_seconds = 0;
    /// Replaces build_trotter_plan(order, dtau) when set.
    std::optional<TrotterPlan> plan_override;
};

template <typename Scalar>
struct Snapshot {
    double beta = 0;
    const PurificationMps<Scalar>* state = nullptr;
    std::vector<BondSpectrum> spectra;
    std::vector<Index> bond_dimensions;
    /// Discarded weight per bond accumulated since the previous snapshot.
    std::vector<double> bond_errors;
    double energy = 0;
};

template <typename Scalar>
using Observer = std::function<void(const Snapshot<Scalar>&)>;

/// <h_i> for every bond term, normalized.
template <typename Scalar>
std::vector<double> bond_energies(const PurificationMps<Scalar>& state, const std::vector<BondTerm>& terms) {
    PurificationMps<Scalar> st = state;
    std::vector<double> out;
    out.reserve(terms.size());
    move_center(st, 0);
    for (const auto& term : terms) {
        move_center(st, term.site);
        const auto theta = two_site_block(st, term.site);
        const auto applied = apply_physical(theta, term.matrix, st.local_dim(), 2);
        const Scalar e = theta.data().dot(applied.data()) / theta.data().squaredNorm();
        out.push_back(static_cast<double>(std::real(e)));
    }
    return out;
}

template <typename Scalar>
double energy(const PurificationMps<Scalar>& state, const std::vector<BondTerm>& terms) {
    double e = 0;
    for (double x : bond_energies(state, terms)) {
        e += x;
    }
    return e;
}

namespace detail {

// Eigendecompositions of the bond terms, reused for every coefficient.
class GateCache {
public:
    explicit GateCache(const std::vector<BondTerm>& terms) {
        for (const auto& t : terms) {
            if ((t.matrix - t.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
                throw ParameterError("bond term is not hermitian");
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.matrix);
            if (es.info() != Eigen::Success) {
                throw NumericalError("bond term eigendecomposition failed");
            }
            eig_.push_back(std::move(es));
        }
    }

    const Eigen::MatrixXd& gate(std::size_t term, double x) {
        auto& slot = cache_[x];
        if (slot.empty()) {
            slot.reserve(eig_.size());
            for (const auto& es : eig_) {
                const Eigen::VectorXd ex = (-x * es.eigenvalues().array()).exp();
                slot.push_back(es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().transpose());
            }
        }
        return slot[term];
    }

private:
    std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> eig_;
    std::map<double, std::vector<Eigen::MatrixXd>> cache_;
};

} // namespace detail

/// Applies a two-site gate on the physical legs of sites (i, i+1), truncates and
/// renormalizes. The center must be at i or i+1 and ends at i+1 when
/// `move_right`, else at i. Returns the discarded weight fraction.
template <typename Scalar>
double apply_gate(PurificationMps<Scalar>& st, Index i, const Eigen::MatrixXd& gate,
                  const TruncationPolicy& policy, bool move_right) {
    const Index d = st.local_dim();
    const Index p = st.physical_dim();
    const auto theta = apply_physical(two_site_block(st, i), gate, d, 2);
    const Index dl = theta.dim(0);
    const Index dr = theta.dim(3);
    const Eigen::Map<const RowMatrix<Scalar>> m(theta.data().data(), dl * p, p * dr);
    auto f = svd_truncate(m, policy);
    const double kept = static_cast<double>(f.singular_values.squaredNorm());
    const double total = kept + static_cast<double>(f.discarded_weight);
    if (!(kept > 0)) {
        throw NumericalError("gate annihilated the state");
    }
    st.add_log_norm(0.5 * std::log(total));
    const Index k = f.singular_values.size();
    const Vector<Scalar> s = (f.singular_values / std::sqrt(kept)).template cast<Scalar>();
    if (move_right) {
        st.site(i) = DenseTensor<Scalar>::from_matrix(f.left, {dl, p, k});
        st.site(i + 1) = DenseTensor<Scalar>::from_matrix(s.asDiagonal() * f.right, {k, p, dr});
        st.set_center(i + 1);
    } else {
        st.site(i) = DenseTensor<Scalar>::from_matrix(f.left * s.asDiagonal(), {dl, p, k});
        st.site(i + 1) = DenseTensor<Scalar>::from_matrix(f.right, {k, p, dr});
        st.set_center(i);
    }
    st.set_bond_spectrum(i + 1, detail::spectrum_from_singular_values<Scalar>(f.singular_values, i + 1));
    return static_cast<double>(f.discarded_weight) / total;
}

/// Imaginary-time evolution from config.start_beta to config.target_beta.
///
/// Gates are applied sweep by sweep, each layer traversed in the direction that
/// keeps the canonical center adjacent to the next gate, so every truncation is
/// done on an exact Schmidt decomposition. The observer sees the state after
/// complete Trotter steps only, at every grid point reached.
template <typename Scalar>
PurificationMps<Scalar> evolve(PurificationMps<Scalar> state, const std::vector<BondTerm>& terms,
                               const EvolutionConfig& config,
                               const std::type_identity_t<Observer<Scalar>>& observer = {}) {
    if (static_cast<Index>(terms.size()) != state.length() - 1) {
        throw ParameterError("need exactly L-1 bond terms");
    }
    for (const auto& t : terms) {
        if (t.matrix.rows() != state.physical_dim()) {
            throw ParameterError("bond term dimension does not match the state's local dimension");
        }
    }
    if (!(config.dtau > 0)) {
        throw ParameterError("dtau must be positive");
    }
    if (config.target_beta < config.start_beta) {
        throw ParameterError("target beta lies before the start beta");
    }
    const TrotterPlan plan = config.plan_override ? *config.plan_override : build_trotter_plan(config.order, config.dtau);
    const TruncationPolicy policy{config.max_rank, config.rel_weight_cutoff};
    const auto started = std::chrono::steady_clock::now();

    std::vector<double> stops;
    for (double b : config.beta_grid) {
        if (b > config.start_beta + 1e-12 && b <= config.target_beta + 1e-12) {
            stops.push_back(b);
        }
    }
    std::sort(stops.begin(), stops.end());
    if (config.target_beta > config.start_beta + 1e-12 &&
        (stops.empty() || std::abs(stops.back() - config.target_beta) > 1e-12)) {
        stops.push_back(config.target_beta);
    }

    detail::GateCache gates(terms);
    std::vector<double> errors(static_cast<std::size_t>(state.length() - 1), 0.0);

    auto observe = [&](double beta) {
        if (!observer) {
            return;
        }
        Snapshot<Scalar> snap;
        snap.beta = beta;
        snap.state = &state;
        snap.spectra = all_schmidt_spectra(state);
        for (Index b = 1; b < state.length(); ++b) {
            snap.bond_dimensions.push_back(state.bond_dimension(b));
        }
        snap.bond_errors = errors;
        snap.energy = energy(state, terms);
        observer(snap);
        std::fill(errors.begin(), errors.end(), 0.0);
    };
    auto on_grid = [&](double beta) {
        return std::any_of(config.beta_grid.begin(), config.beta_grid.end(),
                           [&](double b) { return std::abs(b - beta) <= 1e-12; });
    };

    if (!state.center()) {
        move_center(state, 0);
    }
    normalize(state);
    if (config.observe_start && on_grid(config.start_beta)) {
        observe(config.start_beta);
    }

    const Index length = state.length();
    double beta = config.start_beta;
    for (double stop : stops) {
        const double gap = stop - beta;
        const long steps = std::lround(gap / config.dtau);
        if (std::abs(static_cast<double>(steps) * config.dtau - gap) > 1e-9) {
            throw ParameterError("dtau does not divide the gap between measurement points");
        }
        for (const auto& layer : fused_layers(plan, steps)) {
            const double x = 0.5 * layer.coefficient * config.dtau;
            const Index first = layer.parity == Parity::even ? 0 : 1;
            std::vector<Index> bonds;
            for (Index i = first; i + 1 < length; i += 2) {
                bonds.push_back(i);
            }
            const bool right = *state.center() <= length / 2;
            if (!right) {
                std::reverse(bonds.begin(), bonds.end());
            }
            for (Index i : bonds) {
                move_center(state, right ? i : i + 1);
                errors[static_cast<std::size_t>(i)] +=
                    apply_gate(state, i, gates.gate(static_cast<std::size_t>(i), x), policy, right);
                if (config.max_bond_dimension > 0 && state.bond_dimension(i + 1) > config.max_bond_dimension) {
                    throw ResourceError("bond dimension " + std::to_string(state.bond_dimension(i + 1)) +
                                        " exceeds the budget of " + std::to_string(config.max_bond_dimension));
                }
            }
            if (config.max_seconds > 0) {
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
                if (elapsed > config.max_seconds) {
                    throw ResourceError("wall-clock budget exhausted");
                }
            }
        }
        beta = stop;
        if (on_grid(beta)) {
            observe(beta);
        }
    }
    return state;
}

} // namespace tdsmps
