#pragma once

// Exact-diagonalization references for small chains, plus the free-fermion
// solution of the XX chain.
//
// Dense purifications use the same basis as `to_dense` on an MPS: site-local
// pairs (sigma_i, sigmabar_i) with sigma_i major, site 1 most significant.

#include <vector>

#include <Eigen/Dense>

#include "tdsmps/models.hpp"
#include "tdsmps/spectrum.hpp"

namespace tdsmps::oracle {

inline constexpr long default_hilbert_cap = 4096;

struct DenseState {
    long local_dim = 2;
    long length = 1;
    Eigen::VectorXd coefficients;
};

/// Dense H = sum of the bond terms embedded in the d^L space.
Eigen::MatrixXd dense_hamiltonian(const ModelSpec& spec, long cap = default_hilbert_cap);
Eigen::MatrixXd dense_hamiltonian(const std::vector<BondTerm>& terms, long local_dim, long length,
                                  long cap = default_hilbert_cap);

/// op acting on sites [site, site + k) of a d^L space, where op is d^k x d^k.
Eigen::MatrixXd embed_operator(const Eigen::MatrixXd& op, long site, long local_dim, long length);

/// Normalized vec(exp(-beta H / 2)) in the paired basis.
DenseState exact_tds(const ModelSpec& spec, double beta, long cap = default_hilbert_cap);
DenseState exact_tds(const Eigen::MatrixXd& hamiltonian, long local_dim, long length, double beta,
                     long cap = default_hilbert_cap);

/// exp(-beta H) / Z.
Eigen::MatrixXd exact_thermal_density(const ModelSpec& spec, double beta, long cap = default_hilbert_cap);
Eigen::MatrixXd exact_thermal_density(const Eigen::MatrixXd& hamiltonian, double beta);

/// Coefficient matrix Psi[sigma, sigmabar] of a paired-basis state.
Eigen::MatrixXd unpair(const DenseState& state);
/// Paired-basis vector from a coefficient matrix Psi[sigma, sigmabar].
DenseState pair(const Eigen::MatrixXd& psi, long local_dim, long length);

/// Tr over the ancilla copy of |state><state|.
Eigen::MatrixXd physical_density(const DenseState& state);

/// Eigenvalues of the reduced density matrix of sites 1..bond (both copies).
BondSpectrum reduced_spectrum(const DenseState& state, long bond);

/// Spectrum of the physical reduced density matrix of sites 1..bond of a plain
/// (unpurified) state vector in the d^L basis.
BondSpectrum pure_state_spectrum(const Eigen::VectorXd& psi, long local_dim, long length, long bond);

/// Two lowest eigenvalues of H and their difference.
struct GapResult {
    double ground_energy = 0;
    double first_excited = 0;
    [[nodiscard]] double gap() const { return first_excited - ground_energy; }
};
GapResult energy_gap(const ModelSpec& spec, long cap = default_hilbert_cap);

/// Ground state of H (lowest eigenvector).
Eigen::VectorXd ground_state(const Eigen::MatrixXd& hamiltonian);

// ---------------------------------------------------------------------------
// Free fermions: the XX chain H = sum_i (Sx Sx + Sy Sy) maps to hopping 1/2.
// ---------------------------------------------------------------------------

/// Single-particle energies of the open XX chain of length L.
Eigen::VectorXd xx_single_particle_energies(long length);

/// Occupation eigenvalues nu_k of the correlation matrix of subsystem A
/// (physical and ancilla sites 1..bond) in the XX-chain purification. The
/// purification is a Gaussian state once the ancilla copy is ordered in
/// reverse behind the physical chain; its entanglement spectrum is the product
/// of the mode spectra {nu_k, 1 - nu_k}.
Eigen::VectorXd xx_tds_mode_occupations(long length, double beta, long bond);

/// S_alpha from mode occupations.
double free_fermion_renyi(const Eigen::VectorXd& occupations, double alpha);

/// Leading Schmidt weights >= cutoff (descending) from mode occupations.
std::vector<double> free_fermion_spectrum(const Eigen::VectorXd& occupations, double cutoff);

/// E1 - E0 of the open XX chain from the free-fermion levels.
double xx_free_fermion_gap(long length);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// Schatten 1-norm (sum of singular values).
double trace_norm(const Eigen::MatrixXd& x);
double trace_norm(const Eigen::MatrixXcd& x);

} // namespace tdsmps::oracle
