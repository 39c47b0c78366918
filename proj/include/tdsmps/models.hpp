#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tdsmps {

enum class ModelKind { xxz_half, heisenberg_spin_s, bilinear_biquadratic_spin1, bose_hubbard };

/// Declarative description of one of the supported open-boundary chains.
///
///   xxz_half:    sum_i Sx Sx + Sy Sy + delta Sz Sz                  (d = 2)
///   heisenberg:  sum_i S_i . S_{i+1} for spin `spin`                (d = 2S+1)
///   bilinear-biquadratic: sum_i cos(theta) S.S + sin(theta) (S.S)^2 (d = 3)
///   bose_hubbard: sum_i -J (b+_i b_{i+1} + h.c.) + U n(n-1)/2 - mu n (d = n_max+1)
struct ModelSpec {
    ModelKind kind = ModelKind::xxz_half;
    long length = 2;
    double delta = 1.0;
    double spin = 0.5;
    double theta = 0.0;
    double hopping = 0.0;
    double interaction = 1.0;
    double chemical_potential = 0.5;
    long n_max = 5;

    [[nodiscard]] long local_dim() const;
    /// Short stable identifier, e.g. "xxz_half(delta=1)".
    [[nodiscard]] std::string id() const;
    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Two-site term h_{i,i+1} acting on the physical pair, d^2 x d^2, row index
/// sigma_i * d + sigma_{i+1}. `site` is 0-based (bond site+1).
struct BondTerm {
    long site = 0;
    Eigen::MatrixXd matrix;
};

struct SpinMatrices {
    Eigen::MatrixXd sx;
    Eigen::MatrixXcd sy;
    Eigen::MatrixXd sz;
    Eigen::MatrixXd splus;
    Eigen::MatrixXd sminus;
};

/// Standard SU(2) generators in the |S, m = S>, ..., |S, -S> basis.
SpinMatrices spin_matrices(double spin);

struct BosonMatrices {
    Eigen::MatrixXd annihilation;
    Eigen::MatrixXd creation;
    Eigen::MatrixXd number;
};

/// Ladder operators on the truncated space |0>..|n_max>.
BosonMatrices boson_matrices(long n_max);

/// L-1 bond terms summing to the chain Hamiltonian. Single-site Bose-Hubbard
/// terms are shared half/half between the two bonds touching a site; the end
/// sites get their full weight from their single bond.
std::vector<BondTerm> build_bond_terms(const ModelSpec& spec);

/// Real form of S_i . S_j for a given spin.
Eigen::MatrixXd spin_exchange(double spin);

} // namespace tdsmps
