#pragma once

// Closed-form entanglement predictions and MPS approximation bounds.
// All logarithms are natural; entropies are in nats.

#include <span>
#include <vector>

namespace tdsmps::theory {

struct CftParams {
    double central_charge = 1.0;
    /// Nonuniversal additive constant (a fit parameter).
    double offset = 0.0;
};

/// Coefficient (c/6)(1 + 1/alpha) multiplying log(beta) or log(xi).
double entropy_log_slope(double central_charge, double alpha);

/// (c/6)(1 + 1/alpha) log(beta / pi) + C'_alpha for critical chains.
double cft_entropy_prediction(double central_charge, double alpha, double beta, double offset);

/// (c/6)(1 + 1/alpha) log(xi) + 2 C'_alpha for gapped chains; beta independent.
double gapped_entropy_prediction(double central_charge, double alpha, double xi, double offset);

/// xi_beta = beta / (pi * Delta) for a scaling dimension Delta.
double thermal_correlation_length(double scaling_dimension, double beta);

/// sqrt(2 * sum_l eps_l): bound on the 2-norm distance after truncation.
double mps_error_bound(std::span<const double> bond_errors);

/// D saturating log(D - 1) <= S_alpha + alpha/(1-alpha) log(1/eps).
double bond_dimension_bound(double renyi_entropy, double alpha, double epsilon);

/// bond_dimension_bound with S_alpha = (c/6)(1 + 1/alpha) log y inserted, as a
/// bound on log(D - 1).
double log_bond_dimension_bound_cft(double central_charge, double alpha, double epsilon, double y);

/// (6/c) log(1/eps) / log(y), the ratio entering the optimal Renyi index.
double optimal_alpha_ratio(double central_charge, double epsilon, double y);

/// alpha* minimizing the CFT form of the bond-dimension bound. Requires the
/// ratio above to exceed one.
double optimal_alpha(double central_charge, double epsilon, double y);

/// lambda = (c/6)(1 + 1/alpha).
double d_scaling_exponent(double central_charge, double alpha);

struct EntropyBound {
    double value = 0;
    /// The bound is negative and therefore says nothing about S_alpha >= 0.
    bool vacuous = false;
};

/// True when 1 > alpha >= eps D / (D - 1 - eps) (and D - 1 - eps > 0).
bool entropy_bound_valid(double epsilon, long rank, double alpha);

/// Lower bound on S_alpha from a truncation error eps at rank D. The default is
/// (1/(1-alpha)) log[(D-1)^(1-alpha) eps^alpha]; `sharp` adds the
/// -log[alpha^alpha (1-alpha)^(1-alpha)] / (1-alpha) refinement.
EntropyBound entropy_lower_bound_from_truncation(double epsilon, long rank, double alpha, bool sharp = false);

/// (1/(1-alpha)) log[(D - 1 + eps/h) h^alpha], the h-dependent lower bound
/// whose minimum over h gives the sharp entropy bound.
double entropy_bound_in_h(double epsilon, long rank, double alpha, double h);

/// h* = ((1-alpha)/alpha) eps / (D-1).
double optimal_tail_height(double epsilon, long rank, double alpha);

/// The distribution with truncation error eps at rank D and omega_D = h that
/// majorizes every other such distribution.
std::vector<double> majorizing_distribution(double epsilon, long rank, double h);

/// True when every partial sum of `upper` is >= that of `lower` (minus tol).
bool majorizes(std::span<const double> upper, std::span<const double> lower, double tol = 1e-12);

} // namespace tdsmps::theory
