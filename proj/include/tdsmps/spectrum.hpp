#pragma once

#include <span>
#include <vector>

namespace tdsmps {

/// Reduced-density-matrix eigenvalues at one cut, descending, summing to one.
///
/// `bond` is the cut position: subsystem A is sites 1..bond of both the
/// physical and the ancilla copy (1-based, so valid bonds are 1..L-1).
struct BondSpectrum {
    std::vector<double> weights;
    long bond = 0;

    [[nodiscard]] long size() const noexcept { return static_cast<long>(weights.size()); }
    friend bool operator==(const BondSpectrum&, const BondSpectrum&) = default;
};

/// Sorts descending, clamps entries below 1e-16 to zero and rescales to unit sum.
BondSpectrum make_spectrum(std::vector<double> weights, long bond = 0);

/// Rényi entropy in nats. alpha == 1 is the von Neumann branch with 0 log 0 = 0.
double renyi_entropy(const BondSpectrum& spectrum, double alpha);
double renyi_entropy(std::span<const double> weights, double alpha);

/// Sum of weights beyond the leading `rank` entries.
double truncation_error(std::span<const double> weights, long rank);

} // namespace tdsmps
