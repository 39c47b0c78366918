#include "tdsmps/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "tdsmps/errors.hpp"

namespace tdsmps {

namespace {
constexpr double clamp_floor = 1e-16;
}

BondSpectrum make_spectrum(std::vector<double> weights, long bond) {
    for (double& w : weights) {
        if (!std::isfinite(w)) {
            throw NumericalError("non-finite spectrum weight");
        }
        if (w < clamp_floor) {
            w = 0.0;
        }
    }
    std::sort(weights.begin(), weights.end(), std::greater<>());
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total > 0) {
        for (double& w : weights) {
            w /= total;
        }
    }
    return {std::move(weights), bond};
}

double renyi_entropy(std::span<const double> weights, double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha)) {
        throw DomainError("Renyi index alpha must be positive and finite");
    }
    if (alpha == 1.0) {
        double s = 0;
        for (double w : weights) {
            if (w >= clamp_floor) {
                s -= w * std::log(w);
            }
        }
        return std::max(s, 0.0);
    }
    double sum = 0;
    for (double w : weights) {
        if (w >= clamp_floor) {
            sum += std::pow(w, alpha);
        }
    }
    return std::max(std::log(sum) / (1.0 - alpha), 0.0);
}

double renyi_entropy(const BondSpectrum& spectrum, double alpha) {
    return renyi_entropy(std::span<const double>(spectrum.weights), alpha);
}

double truncation_error(std::span<const double> weights, long rank) {
    if (rank < 0) {
        throw ParameterError("rank must be nonnegative");
    }
    double eps = 0;
    for (std::size_t k = static_cast<std::size_t>(rank); k < weights.size(); ++k) {
        eps += weights[k];
    }
    return eps;
}

} // namespace tdsmps
