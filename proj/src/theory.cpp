#include "tdsmps/theory.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tdsmps/errors.hpp"

namespace tdsmps::theory {

namespace {

void require_unit_interval(double x, const char* name) {
    if (!(x > 0 && x < 1)) {
        throw DomainError(std::string(name) + " must lie in (0, 1)");
    }
}

} // namespace

double entropy_log_slope(double central_charge, double alpha) {
    if (!(central_charge > 0) || !(alpha > 0)) {
        throw DomainError("central charge and alpha must be positive");
    }
    return central_charge / 6.0 * (1.0 + 1.0 / alpha);
}

double cft_entropy_prediction(double central_charge, double alpha, double beta, double offset) {
    if (!(beta > 0)) {
        throw DomainError("beta must be positive");
    }
    return entropy_log_slope(central_charge, alpha) * std::log(beta / std::numbers::pi) + offset;
}

double gapped_entropy_prediction(double central_charge, double alpha, double xi, double offset) {
    if (!(xi > 0)) {
        throw DomainError("correlation length must be positive");
    }
    return entropy_log_slope(central_charge, alpha) * std::log(xi) + 2.0 * offset;
}

double thermal_correlation_length(double scaling_dimension, double beta) {
    if (!(scaling_dimension > 0)) {
        throw DomainError("scaling dimension must be positive");
    }
    return beta / (std::numbers::pi * scaling_dimension);
}

double mps_error_bound(std::span<const double> bond_errors) {
    double sum = 0;
    for (double e : bond_errors) {
        if (!(e >= 0 && e <= 1)) {
            throw DomainError("truncation errors must lie in [0, 1]");
        }
        sum += e;
    }
    return std::sqrt(2.0 * sum);
}

double bond_dimension_bound(double renyi_entropy, double alpha, double epsilon) {
    if (alpha >= 1) {
        throw DomainError("bond-dimension bound diverges for alpha >= 1");
    }
    require_unit_interval(alpha, "alpha");
    require_unit_interval(epsilon, "epsilon");
    return 1.0 + std::exp(renyi_entropy + alpha / (1.0 - alpha) * std::log(1.0 / epsilon));
}

double log_bond_dimension_bound_cft(double central_charge, double alpha, double epsilon, double y) {
    require_unit_interval(alpha, "alpha");
    require_unit_interval(epsilon, "epsilon");
    if (!(y > 1)) {
        throw DomainError("y must exceed 1");
    }
    return entropy_log_slope(central_charge, alpha) * std::log(y) + alpha / (1.0 - alpha) * std::log(1.0 / epsilon);
}

double optimal_alpha_ratio(double central_charge, double epsilon, double y) {
    if (!(central_charge > 0)) {
        throw DomainError("central charge must be positive");
    }
    require_unit_interval(epsilon, "epsilon");
    if (!(y > 1)) {
        throw DomainError("y must exceed 1");
    }
    return 6.0 / central_charge * std::log(1.0 / epsilon) / std::log(y);
}

double optimal_alpha(double central_charge, double epsilon, double y) {
    const double r = optimal_alpha_ratio(central_charge, epsilon, y);
    if (!(r > 1)) {
        throw DomainError("optimal alpha needs (6/c) log(1/eps) / log(y) > 1, got " + std::to_string(r) +
                          " for c=" + std::to_string(central_charge) + ", eps=" + std::to_string(epsilon) +
                          ", y=" + std::to_string(y));
    }
    return (1.0 - std::sqrt(r)) / (1.0 - r);
}

double d_scaling_exponent(double central_charge, double alpha) { return entropy_log_slope(central_charge, alpha); }

bool entropy_bound_valid(double epsilon, long rank, double alpha) {
    const double denom = static_cast<double>(rank) - 1.0 - epsilon;
    if (!(epsilon > 0 && epsilon < 1) || rank < 2 || !(denom > 0) || !(alpha < 1)) {
        return false;
    }
    return alpha >= epsilon * static_cast<double>(rank) / denom;
}

EntropyBound entropy_lower_bound_from_truncation(double epsilon, long rank, double alpha, bool sharp) {
    if (!(epsilon > 0)) {
        throw DomainError("truncation error must be positive");
    }
    if (!entropy_bound_valid(epsilon, rank, alpha)) {
        throw DomainError("alpha outside the validity window 1 > alpha >= eps D / (D - 1 - eps)");
    }
    const double dm1 = static_cast<double>(rank) - 1.0;
    double value = std::log(dm1) + alpha / (1.0 - alpha) * std::log(epsilon);
    if (sharp) {
        value -= (alpha * std::log(alpha) + (1.0 - alpha) * std::log(1.0 - alpha)) / (1.0 - alpha);
    }
    return {value, value < 0};
}

double entropy_bound_in_h(double epsilon, long rank, double alpha, double h) {
    if (!(h > 0)) {
        throw DomainError("h must be positive");
    }
    const double dm1 = static_cast<double>(rank) - 1.0;
    return std::log((dm1 + epsilon / h) * std::pow(h, alpha)) / (1.0 - alpha);
}

double optimal_tail_height(double epsilon, long rank, double alpha) {
    require_unit_interval(alpha, "alpha");
    if (rank < 2) {
        throw DomainError("rank must be at least 2");
    }
    return (1.0 - alpha) / alpha * epsilon / (static_cast<double>(rank) - 1.0);
}

std::vector<double> majorizing_distribution(double epsilon, long rank, double h) {
    if (!(h > 0) || !(epsilon >= 0) || rank < 1) {
        throw ParameterError("majorizing distribution needs h > 0, eps >= 0, D >= 1");
    }
    const double first = 1.0 - epsilon - static_cast<double>(rank - 1) * h;
    if (first < h) {
        throw ParameterError("need 1 - eps - (D-1) h >= h so that the first weight is the largest");
    }
    double ratio = epsilon / h;
    auto tail_count = static_cast<long>(std::floor(ratio));
    double gamma = ratio - static_cast<double>(tail_count);
    if (gamma > 1.0 - 1e-12) {
        ++tail_count;
        gamma = 0;
    } else if (gamma < 1e-12) {
        gamma = 0;
    }
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(rank + tail_count + 1));
    w.push_back(first);
    for (long k = 1; k < rank + tail_count; ++k) {
        w.push_back(h);
    }
    if (gamma > 0) {
        w.push_back(gamma * h);
    }
    return w;
}

bool majorizes(std::span<const double> upper, std::span<const double> lower, double tol) {
    const std::size_t n = std::max(upper.size(), lower.size());
    double su = 0;
    double sl = 0;
    for (std::size_t k = 0; k < n; ++k) {
        su += k < upper.size() ? upper[k] : 0.0;
        sl += k < lower.size() ? lower[k] : 0.0;
        if (su < sl - tol) {
            return false;
        }
    }
    return true;
}

} // namespace tdsmps::theory
