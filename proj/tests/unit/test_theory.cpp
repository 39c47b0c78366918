#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tdsmps/errors.hpp"
#include "tdsmps/theory.hpp"

using namespace tdsmps;
using namespace tdsmps::theory;

TEST_SUITE("theory") {

TEST_CASE("entropy slopes") {
    CHECK(entropy_log_slope(1.0, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(entropy_log_slope(1.0, 0.5) == doctest::Approx(0.5));
    CHECK(entropy_log_slope(2.0, 1.0) == doctest::Approx(2.0 / 3.0));
    CHECK(d_scaling_exponent(1.0, 1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("cft and gapped predictions") {
    CHECK(cft_entropy_prediction(1.0, 1.0, std::numbers::pi, 0.7) == doctest::Approx(0.7));
    CHECK(cft_entropy_prediction(1.0, 1.0, std::numbers::pi * std::numbers::e, 0.0) == doctest::Approx(1.0 / 3.0));
    CHECK(gapped_entropy_prediction(1.7, 0.4, 1.0, 0.3) == doctest::Approx(0.6));
    CHECK(gapped_entropy_prediction(1.0, 1.0, std::numbers::e, 0.3) == doctest::Approx(1.0 / 3.0 + 0.6));
}

TEST_CASE("thermal correlation length") {
    CHECK(thermal_correlation_length(1.0, std::numbers::pi) == doctest::Approx(1.0));
    CHECK(thermal_correlation_length(2.0, 2.0 * std::numbers::pi) == doctest::Approx(1.0));
}

TEST_CASE("mps error bound") {
    const std::vector<double> zeros(5, 0.0);
    CHECK(mps_error_bound(zeros) == 0.0);
    const std::vector<double> one{0.02};
    CHECK(mps_error_bound(one) == doctest::Approx(0.2));
    const std::vector<double> bad{-0.1};
    CHECK_THROWS_AS(mps_error_bound(bad), DomainError);
}

TEST_CASE("bond dimension bound") {
    CHECK(bond_dimension_bound(1.3, 0.5, 1.0 - 1e-12) == doctest::Approx(1.0 + std::exp(1.3)).epsilon(1e-9));
    CHECK(bond_dimension_bound(0.0, 0.25, 1e-3) == doctest::Approx(1.0 + std::pow(1e-3, -0.25 / 0.75)));
    CHECK(bond_dimension_bound(2.0, 0.5, 1e-4) == doctest::Approx(1.0 + std::exp(2.0) * 1e4));
    CHECK(bond_dimension_bound(2.0, 0.5, 1e-4) == doctest::Approx(73891.6).epsilon(1e-5));
    CHECK_THROWS_AS(bond_dimension_bound(1.0, 1.0, 1e-4), DomainError);
    CHECK_THROWS_AS(bond_dimension_bound(1.0, 1.5, 1e-4), DomainError);
}

TEST_CASE("optimal alpha") {
    CHECK(optimal_alpha_ratio(1.0, 1e-5, 1000.0) == doctest::Approx(10.0));
    const double a = optimal_alpha(1.0, 1e-5, 1000.0);
    CHECK(a == doctest::Approx((1.0 - std::sqrt(10.0)) / (1.0 - 10.0)));
    CHECK(a == doctest::Approx(0.2402).epsilon(1e-3));
    CHECK(a > 0.07);
    CHECK(a < 0.3);
    CHECK(d_scaling_exponent(1.0, a) == doctest::Approx(0.8604).epsilon(1e-3));
    // ratio -> 1 from above
    const double eps = std::exp(-(1.0 + 1e-6) / 6.0);
    CHECK(optimal_alpha(1.0, eps, std::numbers::e) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS(optimal_alpha(1.0, 0.5, 1e6), DomainError);
    CHECK_THROWS_AS(optimal_alpha_ratio(1.0, 1e-5, 1.0), DomainError);
}

TEST_CASE("optimal alpha minimizes the cft bound") {
    const double c = 1.0;
    const double eps = 1e-6;
    const double y = 40.0;
    const double a = optimal_alpha(c, eps, y);
    const double at = log_bond_dimension_bound_cft(c, a, eps, y);
    for (double da : {-1e-3, 1e-3, -0.05, 0.05}) {
        CHECK(log_bond_dimension_bound_cft(c, a + da, eps, y) >= at);
    }
}

TEST_CASE("entropy lower bound") {
    CHECK_THROWS_AS(entropy_lower_bound_from_truncation(0.0, 4, 0.5), DomainError);
    const auto b = entropy_lower_bound_from_truncation(0.1, 2, 0.5);
    CHECK(b.value == doctest::Approx(std::log(0.1)));
    CHECK(b.vacuous);
    CHECK(entropy_bound_valid(0.1, 2, 0.5));
    CHECK_FALSE(entropy_bound_valid(0.1, 2, 0.2));
    CHECK_FALSE(entropy_bound_valid(0.1, 2, 1.0));
    CHECK_THROWS_AS(entropy_lower_bound_from_truncation(0.1, 2, 0.2), DomainError);
    const auto sharp = entropy_lower_bound_from_truncation(1e-3, 2000, 0.5, true);
    const auto weak = entropy_lower_bound_from_truncation(1e-3, 2000, 0.5);
    CHECK(sharp.value > weak.value);
    CHECK_FALSE(weak.vacuous);
}

TEST_CASE("tail height") {
    const double eps = 1e-3;
    const long d = 10;
    const double alpha = 0.4;
    const double h = optimal_tail_height(eps, d, alpha);
    CHECK(h == doctest::Approx(0.6 / 0.4 * eps / 9.0));
    const double at = entropy_bound_in_h(eps, d, alpha, h);
    CHECK(entropy_bound_in_h(eps, d, alpha, 1.1 * h) >= at);
    CHECK(entropy_bound_in_h(eps, d, alpha, 0.9 * h) >= at);
    // The minimum over h is the sharp form of the bound.
    CHECK(at == doctest::Approx(entropy_lower_bound_from_truncation(eps, d, alpha, true).value).epsilon(1e-12));
}

TEST_CASE("majorizing distribution") {
    const auto w = majorizing_distribution(0.2, 3, 0.1);
    REQUIRE(w.size() == 5);
    const double expected[] = {0.6, 0.1, 0.1, 0.1, 0.1};
    for (int k = 0; k < 5; ++k) {
        CHECK(w[static_cast<std::size_t>(k)] == doctest::Approx(expected[k]));
    }
    CHECK_THROWS_AS(majorizing_distribution(0.2, 3, 0.0), ParameterError);
    CHECK_THROWS_AS(majorizing_distribution(0.2, 3, 0.3), ParameterError);
    const std::vector<double> other{0.5, 0.2, 0.1, 0.1, 0.05, 0.05};
    CHECK(majorizes(w, other));
    CHECK_FALSE(majorizes(other, w));
}

} // TEST_SUITE
