#include <doctest.h>

#include <cmath>
#include <random>

#include "tdsmps/errors.hpp"
#include "tdsmps/models.hpp"
#include "tdsmps/mps.hpp"
#include "tdsmps/oracle.hpp"

using namespace tdsmps;

namespace {

Eigen::VectorXd random_unit(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (Index k = 0; k < n; ++k) {
        v[k] = g(rng);
    }
    return v.normalized();
}

} // namespace

TEST_SUITE("mps") {

TEST_CASE("infinite-temperature state is a product of local identities") {
    const auto st = build_infinite_temperature_tds<double>(2, 4);
    const double a = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < 4; ++i) {
        const auto& t = st.site(i);
        REQUIRE(t.dims() == std::vector<Index>{1, 4, 1});
        CHECK(std::abs(t.data()[0]) == doctest::Approx(a));
        CHECK(t.data()[1] == 0.0);
        CHECK(t.data()[2] == 0.0);
        CHECK(std::abs(t.data()[3]) == doctest::Approx(a));
    }
    for (const auto& s : all_schmidt_spectra(st)) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            CHECK(renyi_entropy(s, alpha) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("two-site infinite-temperature dense vector") {
    const Eigen::VectorXd v = to_dense(build_infinite_temperature_tds<double>(2, 2));
    REQUIRE(v.size() == 16);
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(16);
    for (Index k : {0, 3, 12, 15}) {
        expected[k] = 0.5;
    }
    CHECK((v - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ancilla trace of the boson infinite-temperature state is maximally mixed") {
    const auto st = build_infinite_temperature_tds<double>(6, 3);
    const oracle::DenseState dense{6, 3, to_dense(st)};
    const Eigen::MatrixXd rho = oracle::physical_density(dense);
    REQUIRE(rho.rows() == 216);
    CHECK((rho - Eigen::MatrixXd::Identity(216, 216) / 216.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("canonicalize keeps the product-state spectra and is idempotent") {
    const auto st = build_infinite_temperature_tds<double>(2, 4);
    for (Index b = 1; b < 4; ++b) {
        const auto c = canonicalize(st, b);
        for (const auto& s : all_schmidt_spectra(c)) {
            REQUIRE(s.weights.size() == 1);
            CHECK(s.weights[0] == doctest::Approx(1.0));
        }
    }
    std::mt19937_64 rng(2);
    const auto r = from_dense(random_unit(256, rng), 2, 4);
    const auto once = canonicalize(r, 2);
    const auto twice = canonicalize(once, 2);
    const auto s1 = schmidt_spectrum(once, 2).weights;
    const auto s2 = schmidt_spectrum(twice, 2).weights;
    REQUIRE(s1.size() == s2.size());
    for (std::size_t k = 0; k < s1.size(); ++k) {
        CHECK(std::abs(s1[k] - s2[k]) < 1e-12);
    }
}

TEST_CASE("schmidt spectrum of a maximally entangled pair") {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(16);
    for (Index k = 0; k < 4; ++k) {
        v[k * 4 + k] = 0.5;
    }
    const auto s = schmidt_spectrum(from_dense(v, 2, 2), 1);
    REQUIRE(s.weights.size() == 4);
    for (double w : s.weights) {
        CHECK(w == doctest::Approx(0.25));
    }
    CHECK_THROWS_AS(schmidt_spectrum(from_dense(v, 2, 2), 2), RangeError);
    CHECK_THROWS_AS(schmidt_spectrum(from_dense(v, 2, 2), 0), RangeError);
}

TEST_CASE("truncate_to reports the discarded weight per bond") {
    const std::vector<double> w{0.7, 0.2, 0.1};
    Eigen::VectorXd v = Eigen::VectorXd::Zero(16);
    for (Index k = 0; k < 3; ++k) {
        v[k * 4 + k] = std::sqrt(w[static_cast<std::size_t>(k)]);
    }
    const auto st = from_dense(v, 2, 2);
    const auto noop = truncate_to(st, 8, 0.0);
    CHECK(noop.bond_errors[0] == doctest::Approx(0.0));
    const auto cut = truncate_to(st, 2, 0.0);
    CHECK(cut.bond_errors[0] == doctest::Approx(0.1));
    CHECK(cut.state.bond_dimension(1) == 2);
}

TEST_CASE("truncate_to never grows spectra and reports exact errors") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto st = from_dense(random_unit(4096, rng), 2, 6);
        const auto before = all_schmidt_spectra(st);
        const auto out = truncate_to(st, 3 + trial % 4, 1e-3);
        const auto after = all_schmidt_spectra(out.state);
        for (std::size_t b = 0; b < before.size(); ++b) {
            CHECK(after[b].weights.size() <= before[b].weights.size());
            CHECK(out.bond_errors[b] >= 0.0);
        }
        // The sweep starts at the last bond, which sees the input spectrum.
        const std::size_t last = before.size() - 1;
        const long kept = static_cast<long>(after[last].weights.size());
        CHECK(std::abs(out.bond_errors[last] - truncation_error(before[last].weights, kept)) < 1e-12);
    }
}

TEST_CASE("dense round trips") {
    const auto st = build_infinite_temperature_tds<double>(2, 3);
    const Eigen::VectorXd v = to_dense(st);
    CHECK((to_dense(from_dense(v, 2, 3)) - v).cwiseAbs().maxCoeff() < 1e-10);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd r = random_unit(256, rng);
        CHECK((to_dense(from_dense(r, 2, 4)) - r).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK_THROWS_AS(to_dense(build_infinite_temperature_tds<double>(2, 8), false, 1000), SizeError);
}

TEST_CASE("expectations on the infinite-temperature state") {
    const auto st = build_infinite_temperature_tds<double>(2, 4);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const auto sm = spin_matrices(0.5);
    for (Index i = 0; i < 4; ++i) {
        CHECK(expectation(st, id, i) == doctest::Approx(1.0));
        CHECK(expectation(st, sm.sz, i) == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(expectation(st, sm.sz, 4), RangeError);
    const Eigen::MatrixXd rho = site_density_matrix(st, 1);
    CHECK((rho - 0.5 * id).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("expectation of a random state matches the dense value") {
    std::mt19937_64 rng(9);
    const Eigen::VectorXd r = random_unit(4096, rng);
    const auto st = from_dense(r, 2, 6);
    const oracle::DenseState dense{2, 6, r};
    const Eigen::MatrixXd rho = oracle::physical_density(dense);
    const auto sm = spin_matrices(0.5);
    for (Index i = 0; i < 6; ++i) {
        const Eigen::MatrixXd op = oracle::embed_operator(sm.sz, i, 2, 6);
        CHECK(expectation(st, sm.sz, i) == doctest::Approx((rho * op).trace()).epsilon(1e-10));
    }
}

} // TEST_SUITE
