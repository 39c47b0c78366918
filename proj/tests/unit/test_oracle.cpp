#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tdsmps/errors.hpp"
#include "tdsmps/mps.hpp"
#include "tdsmps/oracle.hpp"

using namespace tdsmps;

namespace {

ModelSpec xxz(long length, double delta) {
    ModelSpec m;
    m.length = length;
    m.delta = delta;
    return m;
}

Eigen::MatrixXd random_symmetric(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            a(i, j) = g(rng);
        }
    }
    return 0.5 * (a + a.transpose());
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("beta zero gives the infinite-temperature state") {
    const auto s = oracle::exact_tds(xxz(4, 1.0), 0.0);
    const Eigen::VectorXd mps = to_dense(build_infinite_temperature_tds<double>(2, 4));
    CHECK((s.coefficients - mps).cwiseAbs().maxCoeff() < 1e-14);
    const Eigen::MatrixXd rho = oracle::exact_thermal_density(xxz(4, 1.0), 0.0);
    CHECK((rho - Eigen::MatrixXd::Identity(16, 16) / 16.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reduced spectra of simple states") {
    const auto product = oracle::exact_tds(xxz(3, 1.0), 0.0);
    const auto s = oracle::reduced_spectrum(product, 1);
    REQUIRE(s.weights.size() >= 1);
    CHECK(s.weights[0] == doctest::Approx(1.0));
    CHECK(truncation_error(s.weights, 1) < 1e-14);

    // Maximally entangled across the cut with doubled dimension 4.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(16);
    for (Index k = 0; k < 4; ++k) {
        v[k * 4 + k] = 0.5;
    }
    const auto me = oracle::reduced_spectrum({2, 2, v}, 1);
    REQUIRE(me.weights.size() == 4);
    for (double w : me.weights) {
        CHECK(w == doctest::Approx(0.25));
    }
}

TEST_CASE("purified expectations equal thermal traces") {
    std::mt19937_64 rng(21);
    for (long length : {3, 4, 6}) {
        const ModelSpec m = xxz(length, 0.7);
        const double beta = 1.3;
        const auto tds = oracle::exact_tds(m, beta);
        const Eigen::MatrixXd rho = oracle::exact_thermal_density(m, beta);
        const Eigen::MatrixXd psi = oracle::unpair(tds);
        for (int k = 0; k < 17; ++k) {
            const long width = 1 + k % 2;
            const long site = std::uniform_int_distribution<long>(0, length - width)(rng);
            const Eigen::MatrixXd op =
                oracle::embed_operator(random_symmetric(width == 1 ? 2 : 4, rng), site, 2, length);
            const double purified = (psi.transpose() * op * psi).trace();
            CHECK(std::abs(purified - (rho * op).trace()) < 1e-10);
        }
    }
}

TEST_CASE("thermal densities are positive with unit trace") {
    for (double beta : {0.0, 0.5, 3.0}) {
        const Eigen::MatrixXd rho = oracle::exact_thermal_density(xxz(5, 1.0), beta);
        CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-10));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
        const Eigen::MatrixXd rp = oracle::physical_density(oracle::exact_tds(xxz(5, 1.0), beta));
        CHECK((rp - rho).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pair and unpair are inverse") {
    const auto tds = oracle::exact_tds(xxz(3, 1.0), 0.8);
    const auto back = oracle::pair(oracle::unpair(tds), 2, 3);
    CHECK((back.coefficients - tds.coefficients).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("low-temperature purification doubles the ground-state entropy") {
    const ModelSpec m = xxz(4, 1.0);
    const auto tds = oracle::exact_tds(m, 200.0);
    const Eigen::VectorXd gs = oracle::ground_state(oracle::dense_hamiltonian(m));
    const double s_gs = renyi_entropy(oracle::pure_state_spectrum(gs, 2, 4, 2), 1.0);
    CHECK(renyi_entropy(oracle::reduced_spectrum(tds, 2), 1.0) == doctest::Approx(2.0 * s_gs).epsilon(1e-8));
}

TEST_CASE("energy gaps with closed forms") {
    ModelSpec xx = xxz(4, 0.0);
    const double gap = oracle::energy_gap(xx).gap();
    CHECK(gap == doctest::Approx(oracle::xx_free_fermion_gap(4)).epsilon(1e-10));
    CHECK(gap == doctest::Approx(std::cos(2.0 * std::numbers::pi / 5.0)).epsilon(1e-10));

    ModelSpec bh;
    bh.kind = ModelKind::bose_hubbard;
    bh.length = 4;
    bh.hopping = 0.0;
    bh.interaction = 1.0;
    bh.chemical_potential = 0.5;
    bh.n_max = 3;
    // Single-site levels n(n-1)/2 - n/2: unit filling, then one site emptied or doubled.
    CHECK(oracle::energy_gap(bh).gap() == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("gapped chains at desk-scale size") {
    // Open Ising-like chains have a quasi-degenerate Neel doublet; its
    // splitting closes with L while the excitation above it stays finite.
    const double split8 = oracle::energy_gap(xxz(8, 3.0)).gap();
    const double split6 = oracle::energy_gap(xxz(6, 3.0)).gap();
    CHECK(split8 < split6);
    CHECK(split8 < 0.2);
    const Eigen::MatrixXd h = oracle::dense_hamiltonian(xxz(8, 3.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    CHECK(es.eigenvalues()[2] - es.eigenvalues()[0] > 0.613);

    ModelSpec s1;
    s1.kind = ModelKind::bilinear_biquadratic_spin1;
    s1.length = 6;
    // Edge spins split the open chain's low-lying multiplet below the bulk gap.
    const double g = oracle::energy_gap(s1).gap();
    CHECK(g > 0.0);
    CHECK(g < 0.410);
}

TEST_CASE("free-fermion oracle agrees with exact diagonalization") {
    const ModelSpec m = xxz(6, 0.0);
    for (double beta : {0.5, 2.0, 6.0}) {
        const auto tds = oracle::exact_tds(m, beta);
        for (long bond : {1, 3, 5}) {
            const auto nu = oracle::xx_tds_mode_occupations(6, beta, bond);
            for (double alpha : {0.5, 1.0, 2.0}) {
                const double ed = renyi_entropy(oracle::reduced_spectrum(tds, bond), alpha);
                // sqrt of roundoff-level ED eigenvalues limits alpha < 1
                const double tol = alpha < 1.0 ? 1e-6 : 1e-10;
                CHECK(oracle::free_fermion_renyi(nu, alpha) == doctest::Approx(ed).epsilon(tol));
            }
        }
    }
    const Eigen::VectorXd e = oracle::xx_single_particle_energies(4);
    CHECK(e.size() == 4);
}

TEST_CASE("trace norm") {
    const Eigen::MatrixXd d = Eigen::Vector3d(1.0, -2.0, 0.5).asDiagonal();
    CHECK(oracle::trace_norm(d) == doctest::Approx(3.5));
}

TEST_CASE("size cap") {
    CHECK_THROWS_AS(oracle::dense_hamiltonian(xxz(14, 1.0)), SizeError);
}

} // TEST_SUITE
