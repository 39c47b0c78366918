#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "tdsmps/errors.hpp"
#include "tdsmps/models.hpp"
#include "tdsmps/oracle.hpp"

using namespace tdsmps;
using Eigen::Index;

namespace {

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    return es.eigenvalues();
}

Eigen::MatrixXcd casimir(const SpinMatrices& s) {
    const Eigen::MatrixXcd sx = s.sx.cast<std::complex<double>>();
    const Eigen::MatrixXcd sz = s.sz.cast<std::complex<double>>();
    return sx * sx + s.sy * s.sy + sz * sz;
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("xxz bond spectra") {
    ModelSpec m;
    m.length = 4;
    m.delta = 1.0;
    for (const auto& t : build_bond_terms(m)) {
        const auto ev = sorted_eigenvalues(t.matrix);
        CHECK(ev[0] == doctest::Approx(-0.75));
        for (int k = 1; k < 4; ++k) {
            CHECK(ev[k] == doctest::Approx(0.25));
        }
    }
    m.delta = 0.0;
    const auto ev = sorted_eigenvalues(build_bond_terms(m)[1].matrix);
    CHECK(ev[0] == doctest::Approx(-0.5));
    CHECK(std::abs(ev[1]) < 1e-14);
    CHECK(std::abs(ev[2]) < 1e-14);
    CHECK(ev[3] == doctest::Approx(0.5));
}

TEST_CASE("spin matrices") {
    const auto half = spin_matrices(0.5);
    CHECK(half.sx(0, 1) == doctest::Approx(0.5));
    CHECK(half.sz(0, 0) == doctest::Approx(0.5));
    CHECK(half.sz(1, 1) == doctest::Approx(-0.5));
    CHECK(half.sy(0, 1).imag() == doctest::Approx(-0.5));
    for (auto [s, c] : {std::pair{1.0, 2.0}, std::pair{1.5, 3.75}}) {
        const auto sm = spin_matrices(s);
        const Index d = sm.sz.rows();
        CHECK((casimir(sm) - c * Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(spin_matrices(0.3), ParameterError);
}

TEST_CASE("boson matrices") {
    const auto hc = boson_matrices(1);
    CHECK(hc.annihilation(0, 1) == doctest::Approx(1.0));
    CHECK(hc.annihilation(1, 0) == 0.0);
    const auto b = boson_matrices(5);
    const Eigen::MatrixXd n = b.creation * b.annihilation;
    for (Index k = 0; k <= 5; ++k) {
        CHECK(b.number(k, k) == doctest::Approx(static_cast<double>(k)));
        CHECK(n(k, k) == doctest::Approx(static_cast<double>(k)));
    }
    CHECK((n - n.diagonal().asDiagonal().toDenseMatrix()).norm() < 1e-14);
    CHECK_THROWS_AS(boson_matrices(0), ParameterError);
}

TEST_CASE("bond terms are hermitian for every model") {
    std::vector<ModelSpec> specs(4);
    specs[0].kind = ModelKind::xxz_half;
    specs[1].kind = ModelKind::heisenberg_spin_s;
    specs[1].spin = 1.5;
    specs[2].kind = ModelKind::bilinear_biquadratic_spin1;
    specs[2].theta = 0.3;
    specs[3].kind = ModelKind::bose_hubbard;
    specs[3].hopping = 0.25;
    specs[3].n_max = 3;
    for (auto& m : specs) {
        m.length = 4;
        const auto terms = build_bond_terms(m);
        REQUIRE(terms.size() == 3);
        for (const auto& t : terms) {
            CHECK((t.matrix - t.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(t.matrix.rows() == m.local_dim() * m.local_dim());
        }
    }
}

TEST_CASE("bose-hubbard bond terms sum to the full Hamiltonian") {
    ModelSpec m;
    m.kind = ModelKind::bose_hubbard;
    m.length = 3;
    m.n_max = 2;
    m.hopping = 0.3;
    m.interaction = 1.2;
    m.chemical_potential = 0.7;
    const auto b = boson_matrices(2);
    const Eigen::MatrixXd onsite = 0.5 * m.interaction * b.number * (b.number - Eigen::MatrixXd::Identity(3, 3)) -
                                   m.chemical_potential * b.number;
    Eigen::MatrixXd hop(9, 9);
    hop = -m.hopping * (Eigen::kroneckerProduct(b.creation, b.annihilation).eval() +
                        Eigen::kroneckerProduct(b.annihilation, b.creation).eval());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(27, 27);
    for (long i = 0; i < 3; ++i) {
        h += oracle::embed_operator(onsite, i, 3, 3);
    }
    for (long i = 0; i < 2; ++i) {
        h += oracle::embed_operator(hop, i, 3, 3);
    }
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(27, 27);
    for (const auto& t : build_bond_terms(m)) {
        sum += oracle::embed_operator(t.matrix, t.site, 3, 3);
    }
    CHECK((sum - h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("bilinear-biquadratic bond term") {
    ModelSpec m;
    m.kind = ModelKind::bilinear_biquadratic_spin1;
    m.length = 2;
    m.theta = 0.4;
    const Eigen::MatrixXd ss = spin_exchange(1.0);
    const Eigen::MatrixXd expected = std::cos(0.4) * ss + std::sin(0.4) * ss * ss;
    CHECK((build_bond_terms(m)[0].matrix - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("model identifiers and kinds") {
    for (auto k : {ModelKind::xxz_half, ModelKind::heisenberg_spin_s, ModelKind::bilinear_biquadratic_spin1,
                   ModelKind::bose_hubbard}) {
        CHECK(parse_model_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_model_kind("ising"), ParameterError);
    ModelSpec a;
    ModelSpec b;
    b.delta = 3.0;
    CHECK(a.id() != b.id());
}

} // TEST_SUITE
