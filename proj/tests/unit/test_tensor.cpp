#include <doctest.h>

#include <random>

#include "tdsmps/errors.hpp"
#include "tdsmps/tensor.hpp"

using namespace tdsmps;

namespace {

DenseTensor<double> random_tensor(std::vector<Index> dims, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    DenseTensor<double> t(std::move(dims));
    for (Index k = 0; k < t.size(); ++k) {
        t.data()[k] = g(rng);
    }
    return t;
}

} // namespace

TEST_SUITE("tensor") {

TEST_CASE("contract with identity returns the vector") {
    DenseTensor<double> id({2, 2}, Eigen::VectorXd::Map(std::vector<double>{1, 0, 0, 1}.data(), 4));
    DenseTensor<double> v({2}, Eigen::Vector2d(0.3, -1.7));
    const auto out = contract(id, v, {{1, 0}});
    REQUIRE(out.dims() == std::vector<Index>{2});
    CHECK(out.data()[0] == doctest::Approx(0.3));
    CHECK(out.data()[1] == doctest::Approx(-1.7));
}

TEST_CASE("contract matches a triple loop") {
    std::mt19937_64 rng(3);
    const auto a = random_tensor({2, 3}, rng);
    const auto b = random_tensor({3, 4}, rng);
    const auto c = contract(a, b, {{1, 0}});
    REQUIRE(c.dims() == std::vector<Index>{2, 4});
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 4; ++j) {
            double s = 0;
            for (Index k = 0; k < 3; ++k) {
                s += a({i, k}) * b({k, j});
            }
            CHECK(c({i, j}) == doctest::Approx(s).epsilon(1e-14));
        }
    }
}

TEST_CASE("contract without pairs is the outer product") {
    std::mt19937_64 rng(4);
    const auto a = random_tensor({2, 3}, rng);
    const auto b = random_tensor({5}, rng);
    const auto c = contract(a, b, std::span<const AxisPair>{});
    CHECK(c.dims() == std::vector<Index>{2, 3, 5});
    CHECK(c.size() == 30);
    CHECK(c({1, 2, 4}) == doctest::Approx(a({1, 2}) * b({4})));
}

TEST_CASE("contract rejects mismatched extents") {
    std::mt19937_64 rng(5);
    const auto a = random_tensor({2, 3}, rng);
    const auto b = random_tensor({4, 2}, rng);
    CHECK_THROWS_AS(contract(a, b, {{1, 0}}), DimensionError);
}

TEST_CASE("contract is bilinear") {
    std::mt19937_64 rng(6);
    const auto a1 = random_tensor({3, 4, 2}, rng);
    const auto a2 = random_tensor({3, 4, 2}, rng);
    const auto b = random_tensor({2, 4, 5}, rng);
    DenseTensor<double> sum = a1;
    sum.data() = 2.0 * a1.data() - 0.5 * a2.data();
    const auto lhs = contract(sum, b, {{1, 1}, {2, 0}});
    const auto r1 = contract(a1, b, {{1, 1}, {2, 0}});
    const auto r2 = contract(a2, b, {{1, 1}, {2, 0}});
    CHECK((lhs.data() - (2.0 * r1.data() - 0.5 * r2.data())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("permute, fuse and split") {
    std::mt19937_64 rng(7);
    const auto t = random_tensor({2, 3, 4}, rng);
    const auto p = permute(t, {2, 0, 1});
    CHECK(p.dims() == std::vector<Index>{4, 2, 3});
    CHECK(p({3, 1, 2}) == t({1, 2, 3}));
    const auto f = fuse(t, 1, 2);
    CHECK(f.dims() == std::vector<Index>{2, 12});
    const std::vector<Index> ext{3, 4};
    CHECK(split(f, 1, ext) == t);
}

TEST_CASE("svd_truncate on diagonal matrices") {
    const Eigen::MatrixXd m = Eigen::Vector3d(3, 2, 1).asDiagonal();
    const auto f = svd_truncate(m, {2, 0.0});
    REQUIRE(f.singular_values.size() == 2);
    CHECK(f.singular_values[0] == doctest::Approx(3));
    CHECK(f.singular_values[1] == doctest::Approx(2));
    CHECK(f.discarded_weight == doctest::Approx(1));

    const Eigen::MatrixXd deficient = Eigen::Vector3d(1, 0, 0).asDiagonal();
    CHECK(svd_truncate(deficient, {unlimited_rank, 1e-12}).singular_values.size() == 1);
}

TEST_CASE("svd_truncate edge cases") {
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 4);
    const auto f = svd_truncate(zero);
    CHECK(f.singular_values.size() == 0);
    CHECK(f.discarded_weight == 0);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd_truncate(bad), NumericalError);
}

TEST_CASE("svd_truncate reconstructs random matrices") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd m = random_tensor({8, 8}, rng).matrix(1);
        const auto f = svd_truncate(m);
        const Eigen::MatrixXd rec = f.left * f.singular_values.asDiagonal() * f.right;
        CHECK((rec - m).norm() / m.norm() < 1e-10);
        CHECK(f.singular_values.squaredNorm() == doctest::Approx(m.squaredNorm()).epsilon(1e-10));
        // Oracle: eigenvalues of m^T m.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
        const Eigen::VectorXd ev = es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
        CHECK((ev - f.singular_values).cwiseAbs().maxCoeff() < 1e-10 * ev[0]);
        CHECK((f.left.transpose() * f.left - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-10);
        CHECK((f.right * f.right.transpose() - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-10);
    }
}

TEST_CASE("truncated reconstruction error equals the discarded weight") {
    std::mt19937_64 rng(12);
    const Eigen::MatrixXd m = random_tensor({10, 7}, rng).matrix(1);
    const auto f = svd_truncate(m, {4, 0.0});
    const Eigen::MatrixXd rec = f.left * f.singular_values.asDiagonal() * f.right;
    CHECK((rec - m).norm() == doctest::Approx(std::sqrt(f.discarded_weight)).epsilon(1e-10));
    CHECK(svd_truncate(m, {4, 0.0}).singular_values == f.singular_values);
}

TEST_CASE("svd_truncate recovers rank-deficient blocks exactly") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXd a = random_tensor({64, 5}, rng).matrix(1);
        const Eigen::MatrixXd b = random_tensor({5, 64}, rng).matrix(1);
        const Eigen::MatrixXd m = a * b;
        const auto f = svd_truncate(m);
        const Index k = f.singular_values.size();
        CHECK((f.left.transpose() * f.left - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((f.left * f.singular_values.asDiagonal() * f.right - m).norm() < 1e-10 * m.norm());
    }
}

TEST_CASE("tensor svd wrapper") {
    std::mt19937_64 rng(14);
    const auto t = random_tensor({6, 5}, rng);
    const auto r = svd_truncate(t, {3, 0.0});
    CHECK(r.left_isometry.dims() == std::vector<Index>{6, 3});
    CHECK(r.right_isometry.dims() == std::vector<Index>{3, 5});
    CHECK_THROWS_AS(svd_truncate(random_tensor({2, 2, 2}, rng)), DimensionError);
}

} // TEST_SUITE
