#include <doctest.h>

#include "tdsmps/errors.hpp"
#include "tdsmps/suites.hpp"

using namespace tdsmps;
using namespace tdsmps::suites;

TEST_SUITE("suites") {

TEST_CASE("trotter suite passes with the shipped plans") {
    const auto r = trotter();
    for (const auto& c : r.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
    const auto o4 = trotter_order(4, {0.2, 0.1, 0.05, 0.025});
    CHECK(o4.slope == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("a corrupted gate coefficient fails the trotter suite") {
    SuiteOptions options;
    options.plan_factory = [](int order, double dtau) {
        auto plan = build_trotter_plan(order, dtau);
        plan.layers[1].coefficient *= 1.02;
        return plan;
    };
    const auto r = trotter(options);
    CHECK_FALSE(r.passed());
}

TEST_CASE("inequality suites hold across seeds") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SuiteOptions options;
        options.seed = seed * 7919;
        for (const auto& r : {bounds(options), majorization(options), norms(options)}) {
            for (const auto& c : r.checks) {
                INFO("seed " << options.seed << " " << r.suite << " " << c.name << ": " << c.detail);
                CHECK(c.passed);
            }
        }
    }
}

TEST_CASE("property counters") {
    CHECK(check_distance_bound(20, 3).violations == 0);
    CHECK(check_entropy_lower_bound(200, 3).trials == 200);
    CHECK(check_majorizing_distribution(50, 3).violations == 0);
    CHECK(check_optimal_alpha(10, 1000, 3).violations == 0);
    CHECK(check_purification_distance(50, 3).violations == 0);
    CHECK(check_trace_norm_inequalities(50, 3).trials == 150);
}

TEST_CASE("suite selection") {
    CHECK(run_suites("norms").size() == 1);
    CHECK_THROWS_AS(run_suites("nonsense"), ParameterError);
    CHECK(suite_names().size() == 5);
}

} // TEST_SUITE
