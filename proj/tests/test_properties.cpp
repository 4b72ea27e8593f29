#include <catch_amalgamated.hpp>

#include "property_suites.hpp"

using namespace speclab;

TEST_CASE("property suites") {
    for (const auto& suite : props::all_suites()) {
        INFO(suite.name << ": " << suite.failures << "/" << suite.cases << " failures, worst " << suite.worst);
        CHECK(suite.cases >= 100);
        CHECK(suite.failures == 0);
    }
}

TEST_CASE("property suites are deterministic") {
    const auto a = props::fold_equivariance(120, 9);
    const auto b = props::fold_equivariance(120, 9);
    CHECK(a.worst == b.worst);
    CHECK(a.failures == b.failures);
}
