#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "kepro/common.hpp"
#include "kepro/enumeration.hpp"
#include "kepro/instance.hpp"
#include "kepro/scenario.hpp"

namespace kepro::test {

// Catch matcher for the library error taxonomy, e.g.
// CHECK_THROWS_MATCHES(call(), Error, ErrorKindIs(ErrorKind::Validation)).
class ErrorKindIs : public Catch::Matchers::MatcherBase<Error> {
public:
    explicit ErrorKindIs(ErrorKind kind) : kind_(kind) {}
    bool match(const Error& e) const override { return e.kind() == kind_; }
    std::string describe() const override {
        return "has error kind " + std::to_string(static_cast<int>(kind_));
    }

private:
    ErrorKind kind_;
};

// The worked ten-vertex example used throughout the suite: pairs 1..7, 9, 10,
// one non-directed donor 8, fifteen arcs.
CompatibilityGraph fig1();

// Catalog id of the unit whose vertex set equals the given external ids
// (order-insensitive); fails the test when absent.
int unit_with_vertices(const CompatibilityGraph& g, const UnitCatalog& catalog,
                       std::vector<long long> external_ids);

Matching matching_of(const CompatibilityGraph& g, const UnitCatalog& catalog,
                     std::initializer_list<std::vector<long long>> unit_vertex_sets);

Scenario scenario_of(const CompatibilityGraph& g, std::vector<long long> vertex_ids,
                     std::vector<std::pair<long long, long long>> arc_ids);

// The canonical first-stage matching on fig1 for K = 3, L = 3:
// cycles (1,5,6), (2,9,10) and (3,4), eight transplants.
Matching fig1_x_tilde(const CompatibilityGraph& g, const UnitCatalog& catalog);

// Deterministic random instance for property tests (same sampling as the
// CLI generator).
CompatibilityGraph random_graph(int pairs, int ndds, double density,
                                std::uint64_t seed);

}  // namespace kepro::test
