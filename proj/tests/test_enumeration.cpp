#include <algorithm>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "kepro/enumeration.hpp"
#include "test_support.hpp"

using namespace kepro;
using kepro::test::fig1;
using kepro::test::matching_of;
using kepro::test::scenario_of;
using kepro::test::unit_with_vertices;

TEST_CASE("cycle enumeration finds canonical rotations") {
    const CompatibilityGraph g = fig1();
    const std::vector<ExchangeUnit> cycles = enumerate_cycles(g, 3);
    // Hand count on the example: (3,4), (1,5,6), (2,9,10), (1,5,7), (2,3,4),
    // (3,6,4).
    REQUIRE(cycles.size() == 6);
    for (const ExchangeUnit& c : cycles) {
        CHECK(c.kind == ExchangeUnit::Kind::Cycle);
        CHECK(c.vertices.size() >= 2);
        CHECK(c.vertices.size() <= 3);
        CHECK(c.arcs.size() == c.vertices.size());
        // Canonical rotation starts at the smallest vertex index.
        CHECK(*std::min_element(c.vertices.begin(), c.vertices.end()) ==
              c.vertices.front());
        // Arcs trace the vertex order and close the loop.
        for (size_t i = 0; i < c.vertices.size(); ++i) {
            const ArcRecord& a = g.arcs[c.arcs[i]];
            CHECK(a.from == c.vertices[i]);
            CHECK(a.to == c.vertices[(i + 1) % c.vertices.size()]);
        }
    }
    const std::vector<ExchangeUnit> k2 = enumerate_cycles(g, 2);
    REQUIRE(k2.size() == 1);  // (3,4) is the only two-cycle
    CHECK(enumerate_cycles(g, 1).empty());
    CHECK(enumerate_cycles(g, 4).size() > cycles.size());
}

TEST_CASE("chain enumeration emits every prefix as a unit") {
    const CompatibilityGraph g = fig1();
    const std::vector<ExchangeUnit> chains = enumerate_chains(g, 3);
    // Donor 8 reaches only 1, then 5, then {6,7}: (8,1), (8,1,5), (8,1,5,6),
    // (8,1,5,7).
    REQUIRE(chains.size() == 4);
    std::set<std::vector<int>> seen;
    for (const ExchangeUnit& c : chains) {
        CHECK(c.kind == ExchangeUnit::Kind::Chain);
        CHECK(g.is_ndd(c.vertices.front()));
        CHECK(c.arcs.size() == c.vertices.size() - 1);
        CHECK(c.arcs.size() >= 1);
        CHECK(c.arcs.size() <= 3);
        for (size_t i = 0; i + 1 < c.vertices.size(); ++i) {
            const ArcRecord& a = g.arcs[c.arcs[i]];
            CHECK(a.from == c.vertices[i]);
            CHECK(a.to == c.vertices[i + 1]);
        }
        seen.insert(c.vertices);
        // Every longer chain's one-arc-shorter prefix is also a unit.
        if (c.vertices.size() > 2) {
            std::vector<int> prefix(c.vertices.begin(), c.vertices.end() - 1);
            CHECK(seen.count(prefix) == 1);
        }
    }
    CHECK(enumerate_chains(g, 1).size() == 1);
}

TEST_CASE("catalogs put cycles first with dense ids") {
    const CompatibilityGraph g = fig1();
    const UnitCatalog catalog = build_catalog(g, 3, 3);
    REQUIRE(catalog.size() == 10);
    CHECK(catalog.num_cycles == 6);
    for (int i = 0; i < catalog.size(); ++i) {
        CHECK(catalog[i].id == i);
        CHECK((catalog[i].kind == ExchangeUnit::Kind::Cycle) == (i < 6));
    }
}

TEST_CASE("matchings expose their element sets") {
    const CompatibilityGraph g = fig1();
    const UnitCatalog catalog = build_catalog(g, 3, 3);
    const Matching x = kepro::test::fig1_x_tilde(g, catalog);
    CHECK(is_vertex_disjoint(catalog, x));

    const ElementSet elements = matching_elements(g, catalog, x);
    int covered = 0;
    for (int v = 0; v < g.num_vertices(); ++v) covered += elements.vertex_in[v];
    CHECK(covered == 8);
    CHECK_FALSE(elements.vertex_in[g.vertex_index(7)]);
    CHECK_FALSE(elements.vertex_in[g.vertex_index(8)]);
    CHECK(elements.arc_in[g.arc_index(g.vertex_index(1), g.vertex_index(5))]);
    CHECK_FALSE(elements.arc_in[g.arc_index(g.vertex_index(5), g.vertex_index(7))]);

    Matching overlapping = x;
    overlapping.unit_ids.push_back(unit_with_vertices(g, catalog, {1, 5, 7}));
    CHECK_FALSE(is_vertex_disjoint(catalog, overlapping));
}

TEST_CASE("policy names round trip") {
    CHECK(policy_name(Policy::FullRecourse) == "full");
    CHECK(policy_name(Policy::FirstStageOnly) == "first-stage-only");
    CHECK(policy_from_name("full") == Policy::FullRecourse);
    CHECK(policy_from_name("first-stage-only") == Policy::FirstStageOnly);
    CHECK_THROWS_AS(policy_from_name("nope"), Error);
}

TEST_CASE("full recourse units carry overlap weights") {
    const CompatibilityGraph g = fig1();
    const UnitCatalog catalog = build_catalog(g, 3, 3);
    const Matching x = kepro::test::fig1_x_tilde(g, catalog);
    const PolicyUnitSets sets = policy_units(g, catalog, x, Policy::FullRecourse);

    CHECK(sets.policy == Policy::FullRecourse);
    // Weight = first-stage pairs the unit covers.
    CHECK(sets.weight[unit_with_vertices(g, catalog, {1, 5, 6})] == 3);
    CHECK(sets.weight[unit_with_vertices(g, catalog, {1, 5, 7})] == 2);
    CHECK(sets.weight[unit_with_vertices(g, catalog, {8, 1, 5, 6})] == 3);
    CHECK(sets.weight[unit_with_vertices(g, catalog, {8, 1})] == 1);
    // Every unit overlaps x here, so all ten participate.
    CHECK(sets.all_units().size() == 10);
    CHECK(sets.cycles.size() == 6);
    CHECK(sets.chains.size() == 4);
    for (int id : sets.all_units()) CHECK(sets.contains(id));
}

TEST_CASE("first-stage-only restricts recourse to the selected vertices") {
    const CompatibilityGraph g = fig1();
    const UnitCatalog catalog = build_catalog(g, 3, 3);
    const Matching x = kepro::test::fig1_x_tilde(g, catalog);
    const PolicyUnitSets sets = policy_units(g, catalog, x, Policy::FirstStageOnly);

    // Every unit drawn inside V(x) stays available, the original three plus
    // the two re-arrangement cycles through vertex set {2,3,4,6}.
    const std::vector<int> all = sets.all_units();
    const std::set<int> expected = {
        unit_with_vertices(g, catalog, {1, 5, 6}),
        unit_with_vertices(g, catalog, {2, 9, 10}),
        unit_with_vertices(g, catalog, {3, 4}),
        unit_with_vertices(g, catalog, {2, 3, 4}),
        unit_with_vertices(g, catalog, {3, 6, 4}),
    };
    CHECK(std::set<int>(all.begin(), all.end()) == expected);
    CHECK(sets.chains.empty());  // donor 8 is outside the first stage
    CHECK(sets.weight[unit_with_vertices(g, catalog, {3, 4})] == 2);
    CHECK(sets.weight[unit_with_vertices(g, catalog, {2, 3, 4})] == 3);
    CHECK(sets.weight[unit_with_vertices(g, catalog, {3, 6, 4})] == 3);
    // Vertex 7 was never selected, so its cycle is out.
    CHECK_FALSE(sets.contains(unit_with_vertices(g, catalog, {1, 5, 7})));
}

TEST_CASE("surviving units and failure impact track scenarios") {
    const CompatibilityGraph g = fig1();
    const UnitCatalog catalog = build_catalog(g, 3, 3);
    const Matching x = kepro::test::fig1_x_tilde(g, catalog);
    const PolicyUnitSets sets = policy_units(g, catalog, x, Policy::FullRecourse);

    const Scenario gamma = scenario_of(g, {6}, {});
    const std::vector<int> survivors = second_stage_units(catalog, sets, gamma);
    for (int id : survivors) {
        const ExchangeUnit& unit = catalog[id];
        CHECK(std::find(unit.vertices.begin(), unit.vertices.end(),
                        g.vertex_index(6)) == unit.vertices.end());
    }
    // Failing vertex 6 kills (1,5,6), (3,6,4), (8,1,5,6); arc failures kill
    // exactly the units carrying the arc.
    const FailureImpact impact = failure_impact(catalog, sets, gamma);
    CHECK(impact.failed_units.size() == 3);
    CHECK(static_cast<int>(survivors.size()) + 3 == catalog.size());

    const Scenario arc_only = scenario_of(g, {}, {{5, 6}});
    const FailureImpact arc_impact = failure_impact(catalog, sets, arc_only);
    CHECK(arc_impact.failed_units.size() == 2);  // (1,5,6) and (8,1,5,6)
}

TEST_CASE("dominance holds when one scenario's damage contains another's") {
    const CompatibilityGraph g = fig1();
    const UnitCatalog catalog = build_catalog(g, 3, 3);
    const Matching x = kepro::test::fig1_x_tilde(g, catalog);
    const PolicyUnitSets sets = policy_units(g, catalog, x, Policy::FullRecourse);

    const Scenario arc = scenario_of(g, {}, {{5, 6}});
    const Scenario vertex = scenario_of(g, {6}, {});
    // Failing vertex 6 breaks a superset of what failing arc (5,6) breaks.
    CHECK(dominates(catalog, sets, vertex, arc));
    CHECK_FALSE(dominates(catalog, sets, arc, vertex));
}
