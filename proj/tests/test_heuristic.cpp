#include <catch2/catch_amalgamated.hpp>

#include "kepro/heuristic.hpp"
#include "test_support.hpp"

using namespace kepro;
using kepro::test::fig1;
using kepro::test::fig1_x_tilde;
using kepro::test::scenario_of;
using kepro::test::unit_with_vertices;

namespace {

struct Fixture {
    CompatibilityGraph g = fig1();
    UnitCatalog catalog = build_catalog(g, 3, 3);
    Matching x = fig1_x_tilde(g, catalog);
    PolicyUnitSets units = policy_units(g, catalog, x, Policy::FullRecourse);
    TransitoryGraph transitory =
        build_transitory(g, catalog, x, Policy::FullRecourse);

    MasterState state(Budget budget) const {
        return make_master_state(MasterState::Kind::MS, g, catalog, units, x, 8,
                                 budget);
    }
};

bool meets(const CoveringConstraint& row, const Scenario& gamma) {
    int failed = 0;
    for (int v : row.vertices) failed += gamma.vertex_fail[v];
    for (int a : row.arcs) failed += gamma.arc_fail[a];
    return failed >= row.rhs;
}

}  // namespace

TEST_CASE("element pools weight elements by row occurrences") {
    const Fixture f;
    MasterState state = f.state({1, 1});
    const ElementPool single = build_element_pool(state.constraints);
    // Eight vertices and eight arcs, each in exactly one row.
    CHECK(single.elements.size() == 16);
    for (const PoolElement& e : single.elements) {
        CHECK(e.weight == 1);
        CHECK_FALSE(e.checked);
    }

    // A second row sharing (3,4) doubles the weight of its elements.
    add_solution_constraint(state,
                            {unit_with_vertices(f.g, f.catalog, {3, 4}),
                             unit_with_vertices(f.g, f.catalog, {1, 5, 7})},
                            ConstraintOrigin::SecondStageSolution,
                            scenario_of(f.g, {9}, {}));
    const ElementPool merged = build_element_pool(state.constraints);
    int doubled = 0;
    int singles = 0;
    for (const PoolElement& e : merged.elements) {
        if (e.weight == 2) ++doubled;
        if (e.weight == 1) ++singles;
    }
    // Shared with the first row: vertices 1,3,4,5 and arcs (3,4),(4,3),(1,5).
    // Fresh from the second row: vertex 7 and arcs (5,7),(7,1).
    CHECK(doubled == 7);
    CHECK(singles == static_cast<int>(merged.elements.size()) - 7);
    CHECK(merged.elements.size() == 19);
}

TEST_CASE("heuristic scenarios respect the budget and report covers honestly") {
    const Fixture f;
    const MasterState state = f.state({1, 1});
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 3ULL, 17ULL}) {
        const HeuristicOutcome out = run_heuristic(f.g, f.catalog, state.constraints,
                                                   {1, 1}, f.transitory, seed);
        INFO("seed " << seed);
        CHECK(out.scenario.within(Budget{1, 1}));
        CHECK(out.dominated_rejections >= 0);
        if (out.cover) {
            for (const CoveringConstraint& row : state.constraints) {
                CHECK(meets(row, out.scenario));
            }
        }
    }
}

TEST_CASE("heuristic is deterministic per seed") {
    const Fixture f;
    const MasterState state = f.state({1, 1});
    const HeuristicOutcome a =
        run_heuristic(f.g, f.catalog, state.constraints, {1, 1}, f.transitory, 42);
    const HeuristicOutcome b =
        run_heuristic(f.g, f.catalog, state.constraints, {1, 1}, f.transitory, 42);
    CHECK(a.scenario == b.scenario);
    CHECK(a.cover == b.cover);
    CHECK(a.dominated_rejections == b.dominated_rejections);
}

TEST_CASE("a single-row master is covered by one failed element") {
    const Fixture f;
    const MasterState state = f.state({1, 0});
    const HeuristicOutcome out =
        run_heuristic(f.g, f.catalog, state.constraints, {1, 0}, f.transitory, 5);
    // One vertex failure suffices against an rhs-1 row over x's elements.
    CHECK(out.cover);
    CHECK(out.scenario.vertex_count() == 1);
    CHECK(out.scenario.arc_count() == 0);
}

TEST_CASE("zero budgets can never cover a positive rhs") {
    const Fixture f;
    const MasterState state = f.state({0, 0});
    const HeuristicOutcome out =
        run_heuristic(f.g, f.catalog, state.constraints, {0, 0}, f.transitory, 1);
    CHECK_FALSE(out.cover);
    CHECK(out.scenario.is_empty());
}

TEST_CASE("strengthened rows need matching multiplicity") {
    const Fixture f;
    MasterState state = f.state({2, 2});
    update_bound(state, 3);
    restrengthen_all(state);
    REQUIRE(state.constraints[0].rhs == 2);
    const HeuristicOutcome out =
        run_heuristic(f.g, f.catalog, state.constraints, {2, 2}, f.transitory, 9);
    if (out.cover) {
        CHECK(out.scenario.total_count() >= 2);
        CHECK(meets(state.constraints[0], out.scenario));
    }
}
