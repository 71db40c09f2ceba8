#include <algorithm>

#include <catch2/catch_amalgamated.hpp>

#include "kepro/master.hpp"
#include "kepro/oracle.hpp"
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

    MasterState state(MasterState::Kind kind, Budget budget) const {
        return make_master_state(kind, g, catalog, units, x, 8, budget);
    }
};

bool covers(const CoveringConstraint& row, const Scenario& gamma) {
    int failed = 0;
    for (int v : row.vertices) failed += gamma.vertex_fail[v];
    for (int a : row.arcs) failed += gamma.arc_fail[a];
    return failed >= row.rhs;
}

int trace_count(const MasterState& state, const std::string& event) {
    int n = 0;
    for (const std::string& line : state.trace) {
        if (line.find("\"" + event + "\"") != std::string::npos) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("fresh master state carries the first-stage row") {
    const Fixture f;
    const MasterState state = f.state(MasterState::Kind::MS, {1, 1});
    CHECK(state.kind == MasterState::Kind::MS);
    CHECK(state.z_tilde_p == 8);
    CHECK(state.z_bar_q == 8);
    REQUIRE(state.constraints.size() == 1);

    const CoveringConstraint& row = state.constraints[0];
    CHECK(row.origin == ConstraintOrigin::FirstStage);
    CHECK(row.rhs == 1);
    CHECK(row.unit_count() == 3);
    CHECK(row.vertices.size() == 8);  // x covers eight pairs
    CHECK(row.arcs.size() == 8);     // two 3-cycles and one 2-cycle
    CHECK(row.sorted_weights == std::vector<long long>{3, 3, 2});
    CHECK(row.weight_sum == 8);
    CHECK(std::is_sorted(row.vertices.begin(), row.vertices.end()));

    REQUIRE(state.ssf_rows.size() == 1);
    CHECK(state.ssf_rows[0].unit_ids == f.x.unit_ids);
    CHECK(state.gamma_hat.empty());
    CHECK(trace_count(state, "state_created") == 1);
    CHECK(master_kind_name(MasterState::Kind::MS) == "MS");
    CHECK(master_kind_name(MasterState::Kind::MT) == "MT");
}

TEST_CASE("rhs strengthening tightens against the current bound") {
    CoveringConstraint row;
    row.unit_ids = {0, 1, 2};
    row.sorted_weights = {3, 3, 2};
    row.weight_sum = 8;

    CHECK(strengthen_rhs(row, 8) == 1);  // any unit loss drops below 8
    CHECK(strengthen_rhs(row, 6) == 1);
    CHECK(strengthen_rhs(row, 5) == 2);  // 8-3 = 5 is not yet below 5
    CHECK(strengthen_rhs(row, 3) == 2);
    CHECK(strengthen_rhs(row, 1) == 3);
    CHECK(strengthen_rhs(row, 0) == 4);  // sentinel: cannot drop below zero
}

TEST_CASE("solution rows start at one and expanded rows start strengthened") {
    const Fixture f;
    MasterState state = f.state(MasterState::Kind::MT, {1, 1});
    update_bound(state, 2);

    const Scenario gamma = scenario_of(f.g, {9}, {});
    const std::vector<int> plain = {unit_with_vertices(f.g, f.catalog, {1, 5, 6}),
                                    unit_with_vertices(f.g, f.catalog, {3, 4})};
    const int plain_idx = add_solution_constraint(
        state, plain, ConstraintOrigin::SecondStageSolution, gamma);
    CHECK(state.constraints[plain_idx].rhs == 1);

    const int expanded_idx = add_solution_constraint(
        state, plain, ConstraintOrigin::ExpandedSolution, gamma);
    // weights {3,2}, sum 5: needs two losses to drop below 2.
    CHECK(state.constraints[expanded_idx].rhs == 2);
    CHECK(expanded_idx != plain_idx);

    // Same origin, elements and weights dedupes to the stored row.
    const int again = add_solution_constraint(
        state, plain, ConstraintOrigin::SecondStageSolution, gamma);
    CHECK(again == plain_idx);
    CHECK(state.constraints.size() == 3);
}

TEST_CASE("bound updates restrengthen every stored row") {
    const Fixture f;
    MasterState state = f.state(MasterState::Kind::MS, {2, 2});
    CHECK(state.constraints[0].rhs == 1);

    update_bound(state, 9);  // not smaller: no-op
    CHECK(state.z_bar_q == 8);

    update_bound(state, 3);
    CHECK(state.z_bar_q == 3);
    CHECK(trace_count(state, "z_bar_updated") == 1);
    restrengthen_all(state);
    CHECK(state.constraints[0].rhs == 2);
    CHECK(trace_count(state, "rhs_updated") >= 1);
}

TEST_CASE("scenario search covers every stored row within budget") {
    const Fixture f;
    MasterState state = f.state(MasterState::Kind::MS, {1, 1});

    const FindScenarioResult first = find_scenario(state);
    REQUIRE(first.feasible);
    CHECK(first.scenario.within(Budget{1, 1}));
    CHECK_FALSE(first.scenario.is_empty());
    for (const CoveringConstraint& row : state.constraints) {
        CHECK(covers(row, first.scenario));
    }

    // Accepting the point and re-solving produces a fresh scenario.
    accept_scenario(state, first.scenario);
    CHECK(state.gamma_hat.size() == 1);
    const FindScenarioResult second = find_scenario(state);
    REQUIRE(second.feasible);
    CHECK_FALSE(second.scenario == first.scenario);
    for (const CoveringConstraint& row : state.constraints) {
        CHECK(covers(row, second.scenario));
    }
}

TEST_CASE("sentinel rows make the master infeasible") {
    const Fixture f;
    MasterState state = f.state(MasterState::Kind::MS, {1, 1});
    update_bound(state, 0);  // nothing a (1,1) attack can reach
    restrengthen_all(state);
    CHECK(state.constraints[0].rhs == 4);
    const FindScenarioResult out = find_scenario(state);
    CHECK_FALSE(out.feasible);
    CHECK_FALSE(out.hit_time_limit);
}

TEST_CASE("determinism: identical sequences leave identical traces") {
    const Fixture f;
    auto run = [&] {
        MasterState state = f.state(MasterState::Kind::MT, {1, 1});
        const FindScenarioResult a = find_scenario(state);
        REQUIRE(a.feasible);
        accept_scenario(state, a.scenario);
        update_bound(state, 5);
        restrengthen_all(state);
        const FindScenarioResult b = find_scenario(state);
        REQUIRE(b.feasible);
        return state.trace;
    };
    CHECK(run() == run());
}

TEST_CASE("dominance cuts are recorded and applied") {
    const Fixture f;
    MasterState state = f.state(MasterState::Kind::MS, {1, 0});
    const Scenario dominated = scenario_of(f.g, {}, {{5, 6}});
    const Scenario dominating = scenario_of(f.g, {6}, {});
    REQUIRE(dominates(f.catalog, f.units, dominating, dominated));
    install_dominance_cuts(state, {{dominated, dominating}});
    CHECK(state.dominance_pairs.size() == 1);
    CHECK(trace_count(state, "dominance_cut_added") == 1);
}

TEST_CASE("ssf rows accumulate and the ssf model lower-bounds the stage") {
    const Fixture f;
    MasterState state = f.state(MasterState::Kind::MT, {1, 1});

    const SsfResult first = solve_ssf(state, f.transitory);
    REQUIRE(first.feasible);
    CHECK_FALSE(first.hit_time_limit);
    // With only the first-stage row stored, the bound is the worst (1,1)
    // attack on x itself: one heavy cycle by vertex, one by arc.
    CHECK(first.z_lower == 2);
    CHECK(first.scenario.within(Budget{1, 1}));

    // The true second stage can only be weakly better than the row bound.
    const SecondStageOracle oracle =
        oracle_second_stage(f.g, f.catalog, f.x, Policy::FullRecourse, {1, 1});
    CHECK(first.z_lower <= oracle.value);

    add_ssf_row(state, {unit_with_vertices(f.g, f.catalog, {3, 4})}, 2);
    CHECK(state.ssf_rows.size() == 2);
    CHECK(state.ssf_rows[1].base == 2);
    CHECK(trace_count(state, "ssf_row_added") == 1);
    const SsfResult second = solve_ssf(state, f.transitory);
    REQUIRE(second.feasible);
    CHECK(second.z_lower >= first.z_lower);
}

TEST_CASE("origin names render for the trace") {
    CHECK(origin_name(ConstraintOrigin::FirstStage) == "first_stage");
    CHECK(origin_name(ConstraintOrigin::SecondStageSolution) == "second_stage");
    CHECK(origin_name(ConstraintOrigin::ExpandedSolution) == "expanded");
}
