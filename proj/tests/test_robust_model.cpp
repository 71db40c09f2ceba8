#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "kepro/instance.hpp"
#include "kepro/oracle.hpp"
#include "kepro/robust_model.hpp"
#include "test_support.hpp"

using namespace kepro;
using kepro::test::fig1;
using kepro::test::random_graph;
using kepro::test::scenario_of;
using kepro::test::unit_with_vertices;

namespace {

const std::vector<SecondStageAlgorithm> kAllAlgorithms = {
    SecondStageAlgorithm::BasicCovering, SecondStageAlgorithm::FBSA_MB,
    SecondStageAlgorithm::FBSA_ME,       SecondStageAlgorithm::HSA_MB,
    SecondStageAlgorithm::HSA_ME,
};

std::vector<int> positions_of(const CompatibilityGraph& g, const PositionIndex& index,
                              long long from, long long to) {
    int arc = g.arc_index(g.vertex_index(from), g.vertex_index(to));
    REQUIRE(arc >= 0);
    return index.arc_positions[arc];
}

RobustConfig config_for(SecondStageAlgorithm algorithm, std::uint64_t seed = 0) {
    RobustConfig config;
    config.second_stage.algorithm = algorithm;
    config.second_stage.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("chain positions follow donor reachability") {
    CompatibilityGraph g = fig1();
    PositionIndex index = compute_position_index(g, 4);
    CHECK(index.L == 4);
    CHECK(positions_of(g, index, 8, 1) == std::vector<int>{1});
    CHECK(positions_of(g, index, 1, 5) == std::vector<int>{2});
    CHECK(positions_of(g, index, 5, 6) == std::vector<int>{3});
    CHECK(positions_of(g, index, 5, 7) == std::vector<int>{3});
    // Vertex 2 is not reachable from the donor within three hops, so (2,9)
    // can hold no chain position at all.
    CHECK(positions_of(g, index, 2, 9) == std::vector<int>{});

    // position_arcs is the exact transpose of arc_positions.
    for (int p = 1; p <= index.L; ++p) {
        for (int arc : index.position_arcs[p - 1]) {
            const auto& ps = index.arc_positions[arc];
            CHECK(std::find(ps.begin(), ps.end(), p) != ps.end());
        }
    }
    long long direct = 0;
    for (const auto& ps : index.arc_positions) direct += static_cast<long long>(ps.size());
    long long transposed = 0;
    for (const auto& arcs : index.position_arcs)
        transposed += static_cast<long long>(arcs.size());
    CHECK(direct == transposed);
}

TEST_CASE("a longer cap only extends feasible positions") {
    CompatibilityGraph g = fig1();
    PositionIndex small = compute_position_index(g, 2);
    PositionIndex large = compute_position_index(g, 4);
    for (int arc = 0; arc < g.num_arcs(); ++arc) {
        for (int p : small.arc_positions[arc]) {
            const auto& ps = large.arc_positions[arc];
            CHECK(std::find(ps.begin(), ps.end(), p) != ps.end());
        }
    }
}

TEST_CASE("the deterministic model maximizes transplants") {
    CompatibilityGraph g = fig1();
    UnitCatalog catalog = build_catalog(g, 4, 4);
    PositionIndex positions = compute_position_index(g, 4);
    RobustPicefModel det = build_fsf(g, catalog, positions, Policy::FullRecourse, {});
    CHECK(det.z_bits == 0);
    CHECK(det.z_bit_var.empty());
    SolveOutcome outcome = solve(det.program);
    REQUIRE(outcome.status == SolveStatus::Optimal);
    CHECK(outcome.objective_value == 9);

    // An explicit empty scenario is the same optimization problem, just
    // written through the bound bits.
    std::vector<Scenario> empty_block = {Scenario::empty_for(g)};
    RobustPicefModel robust =
        build_fsf(g, catalog, positions, Policy::FullRecourse, empty_block);
    CHECK(robust.z_bits >= 1);
    SolveOutcome robust_outcome = solve(robust.program);
    REQUIRE(robust_outcome.status == SolveStatus::Optimal);
    CHECK(robust_outcome.objective_value == 9);

    DecodedFirstStage decoded =
        decode_fsf_matching(det, g, catalog, positions, outcome.assignment);
    CHECK(decoded.orphan_arcs == 0);
    long long pairs_covered = 0;
    for (int id : decoded.matching.unit_ids) {
        for (int v : catalog[id].vertices)
            if (g.is_pair(v)) ++pairs_covered;
    }
    CHECK(pairs_covered == 9);
}

TEST_CASE("a forced first stage under one scenario prices its best recourse") {
    CompatibilityGraph g = fig1();
    UnitCatalog catalog = build_catalog(g, 3, 3);
    PositionIndex positions = compute_position_index(g, 3);
    Scenario gamma = scenario_of(g, {2}, {{5, 6}});
    RobustPicefModel model =
        build_fsf(g, catalog, positions, Policy::FullRecourse, {gamma});

    // Freeze x to the canonical matching: its three cycles at one, every
    // other cycle and every chain slot at zero.
    std::set<int> chosen = {
        unit_with_vertices(g, catalog, {1, 5, 6}),
        unit_with_vertices(g, catalog, {2, 9, 10}),
        unit_with_vertices(g, catalog, {3, 4}),
    };
    BinaryProgram program = model.program;
    for (int id = 0; id < static_cast<int>(catalog.size()); ++id) {
        int var = model.cycle_var[id];
        if (var < 0) continue;
        SparseRow row;
        row.terms = {{var, 1}};
        row.sense = SparseRow::Sense::Eq;
        row.rhs = chosen.count(id) ? 1 : 0;
        program.add_row(row);
    }
    for (const auto& slots : model.delta_var) {
        for (int var : slots) {
            SparseRow row;
            row.terms = {{var, 1}};
            row.sense = SparseRow::Sense::Eq;
            row.rhs = 0;
            program.add_row(row);
        }
    }
    SolveOutcome outcome = solve(program);
    REQUIRE(outcome.status == SolveStatus::Optimal);
    // Under {v2, a(5,6)} the best repair keeps (3,6,4) and re-anchors 1 and 5
    // on the donor chain: 3 + 2 pairs of the original eight.
    CHECK(outcome.objective_value == 5);

    Matching x{std::vector<int>(chosen.begin(), chosen.end())};
    PolicyUnitSets units = policy_units(g, catalog, x, Policy::FullRecourse);
    CHECK(oracle_recourse(g, catalog, units, gamma) == 5);
}

TEST_CASE("chain decoding follows the selected positions donor by donor") {
    // 20 is a donor with the only path 20 -> 21 -> 22; L = 2 admits one arc.
    std::istringstream in(R"({
        "vertices": [
            {"id": 20, "kind": "ndd"},
            {"id": 21}, {"id": 22}
        ],
        "arcs": [[20, 21], [21, 22]]
    })");
    CompatibilityGraph g = parse_instance(in, InstanceFormat::Json);
    UnitCatalog catalog = build_catalog(g, 3, 2);
    PositionIndex positions = compute_position_index(g, 2);
    RobustPicefModel det = build_fsf(g, catalog, positions, Policy::FullRecourse, {});
    SolveOutcome outcome = solve(det.program);
    REQUIRE(outcome.status == SolveStatus::Optimal);
    CHECK(outcome.objective_value == 2);
    DecodedFirstStage decoded =
        decode_fsf_matching(det, g, catalog, positions, outcome.assignment);
    CHECK(decoded.orphan_arcs == 0);
    REQUIRE(decoded.matching.unit_ids.size() == 1);
    const ExchangeUnit& unit = catalog[decoded.matching.unit_ids[0]];
    CHECK(unit.kind == ExchangeUnit::Kind::Chain);
    CHECK(unit.vertices.size() == 3);
}

TEST_CASE("the full solve converges to the robust oracle on the worked example") {
    CompatibilityGraph g = fig1();
    Budget budget{1, 1};
    RobustOracle reference = oracle_robust(g, 4, 4, Policy::FullRecourse, budget);
    REQUIRE(reference.value == 3);
    for (SecondStageAlgorithm algorithm : kAllAlgorithms) {
        INFO("algorithm=" << algorithm_name(algorithm));
        RobustRun run = solve_robust(g, 4, 4, Policy::FullRecourse, budget,
                                     config_for(algorithm, 7));
        CHECK(run.optimal);
        CHECK_FALSE(run.hit_time_limit);
        CHECK(run.z_p_star == 3);
        CHECK(run.first_stage_iters() >= 2);
        CHECK(run.scenarios.size() == run.iterations.size() - 1);
        CHECK(run.log.size() == run.iterations.size() + 2);

        // The first-stage bound shrinks monotonically and meets the final
        // second-stage value exactly at convergence.
        long long previous = run.iterations.front().z_tilde_p;
        for (const RobustIteration& it : run.iterations) {
            CHECK(it.z_tilde_p <= previous);
            previous = it.z_tilde_p;
        }
        const RobustIteration& last = run.iterations.back();
        CHECK(last.z_tilde_p == run.z_p_star);
        CHECK(last.second_stage.z_q_star == run.z_p_star);

        // Every accepted scenario respects the budget; summed statistics
        // respect the acceptance identity.
        for (const Scenario& gamma : run.scenarios) CHECK(gamma.within(budget));
        SecondStageStats total = sum_stats(run);
        CHECK(total.scenarios_accepted >= static_cast<int>(run.scenarios.size()));
        CHECK(total.scenarios_accepted == total.heuristic_true + total.master_mip +
                                              total.ssf_scenarios + total.initial_overrides);
    }

    // Frozen trajectory for one configuration: four first-stage solves over
    // an accumulating pool of three scenarios.
    RobustRun pinned = solve_robust(g, 4, 4, Policy::FullRecourse, budget,
                                    config_for(SecondStageAlgorithm::HSA_ME, 7));
    CHECK(pinned.first_stage_iters() == 4);
    CHECK(pinned.scenarios.size() == 3);
}

TEST_CASE("a zero budget collapses to the deterministic solve") {
    CompatibilityGraph g = fig1();
    RobustRun run = solve_robust(g, 4, 4, Policy::FullRecourse, Budget{0, 0},
                                 config_for(SecondStageAlgorithm::HSA_ME));
    CHECK(run.optimal);
    CHECK(run.z_p_star == 9);
    CHECK(run.first_stage_iters() == 1);
    CHECK(run.scenarios.empty());
}

TEST_CASE("the first-stage-only policy converges to its own oracle") {
    CompatibilityGraph g = fig1();
    Budget budget{1, 1};
    RobustOracle reference = oracle_robust(g, 4, 4, Policy::FirstStageOnly, budget);
    RobustRun run = solve_robust(g, 4, 4, Policy::FirstStageOnly, budget,
                                 config_for(SecondStageAlgorithm::FBSA_ME));
    CHECK(run.optimal);
    CHECK(run.z_p_star == reference.value);
    CHECK(run.z_p_star == 3);
}

TEST_CASE("runs are reproducible line for line") {
    CompatibilityGraph g = fig1();
    RobustConfig config = config_for(SecondStageAlgorithm::HSA_ME, 11);
    RobustRun first = solve_robust(g, 3, 3, Policy::FullRecourse, Budget{1, 1}, config);
    RobustRun second = solve_robust(g, 3, 3, Policy::FullRecourse, Budget{1, 1}, config);
    CHECK(first.log == second.log);
    CHECK(first.z_p_star == second.z_p_star);
    CHECK(first.x_star.unit_ids == second.x_star.unit_ids);
    REQUIRE(first.iterations.size() == second.iterations.size());
    for (std::size_t i = 0; i < first.iterations.size(); ++i)
        CHECK(first.iterations[i].second_stage.trace == second.iterations[i].second_stage.trace);
    REQUIRE_FALSE(first.log.empty());
    CHECK(first.log.front().find("robust_started") != std::string::npos);
    CHECK(first.log.back().find("robust_finished") != std::string::npos);
}

TEST_CASE("the full solve matches the oracle on random instances") {
    for (std::uint64_t seed : {4u, 9u}) {
        CompatibilityGraph g = random_graph(6, 1, 0.35, seed);
        Budget budget{1, 0};
        RobustOracle reference = oracle_robust(g, 3, 2, Policy::FullRecourse, budget);
        for (SecondStageAlgorithm algorithm :
             {SecondStageAlgorithm::HSA_ME, SecondStageAlgorithm::BasicCovering}) {
            INFO("seed=" << seed << " algorithm=" << algorithm_name(algorithm));
            RobustRun run = solve_robust(g, 3, 2, Policy::FullRecourse, budget,
                                         config_for(algorithm, seed));
            CHECK(run.optimal);
            CHECK(run.z_p_star == reference.value);
            // The returned first stage really achieves the claimed value.
            UnitCatalog catalog = build_catalog(g, 3, 2);
            SecondStageOracle certify = oracle_second_stage(g, catalog, run.x_star,
                                                            Policy::FullRecourse, budget);
            CHECK(certify.value == run.z_p_star);
        }
    }
}

TEST_CASE("the literal chain-position variant may leave orphan arcs") {
    CompatibilityGraph g = fig1();
    UnitCatalog catalog = build_catalog(g, 4, 4);
    PositionIndex positions = compute_position_index(g, 4);
    FsfOptions options;
    options.literal_chainpos = true;
    RobustPicefModel literal =
        build_fsf(g, catalog, positions, Policy::FullRecourse, {}, options);
    SolveOutcome outcome = solve(literal.program);
    REQUIRE(outcome.status == SolveStatus::Optimal);
    // The literal index set skips the continuity row for position L-1, so the
    // objective can only gain over the sound variant.
    CHECK(outcome.objective_value >= 9);
    DecodedFirstStage decoded =
        decode_fsf_matching(literal, g, catalog, positions, outcome.assignment);
    CHECK(decoded.orphan_arcs >= 0);
}
