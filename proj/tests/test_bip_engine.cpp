#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "kepro/bip_engine.hpp"

using namespace kepro;

namespace {

SparseRow row(std::vector<std::pair<int, long long>> terms, SparseRow::Sense sense,
              long long rhs) {
    SparseRow r;
    r.terms = std::move(terms);
    r.sense = sense;
    r.rhs = rhs;
    return r;
}

}  // namespace

TEST_CASE("knapsack optimum is exact") {
    BinaryProgram p;
    const int a = p.add_var(10);
    const int b = p.add_var(13);
    const int c = p.add_var(7);
    const int d = p.add_var(4);
    p.add_row(row({{a, 5}, {b, 6}, {c, 4}, {d, 3}}, SparseRow::Sense::Le, 10));

    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::Optimal);
    CHECK(out.objective_value == 20);  // b + c beats a + c and a + d
    REQUIRE(out.has_assignment);
    CHECK(out.assignment[a] == 0);
    CHECK(out.assignment[b] == 1);
    CHECK(out.assignment[c] == 1);
    CHECK(out.assignment[d] == 0);
    CHECK(out.bound == Rational(20));
    CHECK(out.work.lp_solves >= 1);
}

TEST_CASE("infeasible systems are detected") {
    BinaryProgram p;
    const int a = p.add_var(1);
    const int b = p.add_var(1);
    p.add_row(row({{a, 1}, {b, 1}}, SparseRow::Sense::Ge, 2));
    p.add_row(row({{a, 1}, {b, 1}}, SparseRow::Sense::Le, 1));
    CHECK(solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("equality rows bind exactly") {
    BinaryProgram p;
    const int a = p.add_var(3);
    const int b = p.add_var(2);
    const int c = p.add_var(1);
    p.add_row(row({{a, 1}, {b, 1}, {c, 1}}, SparseRow::Sense::Eq, 2));
    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::Optimal);
    CHECK(out.objective_value == 5);
    CHECK(out.assignment[a] + out.assignment[b] + out.assignment[c] == 2);
}

TEST_CASE("negative coefficients and empty objectives work") {
    BinaryProgram p;
    const int a = p.add_var(-2);
    const int b = p.add_var(5);
    p.add_row(row({{a, 1}, {b, -1}}, SparseRow::Sense::Ge, 0));  // b <= a
    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::Optimal);
    CHECK(out.objective_value == 3);  // taking both beats taking none
    CHECK(out.assignment[a] == 1);
    CHECK(out.assignment[b] == 1);
}

TEST_CASE("feasibility sense stops at the first integral point") {
    BinaryProgram p;
    p.sense = BinaryProgram::Sense::Feasibility;
    const int a = p.add_var();
    const int b = p.add_var();
    const int c = p.add_var();
    p.add_row(row({{a, 1}, {b, 1}, {c, 1}}, SparseRow::Sense::Ge, 2));
    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::Feasible);
    REQUIRE(out.has_assignment);
    CHECK(out.assignment[a] + out.assignment[b] + out.assignment[c] >= 2);

    p.add_row(row({{a, 1}, {b, 1}, {c, 1}}, SparseRow::Sense::Le, 1));
    CHECK(solve(p).status == SolveStatus::Infeasible);
}

TEST_CASE("fractional relaxations are rounded correctly by branching") {
    // LP optimum is fractional (3 pairwise-conflicting vars, each capacity 1
    // shared with the next): relaxation picks 1/2 each.
    BinaryProgram p;
    const int a = p.add_var(1);
    const int b = p.add_var(1);
    const int c = p.add_var(1);
    p.add_row(row({{a, 1}, {b, 1}}, SparseRow::Sense::Le, 1));
    p.add_row(row({{b, 1}, {c, 1}}, SparseRow::Sense::Le, 1));
    p.add_row(row({{a, 1}, {c, 1}}, SparseRow::Sense::Le, 1));

    const LpSolution lp = solve_lp_relaxation(p);
    REQUIRE(lp.feasible);
    CHECK(lp.value == Rational(3) / Rational(2));

    const SolveOutcome out = solve(p);
    REQUIRE(out.status == SolveStatus::Optimal);
    CHECK(out.objective_value == 1);
    CHECK(out.work.bb_nodes >= 1);
}

TEST_CASE("lp relaxation honors fixed variables and reports duals") {
    BinaryProgram p;
    const int a = p.add_var(2);
    const int b = p.add_var(1);
    p.add_row(row({{a, 1}, {b, 1}}, SparseRow::Sense::Le, 1));

    LpSolution lp = solve_lp_relaxation(p);
    REQUIRE(lp.feasible);
    CHECK(lp.value == Rational(2));
    REQUIRE(lp.primal.size() == 2);
    CHECK(lp.primal[a] == Rational(1));
    REQUIRE(lp.duals.size() == 1);
    CHECK(lp.duals[0] == Rational(2));  // the capacity row prices at c_a

    std::vector<int> fixed = {0, -1};
    lp = solve_lp_relaxation(p, fixed);
    REQUIRE(lp.feasible);
    CHECK(lp.value == Rational(1));
    CHECK(lp.primal[a] == Rational(0));
    CHECK(lp.primal[b] == Rational(1));

    fixed = {1, 1};
    lp = solve_lp_relaxation(p, fixed);
    CHECK_FALSE(lp.feasible);
}

TEST_CASE("identical inputs give identical outcomes") {
    BinaryProgram p;
    for (int i = 0; i < 12; ++i) p.add_var(1 + (i * 7) % 5);
    for (int i = 0; i < 12; ++i) {
        p.add_row(row({{i, 1}, {(i + 1) % 12, 1}, {(i + 5) % 12, 1}},
                      SparseRow::Sense::Le, 1));
    }
    const SolveOutcome first = solve(p);
    const SolveOutcome second = solve(p);
    REQUIRE(first.status == SolveStatus::Optimal);
    CHECK(first.objective_value == second.objective_value);
    CHECK(first.assignment == second.assignment);
    CHECK(first.work.simplex_pivots == second.work.simplex_pivots);
    CHECK(first.work.bb_nodes == second.work.bb_nodes);
}

TEST_CASE("expired deadlines surface as a time limit status") {
    BinaryProgram p;
    for (int i = 0; i < 30; ++i) p.add_var(1);
    for (int i = 0; i < 30; ++i) {
        for (int j = i + 1; j < 30; ++j) {
            if ((i + j) % 3 == 0) {
                p.add_row(row({{i, 1}, {j, 1}}, SparseRow::Sense::Le, 1));
            }
        }
    }
    SolveOptions options;
    options.deadline = Deadline(0.0);
    CHECK(solve(p, options).status == SolveStatus::TimeLimit);
}

TEST_CASE("column generation solves a covering master") {
    // Rows are three capacities; columns arrive from a fixed pool priced by
    // reduced cost. Optimum picks the two disjoint columns.
    struct Pool {
        Column col;
        bool offered = false;
    };
    std::vector<Pool> pool;
    auto make = [](long long obj, std::vector<std::pair<int, long long>> rows,
                   int id) {
        Column c;
        c.objective = obj;
        c.rows = std::move(rows);
        c.external_id = id;
        return Pool{c, false};
    };
    pool.push_back(make(2, {{0, 1}, {1, 1}}, 0));
    pool.push_back(make(2, {{1, 1}, {2, 1}}, 1));
    pool.push_back(make(3, {{0, 1}, {1, 1}, {2, 1}}, 2));

    const Pricer pricer = [&](const std::vector<Rational>& duals) {
        std::vector<Column> out;
        for (Pool& entry : pool) {
            if (entry.offered) continue;
            Rational reduced = Rational(entry.col.objective);
            for (const auto& [r, coeff] : entry.col.rows) {
                reduced -= duals[r] * Rational(coeff);
            }
            if (reduced > Rational(0)) {
                entry.offered = true;
                out.push_back(entry.col);
            }
        }
        return out;
    };

    const ColumnGenResult result = column_generate(3, {1, 2, 1}, pricer);
    CHECK(result.integral_value == 4);
    CHECK(result.lp_value >= Rational(4));
    REQUIRE(result.chosen.size() == 2);
    CHECK(result.chosen[0] == 0);
    CHECK(result.chosen[1] == 1);
}

TEST_CASE("lp dumps render in LP format") {
    BinaryProgram p;
    p.add_var(1);
    p.add_var(2);
    p.add_row(row({{0, 1}, {1, 1}}, SparseRow::Sense::Le, 1));
    std::ostringstream out;
    dump_lp_format(p, out);
    CHECK(out.str().find("Maximize") != std::string::npos);
    CHECK(out.str().find("Binary") != std::string::npos);
}
