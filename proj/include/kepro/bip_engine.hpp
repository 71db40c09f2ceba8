#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "kepro/common.hpp"

namespace kepro {

// 0-1 linear program with integer coefficients. Every model in the library
// (first-stage robust PICEF, recourse R/RE, covering masters, SSF) is one.
struct SparseRow {
    enum class Sense { Le, Ge, Eq };
    std::vector<std::pair<int, long long>> terms;  // (variable, coefficient)
    Sense sense = Sense::Le;
    long long rhs = 0;
};

struct BinaryProgram {
    enum class Sense { Maximize, Feasibility };
    Sense sense = Sense::Maximize;
    int num_vars = 0;
    std::vector<long long> objective;  // size num_vars; ignored for Feasibility
    std::vector<SparseRow> constraints;

    int add_var(long long objective_coeff = 0) {
        objective.push_back(objective_coeff);
        return num_vars++;
    }
    void add_row(SparseRow row) { constraints.push_back(std::move(row)); }
};

enum class SolveStatus { Optimal, Infeasible, Feasible, TimeLimit };

// Deterministic work counters; these drive timing-free run statistics.
struct EngineWork {
    long long lp_solves = 0;
    long long simplex_pivots = 0;
    long long bb_nodes = 0;
    long long rational_fallbacks = 0;

    EngineWork& operator+=(const EngineWork& o) {
        lp_solves += o.lp_solves;
        simplex_pivots += o.simplex_pivots;
        bb_nodes += o.bb_nodes;
        rational_fallbacks += o.rational_fallbacks;
        return *this;
    }
    long long ticks() const { return simplex_pivots + bb_nodes; }
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<std::uint8_t> assignment;  // meaningful for Optimal/Feasible/TimeLimit-with-incumbent
    bool has_assignment = false;
    long long objective_value = 0;
    Rational bound = 0;  // valid dual bound at termination (Maximize only)
    EngineWork work;
};

struct LpSolution {
    bool feasible = false;
    Rational value = 0;
    std::vector<Rational> primal;  // structural variables only
    std::vector<Rational> duals;   // one per constraint row
    EngineWork work;
};

struct SolveOptions {
    Deadline deadline = Deadline::unlimited();
    std::uint64_t seed = 0;  // reserved; search order is deterministic anyway
};

// Exact optimum / infeasibility witness via branch-and-bound on the exact LP
// relaxation. LP solves use a floating-point simplex whose final basis is
// re-verified in rational arithmetic; on verification failure the node is
// re-solved by an all-rational simplex with Bland's rule.
SolveOutcome solve(const BinaryProgram& program, const SolveOptions& options = {});

// LP relaxation over [0,1] boxes (optionally with variables fixed to 0/1 via
// `fixed`: -1 free, 0 or 1 fixed). Exact rational primal, duals and value.
LpSolution solve_lp_relaxation(const BinaryProgram& program,
                               const std::vector<int>& fixed = {});

// ----- Column generation (§-style restricted master driver) -----

struct Column {
    long long objective = 0;
    std::vector<std::pair<int, long long>> rows;  // (row index, coefficient)
    int external_id = -1;                         // caller's key, e.g. unit id
};

struct ColumnLimits {
    int cycle_per_round = 10;
    int chain_per_round = 10;  // callers drop this to 5 when L >= 4
};

struct ColumnGenResult {
    Rational lp_value = 0;          // Z^UB_cg
    long long integral_value = 0;   // Z*_cg from the final restricted 0-1 solve
    std::vector<int> chosen;        // external ids selected by that solve
    EngineWork work;
    bool hit_time_limit = false;
};

// The restricted master is max sum(obj_j y_j) s.t. per-row sums <= rhs,
// 0 <= y <= 1, starting with no columns. Each round the pricer receives the
// current duals and returns new positive-reduced-cost columns (respecting the
// per-class limits itself); generation stops when it returns none. The final
// restricted program is then solved with integrality.
using Pricer = std::function<std::vector<Column>(const std::vector<Rational>& duals)>;

ColumnGenResult column_generate(int num_rows, const std::vector<long long>& row_rhs,
                                const Pricer& pricer, const SolveOptions& options = {});

// CPLEX-LP-format dump for external cross-checking.
void dump_lp_format(const BinaryProgram& program, std::ostream& out);

}  // namespace kepro
