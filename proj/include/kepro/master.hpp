#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kepro/bip_engine.hpp"
#include "kepro/enumeration.hpp"
#include "kepro/scenario.hpp"

namespace kepro {

enum class ConstraintOrigin { FirstStage, SecondStageSolution, ExpandedSolution };

std::string origin_name(ConstraintOrigin origin);

// One covering row of a feasibility-seeking master: at least `rhs` elements
// drawn from one stored solution's units must fail. Elements are the union of
// the origin solution's unit vertices/arcs; `sorted_weights` keeps the origin
// units' recourse weights non-increasing for RHS strengthening.
struct CoveringConstraint {
    ConstraintOrigin origin = ConstraintOrigin::FirstStage;
    Scenario scenario;                      // generating scenario; empty for the first stage
    std::vector<int> unit_ids;              // origin solution, catalog ids ascending
    std::vector<int> vertices;              // element vertex ids, ascending
    std::vector<int> arcs;                  // element arc ids, ascending
    std::vector<long long> sorted_weights;  // non-increasing
    long long weight_sum = 0;               // strengthening base: sum of sorted_weights
    int rhs = 1;

    int element_count() const {
        return static_cast<int>(vertices.size() + arcs.size());
    }
    int unit_count() const { return static_cast<int>(unit_ids.size()); }
};

// Cached solution row for the SSF lower-bounding model: the first-stage
// matching row plus one row per stored expanded recourse solution, each with
// the recourse value it certified when stored.
struct SsfRow {
    std::vector<int> unit_ids;
    long long base = 0;
};

// Mutable state of one second-stage solve: covering rows, accepted scenarios,
// the current recourse upper bound, cut pools and the SSF row cache. Borrowed
// pointers stay valid for the state's lifetime (single-owner, no concurrent
// mutation). Every structural change appends one JSON line to `trace`.
struct MasterState {
    enum class Kind { MS, MT };

    Kind kind = Kind::MS;
    const CompatibilityGraph* g = nullptr;
    const UnitCatalog* catalog = nullptr;
    const PolicyUnitSets* units = nullptr;
    Budget budget;
    long long z_tilde_p = 0;
    long long z_bar_q = 0;
    bool adjacency_cuts_enabled = true;

    std::vector<CoveringConstraint> constraints;
    std::vector<Scenario> gamma_hat;  // accepted scenarios, pairwise distinct
    std::vector<Scenario> no_goods;   // exact-point exclusions from duplicate rejections
    std::vector<std::pair<Scenario, Scenario>> dominance_pairs;  // (dominated, dominating)
    std::vector<SsfRow> ssf_rows;     // [0] is always the first-stage row
    std::vector<std::string> trace;   // JSON lines
};

std::string master_kind_name(MasterState::Kind kind);

// Creates the state with the first-stage covering row (rhs 1) and the
// first-stage SSF row installed and the bound initialized to z_tilde_p.
// Adjacent-failure cuts are enabled at creation and participate in every
// scenario search thereafter.
MasterState make_master_state(MasterState::Kind kind, const CompatibilityGraph& g,
                              const UnitCatalog& catalog, const PolicyUnitSets& units,
                              const Matching& x_tilde, long long z_tilde_p, Budget budget,
                              bool adjacency_cuts_enabled = true);

// Adds a covering row over the union of the solution's unit elements and
// returns its index. Non-expanded rows start at rhs 1; expanded rows are
// strengthened against the current bound at creation. A row identical to a
// stored one (same origin kind, elements and weights) is silently
// deduplicated and the stored row's index returned.
int add_solution_constraint(MasterState& state, const std::vector<int>& unit_ids,
                            ConstraintOrigin origin, const Scenario& scenario);

// Smallest t such that weight_sum minus the t heaviest weights drops below
// z_bar_q; |unit_ids| + 1 when even failing every unit cannot (the row then
// becomes unsatisfiable, signalling that scenario family is exhausted).
int strengthen_rhs(const CoveringConstraint& constraint, long long z_bar_q);

// Lowers the bound (no-op unless strictly smaller) and logs the change.
void update_bound(MasterState& state, long long z_bar_q);

// Re-applies strengthen_rhs to every stored row at the current bound; called
// by the strengthened algorithms after each bound improvement.
void restrengthen_all(MasterState& state);

// Registers an accepted scenario (must be fresh) for duplicate rejection and
// dominance bookkeeping.
void accept_scenario(MasterState& state, const Scenario& scenario);

// Caches an expanded recourse solution and its value as an SSF row.
void add_ssf_row(MasterState& state, const std::vector<int>& unit_ids, long long z_star_r);

// Adds one dominance inequality per (dominated, dominating) pair; the caller
// certifies dominance beforehand. The rows participate in every subsequent
// scenario search.
void install_dominance_cuts(MasterState& state,
                            const std::vector<std::pair<Scenario, Scenario>>& pairs);

struct FindScenarioResult {
    bool feasible = false;  // false: master infeasible (or time limit hit)
    Scenario scenario;
    int duplicates_rejected = 0;
    EngineWork work;
    bool hit_time_limit = false;
};

// Feasibility solve of the covering master over the union of stored row
// elements, subject to budgets, adjacent-failure cuts, dominance cuts and
// no-goods. A solution equal to an accepted scenario is rejected with an
// exact-point no-good and the engine re-solved.
FindScenarioResult find_scenario(MasterState& state, const SolveOptions& options = {});

struct SsfResult {
    bool feasible = false;  // false: every budget-feasible scenario is excluded
    long long z_lower = 0;
    Scenario scenario;
    int duplicates_rejected = 0;
    EngineWork work;
    bool hit_time_limit = false;
};

// Optimality-seeking lower bound: minimizes the second-stage objective over
// the cached SSF rows with failure variables on the transitory elements.
// Returns the bound and an attaining scenario, rejecting duplicates like
// find_scenario does.
SsfResult solve_ssf(MasterState& state, const TransitoryGraph& transitory,
                    const SolveOptions& options = {});

}  // namespace kepro
