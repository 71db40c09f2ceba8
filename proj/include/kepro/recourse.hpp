#pragma once

#include <vector>

#include "kepro/bip_engine.hpp"
#include "kepro/enumeration.hpp"
#include "kepro/instance.hpp"
#include "kepro/scenario.hpp"

namespace kepro {

// A recourse selection: vertex-disjoint catalog units with their true value
// (total weight of the selected units that survive the scenario).
struct RecourseSolution {
    std::vector<int> selected;  // catalog unit ids, ascending
    long long value = 0;

    bool operator==(const RecourseSolution& other) const = default;
};

struct RecourseOutcome {
    RecourseSolution solution;
    EngineWork work;
    bool hit_time_limit = false;
};

// Model (R): maximum-weight vertex-disjoint selection among the policy units
// that survive gamma. Ties are resolved by the engine's deterministic
// branching, so identical inputs give identical selections.
RecourseOutcome solve_recourse_R(const CompatibilityGraph& g, const UnitCatalog& catalog,
                                 const PolicyUnitSets& units, const Scenario& gamma,
                                 const SolveOptions& options = {});

// Expanded weights over the transitory units: w*|V| + 1 for units that
// survive gamma (no failed vertex and no failed arc), 1 otherwise. |V| is the
// first-stage graph's vertex count, constant per instance.
std::vector<long long> expanded_weights(const CompatibilityGraph& g,
                                        const UnitCatalog& catalog,
                                        const PolicyUnitSets& units,
                                        const Scenario& gamma);

// True (non-expanded) value of a selection: total weight of its surviving
// units. Failed selected units contribute nothing.
long long true_value(const UnitCatalog& catalog, const PolicyUnitSets& units,
                     const std::vector<int>& selected, const Scenario& gamma);

struct ExpandedRecourseOutcome {
    RecourseSolution psi_star;       // optimum of RE (value = true value)
    RecourseSolution psi_surviving;  // surviving subset of psi_star
    long long z_star_r = 0;          // = psi_surviving.value (Lemma 1)
    EngineWork work;
    bool hit_time_limit = false;
};

// Model (RE): maximum expanded-weight vertex-disjoint selection among all
// transitory units, failed ones included. The surviving subset of the
// optimum attains the Model (R) optimum, which is returned as z_star_r.
ExpandedRecourseOutcome solve_recourse_RE(const CompatibilityGraph& g,
                                          const UnitCatalog& catalog,
                                          const PolicyUnitSets& units,
                                          const Scenario& gamma,
                                          const SolveOptions& options = {});

// Per-round pricing caps: up to 10 cycle and 10 chain columns, with the
// chain cap dropping to 5 when L >= 4.
ColumnLimits recourse_column_limits(int L);

struct ColGenOutcome {
    Rational upper_bound = 0;      // LP relaxation optimum
    long long integral_value = 0;  // value of the restricted 0-1 solve
    RecourseSolution solution;     // selection from the restricted 0-1 solve
    EngineWork work;
    bool hit_time_limit = false;
};

// ColGen over Model (R): prices surviving units by true weight. The
// integral solution's value uses true weights, so integral_value equal to
// upper_bound proves optimality of the returned selection.
ColGenOutcome colgen_R(const CompatibilityGraph& g, const UnitCatalog& catalog,
                       const PolicyUnitSets& units, const Scenario& gamma, int L,
                       const SolveOptions& options = {});

// XColGen over Model (RE): prices all transitory units by expanded weight.
// upper_bound and integral_value are in the expanded scale; solution.value
// holds the true value of the integral selection.
ColGenOutcome colgen_RE(const CompatibilityGraph& g, const UnitCatalog& catalog,
                        const PolicyUnitSets& units, const Scenario& gamma, int L,
                        const SolveOptions& options = {});

}  // namespace kepro
