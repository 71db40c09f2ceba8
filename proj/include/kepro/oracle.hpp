#pragma once

#include "kepro/enumeration.hpp"
#include "kepro/instance.hpp"
#include "kepro/scenario.hpp"

namespace kepro {

// Brute-force reference solvers used by tests and the `oracle` CLI command.
// They deliberately reimplement survival filtering and subset search from
// the definitions instead of reusing the optimizing code they cross-check.
// Hard size guards raise SizeGuard rather than running unboundedly, so a
// stuck oracle can never be mistaken for a disagreement.

inline constexpr int kOracleUnitLimit = 24;
inline constexpr long long kOracleScenarioLimit = 2'000'000;
inline constexpr long long kOracleMatchingLimit = 20'000;

// Exhaustive recourse: maximum total weight of a vertex-disjoint subset of
// the policy units that survive gamma.
long long oracle_recourse(const CompatibilityGraph& g, const UnitCatalog& catalog,
                          const PolicyUnitSets& units, const Scenario& gamma);

struct SecondStageOracle {
    long long value = 0;
    Scenario scenario;  // first attaining scenario in enumeration order
};

// Exhaustive second stage: min over budget-feasible scenarios of the
// exhaustive recourse value. Failures outside the transitory graph cannot
// change any recourse solution, so enumeration ranges over transitory
// elements only.
SecondStageOracle oracle_second_stage(const CompatibilityGraph& g,
                                      const UnitCatalog& catalog,
                                      const Matching& x_tilde, Policy policy,
                                      const Budget& budget);

struct RobustOracle {
    long long value = 0;
    Matching matching;  // first attaining matching in enumeration order
    Scenario scenario;
};

// Exhaustive robust solve: max over every vertex-disjoint unit subset
// (including the empty and non-maximal ones) of the second-stage oracle.
RobustOracle oracle_robust(const CompatibilityGraph& g, int K, int L, Policy policy,
                           const Budget& budget);

}  // namespace kepro
