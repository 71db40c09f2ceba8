#pragma once

#include <string>
#include <vector>

#include "kepro/instance.hpp"
#include "kepro/scenario.hpp"

namespace kepro {

// A feasible exchange unit: either a simple directed cycle on pairs with
// 2..K vertices, or a chain (simple path triggered by an NDD) with 1..L arcs.
// Every chain prefix is emitted as its own unit so that chain shortening
// under failures is represented by selecting the surviving shorter prefix.
struct ExchangeUnit {
    enum class Kind { Cycle, Chain };
    Kind kind = Kind::Cycle;
    std::vector<int> vertices;  // cycle: canonical rotation (min index first);
                                // chain: NDD first, then pairs in order
    std::vector<int> arcs;      // arc ids consistent with vertex order;
                                // cycle: includes the closing arc
    int id = -1;                // dense index within its catalog

    std::string to_string(const CompatibilityGraph& g) const;
};

// All feasible units of an instance for given caps K and L. Cycles first,
// chains after, ids equal to positions (stable for a fixed graph/K/L).
struct UnitCatalog {
    std::vector<ExchangeUnit> units;
    int num_cycles = 0;

    int size() const { return static_cast<int>(units.size()); }
    const ExchangeUnit& operator[](int id) const { return units[id]; }
};

std::vector<ExchangeUnit> enumerate_cycles(const CompatibilityGraph& g, int K);
std::vector<ExchangeUnit> enumerate_chains(const CompatibilityGraph& g, int L);
UnitCatalog build_catalog(const CompatibilityGraph& g, int K, int L);

// A vertex-disjoint selection of catalog units (a matching in KEP terms).
struct Matching {
    std::vector<int> unit_ids;

    bool operator==(const Matching& other) const = default;
};

// Element sets V(m) and A(m) of a matching, as indicator vectors.
struct ElementSet {
    std::vector<std::uint8_t> vertex_in;
    std::vector<std::uint8_t> arc_in;
};

ElementSet matching_elements(const CompatibilityGraph& g, const UnitCatalog& catalog,
                             const Matching& m);
bool is_vertex_disjoint(const UnitCatalog& catalog, const Matching& m);

enum class Policy { FullRecourse, FirstStageOnly };

std::string policy_name(Policy p);
Policy policy_from_name(const std::string& name);  // "full" / "first-stage-only"

// Policy-restricted recourse unit sets C^pi_K(x) and C^pi_L(x) with weights
// w_c(x) = |V(c) ∩ V(x) ∩ P|. Only units with weight >= 1 participate: a unit
// covering no first-stage pair adds nothing to any recourse objective.
struct PolicyUnitSets {
    Policy policy = Policy::FullRecourse;
    std::vector<int> cycles;   // catalog unit ids
    std::vector<int> chains;   // catalog unit ids
    std::vector<int> weight;   // indexed by catalog unit id; 0 = not in set

    std::vector<int> all_units() const;
    bool contains(int unit_id) const {
        return unit_id < static_cast<int>(weight.size()) && weight[unit_id] > 0;
    }
};

PolicyUnitSets policy_units(const CompatibilityGraph& g, const UnitCatalog& catalog,
                            const Matching& x_tilde, Policy policy);

// Transitory compatibility graph D^pi(x): union of the policy units' elements.
struct TransitoryGraph {
    ElementSet elements;
    PolicyUnitSets units;
};

TransitoryGraph build_transitory(const CompatibilityGraph& g, const UnitCatalog& catalog,
                                 const Matching& x_tilde, Policy policy);

// True iff any vertex or arc of the unit fails under gamma.
bool unit_fails(const ExchangeUnit& unit, const Scenario& gamma);

// C^pi_{K,L}(x, gamma): ids of policy units whose elements all survive.
std::vector<int> second_stage_units(const UnitCatalog& catalog,
                                    const PolicyUnitSets& units, const Scenario& gamma);

// Failed-unit set and failure count I(gamma) over the policy unit sets.
struct FailureImpact {
    std::vector<int> failed_units;
    int element_failures = 0;  // I(gamma)
};

FailureImpact failure_impact(const UnitCatalog& catalog, const PolicyUnitSets& units,
                             const Scenario& gamma);

// Prop. 4 dominance: gamma' dominates gamma iff every policy unit failed by
// gamma is also failed by gamma' (then the recourse value under gamma' is at
// most that under gamma).
bool dominates(const UnitCatalog& catalog, const PolicyUnitSets& units,
               const Scenario& gamma_prime, const Scenario& gamma);

}  // namespace kepro
