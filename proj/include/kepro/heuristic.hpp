#pragma once

#include <cstdint>
#include <vector>

#include "kepro/enumeration.hpp"
#include "kepro/master.hpp"
#include "kepro/scenario.hpp"

namespace kepro {

// One pooled element of the greedy scenario constructor's working set: a
// vertex or arc appearing in at least one stored matching row, weighted by
// its occurrence count across those rows.
struct PoolElement {
    bool is_arc = false;
    int id = -1;
    int weight = 0;
    bool checked = false;
};

struct ElementPool {
    std::vector<PoolElement> elements;
};

ElementPool build_element_pool(const std::vector<CoveringConstraint>& rows);

struct HeuristicOutcome {
    Scenario scenario;
    bool cover = false;
    int dominated_rejections = 0;  // single-vertex-arc separation refusals
};

// Greedy worst-case scenario construction over the stored covering rows:
// repeatedly proposes the heaviest unchecked element whose budget class still
// has room (ties broken uniformly by the seeded generator), rejects proposals
// whose failure provably cannot break any additional surviving unit, marks a
// failed vertex's incident arcs as spent, and reports whether the built
// scenario meets every row's current right-hand-side target.
HeuristicOutcome run_heuristic(const CompatibilityGraph& g, const UnitCatalog& catalog,
                               const std::vector<CoveringConstraint>& rows, Budget budget,
                               const TransitoryGraph& transitory, std::uint64_t seed);

}  // namespace kepro
