#include "kepro/heuristic.hpp"

#include <algorithm>

#include "kepro/common.hpp"

namespace kepro {

namespace {

// True when some transitory unit that survives the proposal so far contains
// the candidate element; otherwise failing the candidate is wasted budget
// (its units are all broken already), the single-vertex-arc dominance test.
bool breaks_something(const UnitCatalog& catalog, const TransitoryGraph& transitory,
                      const Scenario& proposal, bool is_arc, int element) {
    for (int id : transitory.units.all_units()) {
        const ExchangeUnit& unit = catalog[id];
        const std::vector<int>& members = is_arc ? unit.arcs : unit.vertices;
        if (std::find(members.begin(), members.end(), element) == members.end()) continue;
        if (!unit_fails(unit, proposal)) return true;
    }
    return false;
}

bool covers_all(const std::vector<CoveringConstraint>& rows, const Scenario& proposal) {
    for (const CoveringConstraint& row : rows) {
        int hits = 0;
        for (int v : row.vertices) hits += proposal.vertex_fail[v];
        for (int a : row.arcs) hits += proposal.arc_fail[a];
        if (hits < row.rhs) return false;
    }
    return true;
}

}  // namespace

ElementPool build_element_pool(const std::vector<CoveringConstraint>& rows) {
    // Deterministic order: vertices ascending, then arcs ascending; weights
    // count how many stored rows contain each element.
    std::vector<std::pair<int, int>> vertex_count;  // (id, rows containing it)
    std::vector<std::pair<int, int>> arc_count;
    auto bump = [](std::vector<std::pair<int, int>>& counts, int id) {
        for (auto& [seen, n] : counts)
            if (seen == id) {
                ++n;
                return;
            }
        counts.emplace_back(id, 1);
    };
    for (const CoveringConstraint& row : rows) {
        for (int v : row.vertices) bump(vertex_count, v);
        for (int a : row.arcs) bump(arc_count, a);
    }
    std::sort(vertex_count.begin(), vertex_count.end());
    std::sort(arc_count.begin(), arc_count.end());

    ElementPool pool;
    for (const auto& [id, n] : vertex_count)
        pool.elements.push_back(PoolElement{false, id, n, false});
    for (const auto& [id, n] : arc_count)
        pool.elements.push_back(PoolElement{true, id, n, false});
    return pool;
}

HeuristicOutcome run_heuristic(const CompatibilityGraph& g, const UnitCatalog& catalog,
                               const std::vector<CoveringConstraint>& rows, Budget budget,
                               const TransitoryGraph& transitory, std::uint64_t seed) {
    ElementPool pool = build_element_pool(rows);
    Rng rng(seed);

    HeuristicOutcome out;
    out.scenario = Scenario::empty_for(g);
    Scenario& proposal = out.scenario;

    std::vector<int> candidates;
    for (;;) {
        // Unchecked elements whose budget class still has room.
        candidates.clear();
        const int used_v = proposal.vertex_count();
        const int used_a = proposal.arc_count();
        for (int n = 0; n < static_cast<int>(pool.elements.size()); ++n) {
            const PoolElement& e = pool.elements[n];
            if (e.checked) continue;
            if (e.is_arc ? used_a < budget.r_a : used_v < budget.r_v)
                candidates.push_back(n);
        }
        if (candidates.empty()) return out;

        int best_weight = 0;
        for (int n : candidates)
            best_weight = std::max(best_weight, pool.elements[n].weight);
        std::vector<int> ties;
        for (int n : candidates)
            if (pool.elements[n].weight == best_weight) ties.push_back(n);
        PoolElement& chosen = pool.elements[ties[rng.below(ties.size())]];

        // The first proposal is always kept, as is any non-directed donor;
        // otherwise a candidate must break at least one still-surviving unit.
        bool keep = true;
        const bool is_ndd_vertex = !chosen.is_arc && g.is_ndd(chosen.id);
        if (used_v + used_a >= 1 && !is_ndd_vertex && (used_a >= 1 || used_v >= 2)) {
            keep = breaks_something(catalog, transitory, proposal, chosen.is_arc,
                                    chosen.id);
            if (!keep) ++out.dominated_rejections;
        }
        chosen.checked = true;
        if (keep) {
            if (chosen.is_arc) {
                proposal.arc_fail[chosen.id] = 1;
                // Mirror of the vertex rule below: failing an endpoint of an
                // already-failed arc would breach the adjacent-failure cuts.
                const ArcRecord& arc = g.arcs[chosen.id];
                for (PoolElement& e : pool.elements) {
                    if (e.is_arc) continue;
                    if (e.id == arc.from || e.id == arc.to) e.checked = true;
                }
            } else {
                proposal.vertex_fail[chosen.id] = 1;
                // A failed vertex already breaks everything through it, so
                // its incident arcs are never worth proposing.
                for (PoolElement& e : pool.elements) {
                    if (!e.is_arc) continue;
                    const ArcRecord& arc = g.arcs[e.id];
                    if (arc.from == chosen.id || arc.to == chosen.id) e.checked = true;
                }
            }
        }

        if (covers_all(rows, proposal)) out.cover = true;
        if (out.cover && proposal.vertex_count() == budget.r_v &&
            proposal.arc_count() == budget.r_a)
            return out;
    }
}

}  // namespace kepro
