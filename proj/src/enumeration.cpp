#include "kepro/enumeration.hpp"

#include <algorithm>
#include <sstream>

namespace kepro {

std::string ExchangeUnit::to_string(const CompatibilityGraph& g) const {
    std::ostringstream out;
    out << (kind == Kind::Cycle ? "cycle(" : "chain(");
    for (size_t i = 0; i < vertices.size(); ++i) {
        out << (i ? "," : "") << g.vertices[vertices[i]].id;
    }
    out << ")";
    return out.str();
}

namespace {

// DFS for cycles anchored at their minimum vertex index: from anchor s we
// only visit pair vertices with index > s, so each cycle is found exactly
// once, already in canonical rotation.
void cycle_dfs(const CompatibilityGraph& g, int anchor, int current,
               std::vector<int>& path_vertices, std::vector<int>& path_arcs,
               std::vector<char>& on_path, int K, std::vector<ExchangeUnit>& out) {
    for (int arc_id : g.out_arcs[current]) {
        const int next = g.arcs[arc_id].to;
        if (next == anchor && path_vertices.size() >= 2) {
            ExchangeUnit unit;
            unit.kind = ExchangeUnit::Kind::Cycle;
            unit.vertices = path_vertices;
            unit.arcs = path_arcs;
            unit.arcs.push_back(arc_id);  // closing arc back to the anchor
            out.push_back(std::move(unit));
            continue;
        }
        if (next <= anchor || on_path[next] || !g.is_pair(next)) continue;
        if (static_cast<int>(path_vertices.size()) >= K) continue;
        on_path[next] = 1;
        path_vertices.push_back(next);
        path_arcs.push_back(arc_id);
        cycle_dfs(g, anchor, next, path_vertices, path_arcs, on_path, K, out);
        path_arcs.pop_back();
        path_vertices.pop_back();
        on_path[next] = 0;
    }
}

void chain_dfs(const CompatibilityGraph& g, int current, std::vector<int>& path_vertices,
               std::vector<int>& path_arcs, std::vector<char>& on_path, int L,
               std::vector<ExchangeUnit>& out) {
    if (static_cast<int>(path_arcs.size()) >= L) return;
    for (int arc_id : g.out_arcs[current]) {
        const int next = g.arcs[arc_id].to;
        if (on_path[next] || !g.is_pair(next)) continue;
        on_path[next] = 1;
        path_vertices.push_back(next);
        path_arcs.push_back(arc_id);
        // Every prefix is its own chain unit.
        ExchangeUnit unit;
        unit.kind = ExchangeUnit::Kind::Chain;
        unit.vertices = path_vertices;
        unit.arcs = path_arcs;
        out.push_back(std::move(unit));
        chain_dfs(g, next, path_vertices, path_arcs, on_path, L, out);
        path_arcs.pop_back();
        path_vertices.pop_back();
        on_path[next] = 0;
    }
}

}  // namespace

std::vector<ExchangeUnit> enumerate_cycles(const CompatibilityGraph& g, int K) {
    if (K < 2) {
        throw Error(ErrorKind::Validation, "cycle cap K must be at least 2");
    }
    std::vector<ExchangeUnit> out;
    std::vector<char> on_path(g.num_vertices(), 0);
    for (int s = 0; s < g.num_vertices(); ++s) {
        if (!g.is_pair(s)) continue;
        std::vector<int> path_vertices{s};
        std::vector<int> path_arcs;
        on_path[s] = 1;
        cycle_dfs(g, s, s, path_vertices, path_arcs, on_path, K, out);
        on_path[s] = 0;
    }
    return out;
}

std::vector<ExchangeUnit> enumerate_chains(const CompatibilityGraph& g, int L) {
    if (L < 1) {
        throw Error(ErrorKind::Validation, "chain cap L must be at least 1");
    }
    std::vector<ExchangeUnit> out;
    std::vector<char> on_path(g.num_vertices(), 0);
    for (int s = 0; s < g.num_vertices(); ++s) {
        if (!g.is_ndd(s)) continue;
        std::vector<int> path_vertices{s};
        std::vector<int> path_arcs;
        on_path[s] = 1;
        chain_dfs(g, s, path_vertices, path_arcs, on_path, L, out);
        on_path[s] = 0;
    }
    return out;
}

UnitCatalog build_catalog(const CompatibilityGraph& g, int K, int L) {
    UnitCatalog catalog;
    catalog.units = enumerate_cycles(g, K);
    catalog.num_cycles = static_cast<int>(catalog.units.size());
    auto chains = enumerate_chains(g, L);
    catalog.units.insert(catalog.units.end(), chains.begin(), chains.end());
    for (int i = 0; i < catalog.size(); ++i) catalog.units[i].id = i;
    return catalog;
}

ElementSet matching_elements(const CompatibilityGraph& g, const UnitCatalog& catalog,
                             const Matching& m) {
    ElementSet e;
    e.vertex_in.assign(g.num_vertices(), 0);
    e.arc_in.assign(g.num_arcs(), 0);
    for (int id : m.unit_ids) {
        for (int v : catalog[id].vertices) e.vertex_in[v] = 1;
        for (int a : catalog[id].arcs) e.arc_in[a] = 1;
    }
    return e;
}

bool is_vertex_disjoint(const UnitCatalog& catalog, const Matching& m) {
    std::vector<int> seen;
    for (int id : m.unit_ids) {
        for (int v : catalog[id].vertices) {
            if (std::find(seen.begin(), seen.end(), v) != seen.end()) return false;
            seen.push_back(v);
        }
    }
    return true;
}

std::string policy_name(Policy p) {
    return p == Policy::FullRecourse ? "full" : "first-stage-only";
}

Policy policy_from_name(const std::string& name) {
    if (name == "full") return Policy::FullRecourse;
    if (name == "first-stage-only") return Policy::FirstStageOnly;
    throw Error(ErrorKind::Usage, "unknown policy '" + name + "'");
}

std::vector<int> PolicyUnitSets::all_units() const {
    std::vector<int> out = cycles;
    out.insert(out.end(), chains.begin(), chains.end());
    return out;
}

PolicyUnitSets policy_units(const CompatibilityGraph& g, const UnitCatalog& catalog,
                            const Matching& x_tilde, Policy policy) {
    PolicyUnitSets sets;
    sets.policy = policy;
    sets.weight.assign(catalog.size(), 0);

    const ElementSet x_elems = matching_elements(g, catalog, x_tilde);

    for (const ExchangeUnit& unit : catalog.units) {
        // w_c(x) counts the first-stage pairs the unit would re-match.
        int w = 0;
        for (int v : unit.vertices) {
            if (x_elems.vertex_in[v] && g.is_pair(v)) ++w;
        }
        if (w == 0) continue;
        if (policy == Policy::FirstStageOnly) {
            // Recourse restricted to the subgraph induced by V(x): every
            // vertex (the chain's NDD included) must be first-stage selected.
            bool inside = true;
            for (int v : unit.vertices) {
                if (!x_elems.vertex_in[v]) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
        }
        sets.weight[unit.id] = w;
        if (unit.kind == ExchangeUnit::Kind::Cycle) {
            sets.cycles.push_back(unit.id);
        } else {
            sets.chains.push_back(unit.id);
        }
    }
    return sets;
}

TransitoryGraph build_transitory(const CompatibilityGraph& g, const UnitCatalog& catalog,
                                 const Matching& x_tilde, Policy policy) {
    TransitoryGraph t;
    t.units = policy_units(g, catalog, x_tilde, policy);
    t.elements.vertex_in.assign(g.num_vertices(), 0);
    t.elements.arc_in.assign(g.num_arcs(), 0);
    for (int id : t.units.all_units()) {
        for (int v : catalog[id].vertices) t.elements.vertex_in[v] = 1;
        for (int a : catalog[id].arcs) t.elements.arc_in[a] = 1;
    }
    return t;
}

bool unit_fails(const ExchangeUnit& unit, const Scenario& gamma) {
    for (int v : unit.vertices) {
        if (gamma.vertex_fail[v]) return true;
    }
    for (int a : unit.arcs) {
        if (gamma.arc_fail[a]) return true;
    }
    return false;
}

std::vector<int> second_stage_units(const UnitCatalog& catalog,
                                    const PolicyUnitSets& units, const Scenario& gamma) {
    std::vector<int> out;
    for (int id : units.all_units()) {
        if (!unit_fails(catalog[id], gamma)) out.push_back(id);
    }
    return out;
}

FailureImpact failure_impact(const UnitCatalog& catalog, const PolicyUnitSets& units,
                             const Scenario& gamma) {
    FailureImpact impact;
    impact.element_failures = gamma.total_count();
    for (int id : units.all_units()) {
        if (unit_fails(catalog[id], gamma)) impact.failed_units.push_back(id);
    }
    return impact;
}

bool dominates(const UnitCatalog& catalog, const PolicyUnitSets& units,
               const Scenario& gamma_prime, const Scenario& gamma) {
    for (int id : units.all_units()) {
        if (unit_fails(catalog[id], gamma) && !unit_fails(catalog[id], gamma_prime)) {
            return false;
        }
    }
    return true;
}

}  // namespace kepro
