#include "kepro/recourse.hpp"

#include <algorithm>

#include "kepro/common.hpp"

namespace kepro {

namespace {

// Maximize sum(weight[u] * x_u) over vertex-disjoint unit selections.
// Variables are ordered by ascending unit id; one <=1 row per used vertex.
struct PackingProgram {
    BinaryProgram program;
    std::vector<int> var_unit;  // variable index -> catalog unit id
};

PackingProgram build_packing(const CompatibilityGraph& g, const UnitCatalog& catalog,
                             const std::vector<int>& unit_ids,
                             const std::vector<long long>& weight_of_unit) {
    PackingProgram out;
    out.program.sense = BinaryProgram::Sense::Maximize;
    std::vector<std::vector<std::pair<int, long long>>> vertex_terms(g.num_vertices());
    for (int id : unit_ids) {
        const int var = out.program.add_var(weight_of_unit[id]);
        out.var_unit.push_back(id);
        for (int v : catalog[id].vertices) {
            vertex_terms[v].emplace_back(var, 1);
        }
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (vertex_terms[v].empty()) continue;
        SparseRow row;
        row.terms = vertex_terms[v];
        row.sense = SparseRow::Sense::Le;
        row.rhs = 1;
        out.program.add_row(row);
    }
    return out;
}

RecourseSolution extract_solution(const PackingProgram& packing,
                                  const std::vector<std::uint8_t>& assignment) {
    RecourseSolution sol;
    for (std::size_t j = 0; j < packing.var_unit.size(); ++j) {
        if (assignment[j]) sol.selected.push_back(packing.var_unit[j]);
    }
    return sol;
}

struct ColGenContext {
    const CompatibilityGraph& g;
    const UnitCatalog& catalog;
    std::vector<int> cycle_ids;
    std::vector<int> chain_ids;
    std::vector<long long> weights;  // by catalog unit id
    std::vector<char> added;         // by catalog unit id
    ColumnLimits limits;
};

Column make_column(const ColGenContext& ctx, int unit_id) {
    Column col;
    col.objective = ctx.weights[unit_id];
    col.external_id = unit_id;
    for (int v : ctx.catalog[unit_id].vertices) col.rows.emplace_back(v, 1);
    return col;
}

// Reduced cost of a unit not yet in the restricted master.
Rational reduced_cost(const ColGenContext& ctx, const std::vector<Rational>& duals,
                      int unit_id) {
    Rational rc = ctx.weights[unit_id];
    for (int v : ctx.catalog[unit_id].vertices) rc -= duals[v];
    return rc;
}

// Scans ids in order, collecting up to cap not-yet-added columns with
// strictly positive reduced cost.
std::vector<int> price_range(const ColGenContext& ctx, const std::vector<Rational>& duals,
                             const std::vector<int>& ids, std::size_t begin,
                             std::size_t end, int cap) {
    std::vector<int> picked;
    for (std::size_t i = begin; i < end && static_cast<int>(picked.size()) < cap; ++i) {
        const int id = ids[i];
        if (ctx.added[id]) continue;
        if (reduced_cost(ctx, duals, id) > 0) picked.push_back(id);
    }
    return picked;
}

ColGenOutcome run_colgen(ColGenContext ctx, int L, const SolveOptions& options) {
    const bool halve_chains = L >= 4;
    const std::size_t chain_half = (ctx.chain_ids.size() + 1) / 2;

    Pricer pricer = [&ctx, halve_chains, chain_half](const std::vector<Rational>& duals) {
        std::vector<int> picked = price_range(ctx, duals, ctx.cycle_ids, 0,
                                              ctx.cycle_ids.size(), ctx.limits.cycle_per_round);
        std::vector<int> chains;
        if (halve_chains) {
            chains = price_range(ctx, duals, ctx.chain_ids, 0, chain_half,
                                 ctx.limits.chain_per_round);
            if (chains.empty()) {
                chains = price_range(ctx, duals, ctx.chain_ids, 0, ctx.chain_ids.size(),
                                     ctx.limits.chain_per_round);
            }
        } else {
            chains = price_range(ctx, duals, ctx.chain_ids, 0, ctx.chain_ids.size(),
                                 ctx.limits.chain_per_round);
        }
        picked.insert(picked.end(), chains.begin(), chains.end());
        std::vector<Column> cols;
        for (int id : picked) {
            ctx.added[id] = 1;
            cols.push_back(make_column(ctx, id));
        }
        return cols;
    };

    const ColumnGenResult res =
        column_generate(ctx.g.num_vertices(),
                        std::vector<long long>(ctx.g.num_vertices(), 1), pricer, options);

    ColGenOutcome out;
    out.upper_bound = res.lp_value;
    out.integral_value = res.integral_value;
    out.work = res.work;
    out.hit_time_limit = res.hit_time_limit;
    out.solution.selected = res.chosen;
    std::sort(out.solution.selected.begin(), out.solution.selected.end());
    return out;  // solution.value is filled in by the caller
}

}  // namespace

RecourseOutcome solve_recourse_R(const CompatibilityGraph& g, const UnitCatalog& catalog,
                                 const PolicyUnitSets& units, const Scenario& gamma,
                                 const SolveOptions& options) {
    std::vector<long long> weights(catalog.size(), 0);
    std::vector<int> alive;
    for (int id : units.all_units()) {
        if (!unit_fails(catalog[id], gamma)) {
            alive.push_back(id);
            weights[id] = units.weight[id];
        }
    }
    const PackingProgram packing = build_packing(g, catalog, alive, weights);
    const SolveOutcome res = solve(packing.program, options);

    RecourseOutcome out;
    out.work = res.work;
    if (res.status == SolveStatus::TimeLimit) {
        out.hit_time_limit = true;
        return out;
    }
    if (res.status != SolveStatus::Optimal || !res.has_assignment) {
        throw Error(ErrorKind::Internal, "recourse packing must be solvable");
    }
    out.solution = extract_solution(packing, res.assignment);
    out.solution.value = res.objective_value;
    return out;
}

std::vector<long long> expanded_weights(const CompatibilityGraph& g,
                                        const UnitCatalog& catalog,
                                        const PolicyUnitSets& units,
                                        const Scenario& gamma) {
    std::vector<long long> expanded(catalog.size(), 0);
    const long long scale = g.num_vertices();
    for (int id : units.all_units()) {
        expanded[id] = unit_fails(catalog[id], gamma)
                           ? 1
                           : static_cast<long long>(units.weight[id]) * scale + 1;
    }
    return expanded;
}

long long true_value(const UnitCatalog& catalog, const PolicyUnitSets& units,
                     const std::vector<int>& selected, const Scenario& gamma) {
    long long total = 0;
    for (int id : selected) {
        if (!unit_fails(catalog[id], gamma)) total += units.weight[id];
    }
    return total;
}

ExpandedRecourseOutcome solve_recourse_RE(const CompatibilityGraph& g,
                                          const UnitCatalog& catalog,
                                          const PolicyUnitSets& units,
                                          const Scenario& gamma,
                                          const SolveOptions& options) {
    const std::vector<long long> expanded = expanded_weights(g, catalog, units, gamma);
    const PackingProgram packing =
        build_packing(g, catalog, units.all_units(), expanded);
    const SolveOutcome res = solve(packing.program, options);

    ExpandedRecourseOutcome out;
    out.work = res.work;
    if (res.status == SolveStatus::TimeLimit) {
        out.hit_time_limit = true;
        return out;
    }
    if (res.status != SolveStatus::Optimal || !res.has_assignment) {
        throw Error(ErrorKind::Internal, "expanded recourse packing must be solvable");
    }
    out.psi_star = extract_solution(packing, res.assignment);
    out.psi_star.value = true_value(catalog, units, out.psi_star.selected, gamma);
    for (int id : out.psi_star.selected) {
        if (!unit_fails(catalog[id], gamma)) {
            out.psi_surviving.selected.push_back(id);
            out.psi_surviving.value += units.weight[id];
        }
    }
    out.z_star_r = out.psi_surviving.value;
    return out;
}

ColumnLimits recourse_column_limits(int L) {
    ColumnLimits limits;
    limits.cycle_per_round = 10;
    limits.chain_per_round = L >= 4 ? 5 : 10;
    return limits;
}

ColGenOutcome colgen_R(const CompatibilityGraph& g, const UnitCatalog& catalog,
                       const PolicyUnitSets& units, const Scenario& gamma, int L,
                       const SolveOptions& options) {
    ColGenContext ctx{g, catalog, {}, {}, std::vector<long long>(catalog.size(), 0),
                      std::vector<char>(catalog.size(), 0), recourse_column_limits(L)};
    for (int id : units.cycles) {
        if (!unit_fails(catalog[id], gamma)) {
            ctx.cycle_ids.push_back(id);
            ctx.weights[id] = units.weight[id];
        }
    }
    for (int id : units.chains) {
        if (!unit_fails(catalog[id], gamma)) {
            ctx.chain_ids.push_back(id);
            ctx.weights[id] = units.weight[id];
        }
    }
    ColGenOutcome out = run_colgen(std::move(ctx), L, options);
    out.solution.value = true_value(catalog, units, out.solution.selected, gamma);
    return out;
}

ColGenOutcome colgen_RE(const CompatibilityGraph& g, const UnitCatalog& catalog,
                        const PolicyUnitSets& units, const Scenario& gamma, int L,
                        const SolveOptions& options) {
    ColGenContext ctx{g, catalog, units.cycles, units.chains,
                      expanded_weights(g, catalog, units, gamma),
                      std::vector<char>(catalog.size(), 0), recourse_column_limits(L)};
    ColGenOutcome out = run_colgen(std::move(ctx), L, options);
    // upper_bound and integral_value stay in the expanded scale; the
    // solution's value reports true (non-expanded) worth.
    out.solution.value = true_value(catalog, units, out.solution.selected, gamma);
    return out;
}

}  // namespace kepro
