#include "kepro/master.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

#include <json.hpp>

namespace kepro {

namespace {

using nlohmann::json;

std::string vertex_name(const CompatibilityGraph& g, int v) {
    return "v" + std::to_string(g.vertices[v].id);
}

std::string arc_name(const CompatibilityGraph& g, int a) { return "a" + g.arc_label(a); }

void push_trace(MasterState& state, json line) { state.trace.push_back(line.dump()); }

json element_names(const MasterState& state, const CoveringConstraint& row) {
    json names = json::array();
    for (int v : row.vertices) names.push_back(vertex_name(*state.g, v));
    for (int a : row.arcs) names.push_back(arc_name(*state.g, a));
    return names;
}

// Union of the units' vertex/arc elements, ascending internal ids.
void solution_elements(const CompatibilityGraph& g, const UnitCatalog& catalog,
                       const std::vector<int>& unit_ids, std::vector<int>& vertices,
                       std::vector<int>& arcs) {
    std::vector<std::uint8_t> vin(g.num_vertices(), 0);
    std::vector<std::uint8_t> ain(g.num_arcs(), 0);
    for (int id : unit_ids) {
        const ExchangeUnit& unit = catalog[id];
        for (int v : unit.vertices) vin[v] = 1;
        for (int a : unit.arcs) ain[a] = 1;
    }
    for (int v = 0; v < g.num_vertices(); ++v)
        if (vin[v]) vertices.push_back(v);
    for (int a = 0; a < g.num_arcs(); ++a)
        if (ain[a]) arcs.push_back(a);
}

// Failure variables of the covering master: one per element appearing in at
// least one stored row (restricting the uncertainty set to these elements
// loses no scenario the rows can distinguish).
struct VarMap {
    std::vector<int> vertex_ids;  // ascending
    std::vector<int> arc_ids;     // ascending
    std::vector<int> vertex_var;  // vertex id -> variable index, -1 when absent
    std::vector<int> arc_var;     // arc id -> variable index, -1 when absent

    int var_count() const { return static_cast<int>(vertex_ids.size() + arc_ids.size()); }
};

VarMap covering_varmap(const MasterState& state) {
    const CompatibilityGraph& g = *state.g;
    std::vector<std::uint8_t> vin(g.num_vertices(), 0);
    std::vector<std::uint8_t> ain(g.num_arcs(), 0);
    for (const CoveringConstraint& row : state.constraints) {
        for (int v : row.vertices) vin[v] = 1;
        for (int a : row.arcs) ain[a] = 1;
    }
    VarMap vm;
    vm.vertex_var.assign(g.num_vertices(), -1);
    vm.arc_var.assign(g.num_arcs(), -1);
    int next = 0;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (vin[v]) {
            vm.vertex_ids.push_back(v);
            vm.vertex_var[v] = next++;
        }
    for (int a = 0; a < g.num_arcs(); ++a)
        if (ain[a]) {
            vm.arc_ids.push_back(a);
            vm.arc_var[a] = next++;
        }
    return vm;
}

void add_budget_rows(BinaryProgram& p, const Budget& budget,
                     const std::vector<int>& vertex_vars, const std::vector<int>& arc_vars) {
    if (!vertex_vars.empty()) {
        SparseRow row;
        row.sense = SparseRow::Sense::Le;
        row.rhs = budget.r_v;
        for (int var : vertex_vars) row.terms.emplace_back(var, 1);
        p.add_row(std::move(row));
    }
    if (!arc_vars.empty()) {
        SparseRow row;
        row.sense = SparseRow::Sense::Le;
        row.rhs = budget.r_a;
        for (int var : arc_vars) row.terms.emplace_back(var, 1);
        p.add_row(std::move(row));
    }
}

// Exact-point exclusion of one already-explored scenario over the available
// failure variables: sum over its support minus sum over the rest stays below
// the support size.
void add_no_good_rows(BinaryProgram& p, const std::vector<Scenario>& no_goods,
                      const std::vector<int>& vertex_ids, const std::vector<int>& arc_ids,
                      const std::vector<int>& vertex_var, const std::vector<int>& arc_var) {
    for (const Scenario& s : no_goods) {
        SparseRow row;
        row.sense = SparseRow::Sense::Le;
        long long support = 0;
        for (int v : vertex_ids) {
            if (s.vertex_fail[v]) {
                row.terms.emplace_back(vertex_var[v], 1);
                ++support;
            } else {
                row.terms.emplace_back(vertex_var[v], -1);
            }
        }
        for (int a : arc_ids) {
            if (s.arc_fail[a]) {
                row.terms.emplace_back(arc_var[a], 1);
                ++support;
            } else {
                row.terms.emplace_back(arc_var[a], -1);
            }
        }
        row.rhs = support - 1;
        p.add_row(std::move(row));
    }
}

BinaryProgram build_covering_program(const MasterState& state, const VarMap& vm) {
    const CompatibilityGraph& g = *state.g;
    BinaryProgram p;
    p.sense = BinaryProgram::Sense::Feasibility;
    for (int i = 0; i < vm.var_count(); ++i) p.add_var(0);

    for (const CoveringConstraint& row : state.constraints) {
        if (row.rhs > row.unit_count() || row.rhs > row.element_count()) {
            // Sentinel rhs: even failing every unit of the row cannot push
            // its value below the bound. An empty >= 1 row makes the
            // infeasibility explicit to the engine.
            SparseRow dead;
            dead.sense = SparseRow::Sense::Ge;
            dead.rhs = 1;
            p.add_row(std::move(dead));
            continue;
        }
        SparseRow r;
        r.sense = SparseRow::Sense::Ge;
        r.rhs = row.rhs;
        for (int v : row.vertices) r.terms.emplace_back(vm.vertex_var[v], 1);
        for (int a : row.arcs) r.terms.emplace_back(vm.arc_var[a], 1);
        p.add_row(std::move(r));
    }

    std::vector<int> vertex_vars;
    for (int v : vm.vertex_ids) vertex_vars.push_back(vm.vertex_var[v]);
    std::vector<int> arc_vars;
    for (int a : vm.arc_ids) arc_vars.push_back(vm.arc_var[a]);
    add_budget_rows(p, state.budget, vertex_vars, arc_vars);

    if (state.adjacency_cuts_enabled) {
        // Failing an arc at a failed vertex is wasted budget: the vertex
        // already kills every unit through it.
        for (int u : vm.vertex_ids) {
            SparseRow row;
            row.sense = SparseRow::Sense::Le;
            row.rhs = state.budget.r_a;
            for (int a : g.out_arcs[u])
                if (vm.arc_var[a] >= 0) row.terms.emplace_back(vm.arc_var[a], 1);
            for (int a : g.in_arcs[u])
                if (vm.arc_var[a] >= 0) row.terms.emplace_back(vm.arc_var[a], 1);
            if (row.terms.empty()) continue;
            row.terms.emplace_back(vm.vertex_var[u], state.budget.r_a);
            p.add_row(std::move(row));
        }
    }

    for (const auto& [dominated, dominating] : state.dominance_pairs) {
        const long long i_dom = dominated.total_count();
        const long long i_dmg = dominating.total_count();
        std::vector<long long> coeff(vm.var_count(), 0);
        for (int v : vm.vertex_ids) {
            if (dominated.vertex_fail[v]) coeff[vm.vertex_var[v]] += 1;
            if (dominating.vertex_fail[v]) coeff[vm.vertex_var[v]] += i_dom;
        }
        for (int a : vm.arc_ids) {
            if (dominated.arc_fail[a]) coeff[vm.arc_var[a]] += 1;
            if (dominating.arc_fail[a]) coeff[vm.arc_var[a]] += i_dom;
        }
        SparseRow row;
        row.sense = SparseRow::Sense::Le;
        row.rhs = i_dom * i_dmg;
        for (int var = 0; var < vm.var_count(); ++var)
            if (coeff[var] != 0) row.terms.emplace_back(var, coeff[var]);
        p.add_row(std::move(row));
    }

    add_no_good_rows(p, state.no_goods, vm.vertex_ids, vm.arc_ids, vm.vertex_var,
                     vm.arc_var);
    return p;
}

Scenario extract_scenario(const MasterState& state, const VarMap& vm,
                          const std::vector<std::uint8_t>& assignment) {
    Scenario s = Scenario::empty_for(*state.g);
    for (int v : vm.vertex_ids)
        if (assignment[vm.vertex_var[v]]) s.vertex_fail[v] = 1;
    for (int a : vm.arc_ids)
        if (assignment[vm.arc_var[a]]) s.arc_fail[a] = 1;
    return s;
}

bool already_accepted(const MasterState& state, const Scenario& s) {
    for (const Scenario& seen : state.gamma_hat)
        if (seen == s) return true;
    return false;
}

}  // namespace

std::string origin_name(ConstraintOrigin origin) {
    switch (origin) {
        case ConstraintOrigin::FirstStage: return "first_stage";
        case ConstraintOrigin::SecondStageSolution: return "second_stage";
        case ConstraintOrigin::ExpandedSolution: return "expanded";
    }
    return "unknown";
}

std::string master_kind_name(MasterState::Kind kind) {
    return kind == MasterState::Kind::MS ? "MS" : "MT";
}

MasterState make_master_state(MasterState::Kind kind, const CompatibilityGraph& g,
                              const UnitCatalog& catalog, const PolicyUnitSets& units,
                              const Matching& x_tilde, long long z_tilde_p, Budget budget,
                              bool adjacency_cuts_enabled) {
    MasterState state;
    state.kind = kind;
    state.g = &g;
    state.catalog = &catalog;
    state.units = &units;
    state.budget = budget;
    state.z_tilde_p = z_tilde_p;
    state.z_bar_q = z_tilde_p;
    state.adjacency_cuts_enabled = adjacency_cuts_enabled;
    push_trace(state, json{{"event", "state_created"},
                           {"kind", master_kind_name(kind)},
                           {"z_bar", z_tilde_p},
                           {"adjacency_cuts", adjacency_cuts_enabled},
                           {"budget_v", budget.r_v},
                           {"budget_a", budget.r_a}});
    add_solution_constraint(state, x_tilde.unit_ids, ConstraintOrigin::FirstStage,
                            Scenario::empty_for(g));
    add_ssf_row(state, x_tilde.unit_ids, z_tilde_p);
    return state;
}

int add_solution_constraint(MasterState& state, const std::vector<int>& unit_ids,
                            ConstraintOrigin origin, const Scenario& scenario) {
    CoveringConstraint row;
    row.origin = origin;
    row.scenario = scenario;
    row.unit_ids = unit_ids;
    std::sort(row.unit_ids.begin(), row.unit_ids.end());
    solution_elements(*state.g, *state.catalog, row.unit_ids, row.vertices, row.arcs);
    for (int id : row.unit_ids) {
        row.sorted_weights.push_back(state.units->weight[id]);
        row.weight_sum += state.units->weight[id];
    }
    std::sort(row.sorted_weights.begin(), row.sorted_weights.end(),
              std::greater<long long>());
    row.rhs = origin == ConstraintOrigin::ExpandedSolution
                  ? strengthen_rhs(row, state.z_bar_q)
                  : 1;

    for (int i = 0; i < static_cast<int>(state.constraints.size()); ++i) {
        const CoveringConstraint& seen = state.constraints[i];
        if (seen.origin == row.origin && seen.vertices == row.vertices &&
            seen.arcs == row.arcs && seen.sorted_weights == row.sorted_weights)
            return i;
    }

    const int id = static_cast<int>(state.constraints.size());
    state.constraints.push_back(std::move(row));
    const CoveringConstraint& stored = state.constraints.back();
    push_trace(state, json{{"event", "constraint_added"},
                           {"id", id},
                           {"origin", origin_name(origin)},
                           {"rhs", stored.rhs},
                           {"units", stored.unit_count()},
                           {"weights", stored.sorted_weights},
                           {"elements", element_names(state, stored)},
                           {"scenario", stored.scenario.to_string(*state.g)}});
    return id;
}

int strengthen_rhs(const CoveringConstraint& constraint, long long z_bar_q) {
    long long remaining = constraint.weight_sum;
    for (int t = 1; t <= constraint.unit_count(); ++t) {
        remaining -= constraint.sorted_weights[t - 1];
        if (remaining < z_bar_q) return t;
    }
    return constraint.unit_count() + 1;
}

void update_bound(MasterState& state, long long z_bar_q) {
    if (z_bar_q >= state.z_bar_q) return;
    push_trace(state, json{{"event", "z_bar_updated"},
                           {"old", state.z_bar_q},
                           {"new", z_bar_q}});
    state.z_bar_q = z_bar_q;
}

void restrengthen_all(MasterState& state) {
    for (int i = 0; i < static_cast<int>(state.constraints.size()); ++i) {
        CoveringConstraint& row = state.constraints[i];
        const int t = strengthen_rhs(row, state.z_bar_q);
        if (t == row.rhs) continue;
        push_trace(state, json{{"event", "rhs_updated"},
                               {"id", i},
                               {"old", row.rhs},
                               {"new", t},
                               {"z_bar", state.z_bar_q}});
        row.rhs = t;
    }
}

void accept_scenario(MasterState& state, const Scenario& scenario) {
    assert(!already_accepted(state, scenario));
    state.gamma_hat.push_back(scenario);
    push_trace(state, json{{"event", "scenario_accepted"},
                           {"index", static_cast<int>(state.gamma_hat.size()) - 1},
                           {"scenario", scenario.to_string(*state.g)}});
}

void add_ssf_row(MasterState& state, const std::vector<int>& unit_ids, long long z_star_r) {
    SsfRow row;
    row.unit_ids = unit_ids;
    std::sort(row.unit_ids.begin(), row.unit_ids.end());
    row.base = z_star_r;
    state.ssf_rows.push_back(std::move(row));
    push_trace(state, json{{"event", "ssf_row_added"},
                           {"units", static_cast<int>(state.ssf_rows.back().unit_ids.size())},
                           {"base", z_star_r}});
}

void install_dominance_cuts(MasterState& state,
                            const std::vector<std::pair<Scenario, Scenario>>& pairs) {
    for (const auto& [dominated, dominating] : pairs) {
        state.dominance_pairs.emplace_back(dominated, dominating);
        push_trace(state, json{{"event", "dominance_cut_added"},
                               {"dominated", dominated.to_string(*state.g)},
                               {"dominating", dominating.to_string(*state.g)}});
    }
}

FindScenarioResult find_scenario(MasterState& state, const SolveOptions& options) {
    FindScenarioResult out;
    const VarMap vm = covering_varmap(state);
    for (;;) {
        const BinaryProgram program = build_covering_program(state, vm);
        const SolveOutcome sol = solve(program, options);
        out.work += sol.work;
        if (sol.status == SolveStatus::TimeLimit) {
            out.hit_time_limit = true;
            push_trace(state, json{{"event", "master_time_limit"}});
            return out;
        }
        if (sol.status == SolveStatus::Infeasible) {
            push_trace(state,
                       json{{"event", "master_infeasible"}, {"z_bar", state.z_bar_q}});
            return out;
        }
        Scenario s = extract_scenario(state, vm, sol.assignment);
        assert(s.within(state.budget));
        if (already_accepted(state, s)) {
            state.no_goods.push_back(s);
            ++out.duplicates_rejected;
            push_trace(state, json{{"event", "duplicate_rejected"},
                                   {"scenario", s.to_string(*state.g)}});
            continue;
        }
        out.feasible = true;
        out.scenario = std::move(s);
        push_trace(state, json{{"event", "scenario_found"},
                               {"scenario", out.scenario.to_string(*state.g)}});
        return out;
    }
}

SsfResult solve_ssf(MasterState& state, const TransitoryGraph& transitory,
                    const SolveOptions& options) {
    SsfResult out;
    const CompatibilityGraph& g = *state.g;
    const UnitCatalog& catalog = *state.catalog;
    const std::vector<int> unit_ids = transitory.units.all_units();

    // Variable layout: objective bits, one alpha per transitory unit, one
    // gamma per transitory element.
    const int bits = std::max(
        1, static_cast<int>(std::bit_width(static_cast<unsigned long long>(state.z_tilde_p))));
    VarMap vm;
    vm.vertex_var.assign(g.num_vertices(), -1);
    vm.arc_var.assign(g.num_arcs(), -1);

    BinaryProgram p;
    p.sense = BinaryProgram::Sense::Maximize;
    std::vector<int> z_vars;
    for (int k = 0; k < bits; ++k) z_vars.push_back(p.add_var(-(1LL << k)));
    std::vector<int> alpha_var(catalog.size(), -1);
    for (int id : unit_ids) alpha_var[id] = p.add_var(0);
    for (int v = 0; v < g.num_vertices(); ++v)
        if (transitory.elements.vertex_in[v]) {
            vm.vertex_ids.push_back(v);
            vm.vertex_var[v] = p.add_var(0);
        }
    for (int a = 0; a < g.num_arcs(); ++a)
        if (transitory.elements.arc_in[a]) {
            vm.arc_ids.push_back(a);
            vm.arc_var[a] = p.add_var(0);
        }

    // Z >= base - sum of failed-unit weights, one row per cached solution.
    for (const SsfRow& cached : state.ssf_rows) {
        SparseRow row;
        row.sense = SparseRow::Sense::Ge;
        row.rhs = cached.base;
        for (int k = 0; k < bits; ++k) row.terms.emplace_back(z_vars[k], 1LL << k);
        for (int id : cached.unit_ids)
            row.terms.emplace_back(alpha_var[id], state.units->weight[id]);
        p.add_row(std::move(row));
    }

    // A unit may count as failed only when one of its elements fails.
    for (int id : unit_ids) {
        SparseRow row;
        row.sense = SparseRow::Sense::Le;
        row.rhs = 0;
        row.terms.emplace_back(alpha_var[id], 1);
        for (int v : catalog[id].vertices) row.terms.emplace_back(vm.vertex_var[v], -1);
        for (int a : catalog[id].arcs) row.terms.emplace_back(vm.arc_var[a], -1);
        p.add_row(std::move(row));
    }

    std::vector<int> vertex_vars;
    for (int v : vm.vertex_ids) vertex_vars.push_back(vm.vertex_var[v]);
    std::vector<int> arc_vars;
    for (int a : vm.arc_ids) arc_vars.push_back(vm.arc_var[a]);
    add_budget_rows(p, state.budget, vertex_vars, arc_vars);

    const int fixed_rows = static_cast<int>(p.constraints.size());
    for (;;) {
        p.constraints.resize(fixed_rows);
        add_no_good_rows(p, state.no_goods, vm.vertex_ids, vm.arc_ids, vm.vertex_var,
                         vm.arc_var);
        const SolveOutcome sol = solve(p, options);
        out.work += sol.work;
        if (sol.status == SolveStatus::TimeLimit) {
            out.hit_time_limit = true;
            push_trace(state, json{{"event", "ssf_time_limit"}});
            return out;
        }
        if (sol.status == SolveStatus::Infeasible) {
            push_trace(state, json{{"event", "ssf_infeasible"}});
            return out;
        }
        long long z_lower = 0;
        for (int k = 0; k < bits; ++k)
            if (sol.assignment[z_vars[k]]) z_lower += 1LL << k;
        Scenario s = extract_scenario(state, vm, sol.assignment);
        assert(s.within(state.budget));
        if (already_accepted(state, s)) {
            state.no_goods.push_back(s);
            ++out.duplicates_rejected;
            push_trace(state, json{{"event", "duplicate_rejected"},
                                   {"scenario", s.to_string(*state.g)}});
            continue;
        }
        out.feasible = true;
        out.z_lower = z_lower;
        out.scenario = std::move(s);
        push_trace(state, json{{"event", "ssf_solved"},
                               {"z_lower", z_lower},
                               {"scenario", out.scenario.to_string(*state.g)}});
        return out;
    }
}

}  // namespace kepro
