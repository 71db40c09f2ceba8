#include "kepro/robust_model.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <chrono>
#include <utility>

#include <json.hpp>

namespace kepro {

namespace {

using nlohmann::json;

class PhaseScope {
  public:
    explicit PhaseScope(PhaseBreakdown& phase)
        : phase_(phase), start_(std::chrono::steady_clock::now()) {}
    ~PhaseScope() {
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        phase_.seconds += elapsed.count();
    }
    PhaseScope(const PhaseScope&) = delete;
    PhaseScope& operator=(const PhaseScope&) = delete;

  private:
    PhaseBreakdown& phase_;
    std::chrono::steady_clock::time_point start_;
};

// Continuity rows anchor out-arcs at position l+1 to in-arcs at position l.
// The sound index set is {1..L-1}; the literal variant reproduces the printed
// {1..L} minus {L-1}, whose l = L row is vacuous.
std::vector<int> continuity_positions(int L, bool literal) {
    std::vector<int> out;
    for (int l = 1; l <= (literal ? L : L - 1); ++l) {
        if (literal && l == L - 1) continue;
        out.push_back(l);
    }
    return out;
}

// Position slot of `position` within the arc's feasible set, or -1.
int position_slot(const PositionIndex& positions, int arc, int position) {
    const std::vector<int>& set = positions.arc_positions[arc];
    for (std::size_t s = 0; s < set.size(); ++s)
        if (set[s] == position) return static_cast<int>(s);
    return -1;
}

struct CycleLookup {
    std::vector<std::vector<int>> by_vertex;  // pair vertex -> catalog cycle ids
    std::vector<std::vector<int>> by_arc;     // arc id -> catalog cycle ids
};

CycleLookup cycle_lookup(const CompatibilityGraph& g, const UnitCatalog& catalog) {
    CycleLookup lookup;
    lookup.by_vertex.assign(g.num_vertices(), {});
    lookup.by_arc.assign(g.num_arcs(), {});
    for (int c = 0; c < catalog.size(); ++c) {
        if (catalog[c].kind != ExchangeUnit::Kind::Cycle) continue;
        for (int v : catalog[c].vertices) lookup.by_vertex[v].push_back(c);
        for (int a : catalog[c].arcs) lookup.by_arc[a].push_back(c);
    }
    return lookup;
}

}  // namespace

PositionIndex compute_position_index(const CompatibilityGraph& g, int L) {
    PositionIndex idx;
    idx.L = L;
    idx.arc_positions.assign(g.num_arcs(), {});
    idx.position_arcs.assign(static_cast<std::size_t>(std::max(L, 0)), {});
    if (L < 1) return idx;

    // level[v][d]: a walk of d arcs from some donor ends at v. Donors seed
    // d = 0; arcs into donors never extend a chain.
    std::vector<std::vector<std::uint8_t>> level(
        g.num_vertices(), std::vector<std::uint8_t>(static_cast<std::size_t>(L), 0));
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.is_ndd(v)) level[v][0] = 1;
    for (int d = 0; d + 1 <= L - 1; ++d)
        for (int a = 0; a < g.num_arcs(); ++a) {
            const ArcRecord& arc = g.arcs[a];
            if (!g.is_pair(arc.to)) continue;
            if (level[arc.from][d]) level[arc.to][d + 1] = 1;
        }
    for (int a = 0; a < g.num_arcs(); ++a) {
        const ArcRecord& arc = g.arcs[a];
        if (!g.is_pair(arc.to)) continue;
        for (int d = 0; d <= L - 1; ++d)
            if (level[arc.from][d]) {
                idx.arc_positions[a].push_back(d + 1);
                idx.position_arcs[d].push_back(a);
            }
    }
    return idx;
}

RobustPicefModel build_fsf(const CompatibilityGraph& g, const UnitCatalog& catalog,
                           const PositionIndex& positions, Policy policy,
                           const std::vector<Scenario>& scenarios,
                           const FsfOptions& options) {
    RobustPicefModel m;
    BinaryProgram& p = m.program;
    const bool deterministic = scenarios.empty();
    const CycleLookup cycles = cycle_lookup(g, catalog);
    const std::vector<int> continuity = continuity_positions(positions.L, options.literal_chainpos);

    // First-stage variables. In the deterministic case the objective counts
    // covered pairs directly: every cycle vertex is a pair, and each chain
    // arc covers the pair at its head.
    m.cycle_var.assign(catalog.size(), -1);
    for (int c = 0; c < catalog.size(); ++c)
        if (catalog[c].kind == ExchangeUnit::Kind::Cycle)
            m.cycle_var[c] =
                p.add_var(deterministic ? static_cast<long long>(catalog[c].vertices.size()) : 0);
    m.delta_var.assign(g.num_arcs(), {});
    for (int a = 0; a < g.num_arcs(); ++a)
        for (std::size_t s = 0; s < positions.arc_positions[a].size(); ++s)
            m.delta_var[a].push_back(p.add_var(deterministic ? 1 : 0));

    auto first_stage_coverage = [&](int v, SparseRow& row, long long sign) {
        for (int c : cycles.by_vertex[v]) row.terms.emplace_back(m.cycle_var[c], sign);
        for (int a : g.in_arcs[v])
            for (int var : m.delta_var[a]) row.terms.emplace_back(var, sign);
    };

    // First-stage matching rows: donor out-degree, pair capacity, chain
    // continuity.
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!g.is_ndd(v)) continue;
        SparseRow row;
        for (int a : g.out_arcs[v]) {
            int slot = position_slot(positions, a, 1);
            if (slot >= 0) row.terms.emplace_back(m.delta_var[a][slot], 1);
        }
        if (row.terms.empty()) continue;
        row.sense = SparseRow::Sense::Le;
        row.rhs = 1;
        p.add_row(std::move(row));
    }
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!g.is_pair(v)) continue;
        SparseRow row;
        first_stage_coverage(v, row, 1);
        if (row.terms.empty()) continue;
        row.sense = SparseRow::Sense::Le;
        row.rhs = 1;
        p.add_row(std::move(row));
    }
    auto add_continuity = [&](const std::vector<std::vector<int>>& delta) {
        for (int v = 0; v < g.num_vertices(); ++v) {
            if (!g.is_pair(v)) continue;
            for (int l : continuity) {
                SparseRow row;
                for (int a : g.out_arcs[v]) {
                    int slot = position_slot(positions, a, l + 1);
                    if (slot >= 0) row.terms.emplace_back(delta[a][slot], 1);
                }
                if (row.terms.empty()) continue;  // no out-arc can sit at l+1
                for (int a : g.in_arcs[v]) {
                    int slot = position_slot(positions, a, l);
                    if (slot >= 0) row.terms.emplace_back(delta[a][slot], -1);
                }
                row.sense = SparseRow::Sense::Le;
                row.rhs = 0;
                p.add_row(std::move(row));
            }
        }
    };
    add_continuity(m.delta_var);

    if (deterministic) return m;

    // Objective bits: Z = sum 2^k bits, bounded per scenario by the pairs
    // covered in both stages.
    m.z_bits = std::max(
        1, static_cast<int>(std::bit_width(static_cast<unsigned long long>(g.num_pairs()))));
    for (int k = 0; k < m.z_bits; ++k) m.z_bit_var.push_back(p.add_var(1LL << k));

    for (const Scenario& gamma : scenarios) {
        // Recourse block variables for this scenario.
        std::vector<int> zc(catalog.size(), -1);
        for (int c = 0; c < catalog.size(); ++c)
            if (catalog[c].kind == ExchangeUnit::Kind::Cycle) zc[c] = p.add_var(0);
        std::vector<std::vector<int>> delta(g.num_arcs());
        for (int a = 0; a < g.num_arcs(); ++a)
            for (std::size_t s = 0; s < positions.arc_positions[a].size(); ++s)
                delta[a].push_back(p.add_var(0));
        std::vector<int> t(g.num_vertices(), -1);
        for (int v = 0; v < g.num_vertices(); ++v)
            if (g.is_pair(v)) t[v] = p.add_var(0);

        auto recourse_coverage = [&](int v, SparseRow& row, long long sign) {
            for (int c : cycles.by_vertex[v]) row.terms.emplace_back(zc[c], sign);
            for (int a : g.in_arcs[v])
                for (int var : delta[a]) row.terms.emplace_back(var, sign);
        };

        for (int v = 0; v < g.num_vertices(); ++v) {
            if (!g.is_pair(v)) continue;
            // Recovered only if selected in the first stage...
            SparseRow first;
            first.terms.emplace_back(t[v], 1);
            first_stage_coverage(v, first, -1);
            first.sense = SparseRow::Sense::Le;
            first.rhs = 0;
            p.add_row(std::move(first));
            // ...and again in the recourse under this scenario.
            SparseRow second;
            second.terms.emplace_back(t[v], 1);
            recourse_coverage(v, second, -1);
            second.sense = SparseRow::Sense::Le;
            second.rhs = 0;
            p.add_row(std::move(second));
        }
        for (int v = 0; v < g.num_vertices(); ++v) {
            if (g.is_ndd(v)) {
                SparseRow row;
                for (int a : g.out_arcs[v]) {
                    int slot = position_slot(positions, a, 1);
                    if (slot >= 0) row.terms.emplace_back(delta[a][slot], 1);
                }
                if (row.terms.empty()) continue;
                row.sense = SparseRow::Sense::Le;
                row.rhs = 1 - gamma.vertex_fail[v];
                p.add_row(std::move(row));
            } else {
                SparseRow row;
                recourse_coverage(v, row, 1);
                if (row.terms.empty()) continue;
                row.sense = SparseRow::Sense::Le;
                row.rhs = 1 - gamma.vertex_fail[v];
                p.add_row(std::move(row));
            }
        }
        for (int a = 0; a < g.num_arcs(); ++a) {
            SparseRow row;
            for (int c : cycles.by_arc[a]) row.terms.emplace_back(zc[c], 1);
            for (int var : delta[a]) row.terms.emplace_back(var, 1);
            if (row.terms.empty()) continue;
            row.sense = SparseRow::Sense::Le;
            row.rhs = 1 - gamma.arc_fail[a];
            p.add_row(std::move(row));
        }
        add_continuity(delta);

        if (policy == Policy::FirstStageOnly) {
            // Recourse may only reuse first-stage vertices: pairs by the
            // printed recovery row, donors by its chain-start analog.
            for (int v = 0; v < g.num_vertices(); ++v) {
                if (g.is_pair(v)) {
                    SparseRow row;
                    recourse_coverage(v, row, 1);
                    first_stage_coverage(v, row, -1);
                    if (row.terms.empty()) continue;
                    row.sense = SparseRow::Sense::Le;
                    row.rhs = 0;
                    p.add_row(std::move(row));
                } else {
                    SparseRow row;
                    for (int a : g.out_arcs[v]) {
                        int slot = position_slot(positions, a, 1);
                        if (slot < 0) continue;
                        row.terms.emplace_back(delta[a][slot], 1);
                        row.terms.emplace_back(m.delta_var[a][slot], -1);
                    }
                    if (row.terms.empty()) continue;
                    row.sense = SparseRow::Sense::Le;
                    row.rhs = 0;
                    p.add_row(std::move(row));
                }
            }
        }

        // The objective is bound by the pairs recovered under this scenario.
        SparseRow bind;
        for (int k = 0; k < m.z_bits; ++k) bind.terms.emplace_back(m.z_bit_var[k], 1LL << k);
        for (int v = 0; v < g.num_vertices(); ++v)
            if (t[v] >= 0) bind.terms.emplace_back(t[v], -1);
        bind.sense = SparseRow::Sense::Le;
        bind.rhs = 0;
        p.add_row(std::move(bind));
    }
    return m;
}

DecodedFirstStage decode_fsf_matching(const RobustPicefModel& model,
                                      const CompatibilityGraph& g, const UnitCatalog& catalog,
                                      const PositionIndex& positions,
                                      const std::vector<std::uint8_t>& assignment) {
    DecodedFirstStage out;
    for (int c = 0; c < catalog.size(); ++c)
        if (model.cycle_var[c] >= 0 && assignment[model.cycle_var[c]])
            out.matching.unit_ids.push_back(c);

    std::vector<std::vector<std::uint8_t>> selected(g.num_arcs());
    int selected_total = 0;
    for (int a = 0; a < g.num_arcs(); ++a) {
        selected[a].resize(model.delta_var[a].size(), 0);
        for (std::size_t s = 0; s < model.delta_var[a].size(); ++s) {
            selected[a][s] = assignment[model.delta_var[a][s]];
            selected_total += selected[a][s];
        }
    }

    int walked = 0;
    for (int n = 0; n < g.num_vertices(); ++n) {
        if (!g.is_ndd(n)) continue;
        std::vector<int> path{n};
        int cur = n;
        int pos = 1;
        while (true) {
            int next = -1;
            int next_slot = -1;
            for (int a : g.out_arcs[cur]) {
                int slot = position_slot(positions, a, pos);
                if (slot >= 0 && selected[a][static_cast<std::size_t>(slot)]) {
                    next = a;
                    next_slot = slot;
                    break;  // capacity and continuity make this unique
                }
            }
            if (next < 0) break;
            selected[next][static_cast<std::size_t>(next_slot)] = 0;
            ++walked;
            path.push_back(g.arcs[next].to);
            cur = g.arcs[next].to;
            ++pos;
        }
        if (path.size() < 2) continue;
        int unit = -1;
        for (int c = 0; c < catalog.size(); ++c)
            if (catalog[c].kind == ExchangeUnit::Kind::Chain && catalog[c].vertices == path) {
                unit = c;
                break;
            }
        assert(unit >= 0);
        out.matching.unit_ids.push_back(unit);
    }
    std::sort(out.matching.unit_ids.begin(), out.matching.unit_ids.end());
    out.orphan_arcs = selected_total - walked;
    return out;
}

RobustRun solve_robust(const CompatibilityGraph& g, int K, int L, Policy policy,
                       Budget budget, const RobustConfig& config) {
    UnitCatalog catalog = build_catalog(g, K, L);
    PositionIndex positions = compute_position_index(g, L);
    RobustRun run;
    SolveOptions fs_options;
    fs_options.deadline = config.second_stage.deadline;
    fs_options.seed = config.second_stage.seed;
    run.log.push_back(json{{"event", "robust_started"},
                           {"algorithm", algorithm_name(config.second_stage.algorithm)},
                           {"policy", policy_name(policy)},
                           {"K", K},
                           {"L", L},
                           {"budget_v", budget.r_v},
                           {"budget_a", budget.r_a}}
                          .dump());

    while (true) {
        RobustPicefModel model = build_fsf(g, catalog, positions, policy, run.scenarios,
                                           config.fsf);
        SolveOutcome fs;
        {
            PhaseScope timer(run.first_stage);
            fs = solve(model.program, fs_options);
        }
        run.first_stage.work += fs.work;
        if (fs.status == SolveStatus::TimeLimit) {
            run.hit_time_limit = true;
            break;
        }
        if (fs.status != SolveStatus::Optimal)
            throw Error(ErrorKind::Internal, "first-stage model unexpectedly infeasible");
        DecodedFirstStage decoded =
            decode_fsf_matching(model, g, catalog, positions, fs.assignment);
        long long z_tilde_p = fs.objective_value;

        SecondStageResult ss = solve_second_stage(g, catalog, decoded.matching, z_tilde_p,
                                                  policy, budget, L, config.second_stage);
        json units = json::array();
        for (int id : decoded.matching.unit_ids) units.push_back(catalog[id].to_string(g));
        run.log.push_back(json{{"event", "iteration"},
                               {"iter", run.first_stage_iters() + 1},
                               {"x_tilde", units},
                               {"z_tilde_p", z_tilde_p},
                               {"z_q_star", ss.z_q_star},
                               {"gamma_star", ss.worst_case.to_string(g)},
                               {"orphan_arcs", decoded.orphan_arcs}}
                              .dump());
        run.iterations.push_back(
            RobustIteration{std::move(decoded.matching), z_tilde_p, std::move(ss)});
        const RobustIteration& last = run.iterations.back();
        run.x_star = last.x_tilde;
        run.z_p_star = last.z_tilde_p;
        if (last.second_stage.hit_time_limit) {
            run.hit_time_limit = true;
            break;
        }
        if (last.second_stage.z_q_star >= last.z_tilde_p) {
            run.optimal = true;
            break;
        }
        run.scenarios.push_back(last.second_stage.worst_case);
    }
    run.log.push_back(json{{"event", "robust_finished"},
                           {"optimal", run.optimal},
                           {"z_p_star", run.z_p_star},
                           {"first_stage_iters", run.first_stage_iters()},
                           {"scenarios", static_cast<int>(run.scenarios.size())}}
                          .dump());
    return run;
}

SecondStageStats sum_stats(const RobustRun& run) {
    SecondStageStats total;
    auto add_phase = [](PhaseBreakdown& into, const PhaseBreakdown& from) {
        into.work += from.work;
        into.seconds += from.seconds;
    };
    for (const RobustIteration& it : run.iterations) {
        const SecondStageStats& s = it.second_stage.stats;
        total.scenarios_accepted += s.scenarios_accepted;
        total.heuristic_true += s.heuristic_true;
        total.master_mip += s.master_mip;
        total.ssf_scenarios += s.ssf_scenarios;
        total.initial_overrides += s.initial_overrides;
        total.cg_true += s.cg_true;
        total.re_solves += s.re_solves;
        total.ssf_solves += s.ssf_solves;
        total.dominated_rejections += s.dominated_rejections;
        add_phase(total.heuristic, s.heuristic);
        add_phase(total.master, s.master);
        add_phase(total.recourse, s.recourse);
        add_phase(total.colgen, s.colgen);
        add_phase(total.ssf, s.ssf);
    }
    return total;
}

}  // namespace kepro
