#include "kepro/second_stage.hpp"

#include <chrono>
#include <utility>

#include <json.hpp>

#include "kepro/heuristic.hpp"
#include "kepro/master.hpp"
#include "kepro/recourse.hpp"

namespace kepro {

namespace {

using nlohmann::json;

MasterState::Kind kind_for(SecondStageAlgorithm algorithm) {
    switch (algorithm) {
        case SecondStageAlgorithm::FBSA_ME:
        case SecondStageAlgorithm::HSA_ME:
            return MasterState::Kind::MT;
        default:
            return MasterState::Kind::MS;
    }
}

bool is_hybrid(SecondStageAlgorithm algorithm) {
    return algorithm == SecondStageAlgorithm::HSA_MB ||
           algorithm == SecondStageAlgorithm::HSA_ME;
}

// FBSA_MB prices Model (R) directly; the ME variants and both hybrids run the
// expanded model, so every exact colgen round yields a full solution to store.
bool uses_expanded_colgen(SecondStageAlgorithm algorithm) {
    return algorithm != SecondStageAlgorithm::BasicCovering &&
           algorithm != SecondStageAlgorithm::FBSA_MB;
}

enum class CandidateSource { Override, Heuristic, Master, Ssf };

const char* source_label(CandidateSource source) {
    switch (source) {
        case CandidateSource::Override: return "override";
        case CandidateSource::Heuristic: return "heuristic";
        case CandidateSource::Master: return "master";
        case CandidateSource::Ssf: return "ssf";
    }
    return "?";
}

// Accumulates wall-clock seconds into one phase for the lifetime of one call.
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

// Exact recourse outcome for one accepted scenario.
struct Evaluation {
    bool ok = false;  // false: a time limit interrupted the evaluation
    long long z_star_r = 0;
    std::vector<int> surviving;  // y*: surviving selection attaining z_star_r
    std::vector<int> expanded;   // psi*: full expanded optimum; empty on MIP fallback
};

struct Driver {
    const CompatibilityGraph& g;
    const UnitCatalog& catalog;
    const Matching& x_tilde;
    const AlgorithmConfig& config;
    Budget budget;
    int L;

    TransitoryGraph transitory;
    MasterState state;
    SecondStageResult out;
    Scenario incumbent;
    SolveOptions engine_options;
    std::uint64_t heuristic_calls = 0;
    long long z_lower = 0;
    std::string finish_reason = "master_infeasible";

    Driver(const CompatibilityGraph& g_, const UnitCatalog& catalog_, const Matching& x_tilde_,
           long long z_tilde_p, Policy policy, Budget budget_, int L_,
           const AlgorithmConfig& config_)
        : g(g_),
          catalog(catalog_),
          x_tilde(x_tilde_),
          config(config_),
          budget(budget_),
          L(L_),
          transitory(build_transitory(g_, catalog_, x_tilde_, policy)),
          state(make_master_state(kind_for(config_.algorithm), g_, catalog_, transitory.units,
                                  x_tilde_, z_tilde_p, budget_, config_.adjacency_cuts)),
          incumbent(Scenario::empty_for(g_)) {
        engine_options.deadline = config.deadline;
        engine_options.seed = config.seed;
        trace(json{{"event", "second_stage_started"},
                   {"algorithm", algorithm_name(config.algorithm)},
                   {"policy", policy_name(policy)},
                   {"tr", is_hybrid(config.algorithm) ? json(config.tr) : json()},
                   {"budget_v", budget.r_v},
                   {"budget_a", budget.r_a}});
    }

    void trace(json line) { state.trace.push_back(line.dump()); }

    bool fresh(const Scenario& gamma) const {
        for (const Scenario& seen : state.gamma_hat)
            if (seen == gamma) return false;
        return true;
    }

    void mark_time_limit() {
        out.hit_time_limit = true;
        finish_reason = "time_limit";
    }

    void consume(const Scenario& gamma, CandidateSource source) {
        trace(json{{"event", "scenario_source"},
                   {"iter", out.stats.scenarios_accepted + 1},
                   {"source", source_label(source)}});
        accept_scenario(state, gamma);
        ++out.stats.scenarios_accepted;
        switch (source) {
            case CandidateSource::Override: ++out.stats.initial_overrides; break;
            case CandidateSource::Heuristic: ++out.stats.heuristic_true; break;
            case CandidateSource::Master: ++out.stats.master_mip; break;
            case CandidateSource::Ssf: ++out.stats.ssf_scenarios; break;
        }
    }

    std::optional<Scenario> take_override() {
        if (!config.initial_scenario) return std::nullopt;
        const Scenario& forced = *config.initial_scenario;
        if (forced.vertex_fail.size() != static_cast<std::size_t>(g.num_vertices()) ||
            forced.arc_fail.size() != static_cast<std::size_t>(g.num_arcs()))
            throw Error(ErrorKind::Validation, "initial scenario does not match the instance");
        if (!forced.within(budget) || forced.is_empty())
            throw Error(ErrorKind::Validation,
                        "initial scenario must be non-empty and within the failure budget");
        return forced;
    }

    std::optional<Scenario> heuristic_candidate() {
        HeuristicOutcome h;
        {
            PhaseScope timer(out.stats.heuristic);
            h = run_heuristic(g, catalog, state.constraints, budget, transitory,
                              config.seed + heuristic_calls++);
        }
        out.stats.dominated_rejections += h.dominated_rejections;
        if (h.cover && fresh(h.scenario)) return h.scenario;
        return std::nullopt;
    }

    std::optional<Scenario> master_candidate() {
        FindScenarioResult res;
        {
            PhaseScope timer(out.stats.master);
            res = find_scenario(state, engine_options);
        }
        out.stats.master.work += res.work;
        if (res.hit_time_limit) {
            mark_time_limit();
            return std::nullopt;
        }
        if (!res.feasible) {
            finish_reason = "master_infeasible";
            return std::nullopt;
        }
        return res.scenario;
    }

    // One SSF round: refreshes the lower bound and returns its attaining
    // scenario, or nothing when a certificate ends the run (bound reached, or
    // every remaining scenario excluded).
    std::optional<Scenario> ssf_candidate() {
        SsfResult res;
        {
            PhaseScope timer(out.stats.ssf);
            res = solve_ssf(state, transitory, engine_options);
        }
        out.stats.ssf.work += res.work;
        if (res.hit_time_limit) {
            mark_time_limit();
            return std::nullopt;
        }
        ++out.stats.ssf_solves;
        if (!res.feasible) {
            finish_reason = "ssf_certified";
            return std::nullopt;
        }
        z_lower = res.z_lower;
        trace(json{{"event", "ssf_bound"}, {"z_lower", z_lower}, {"z_bar", state.z_bar_q}});
        if (z_lower >= state.z_bar_q) {
            finish_reason = "ssf_certified";
            return std::nullopt;
        }
        return res.scenario;
    }

    // Exact recourse for the scenario just accepted: column generation first,
    // a recourse MIP when the relaxation leaves a gap. Solution rows are
    // stored eagerly; the master deduplicates repeats. The expanded solution
    // becomes a tight-master row only under MT and an SSF row only for the
    // hybrids, and the MIP fallback stores no expanded solution at all.
    Evaluation evaluate(const Scenario& gamma) {
        Evaluation ev;
        const bool expanded = uses_expanded_colgen(config.algorithm);
        ColGenOutcome cg;
        {
            PhaseScope timer(out.stats.colgen);
            cg = expanded ? colgen_RE(g, catalog, transitory.units, gamma, L, engine_options)
                          : colgen_R(g, catalog, transitory.units, gamma, L, engine_options);
        }
        out.stats.colgen.work += cg.work;
        if (cg.hit_time_limit) {
            mark_time_limit();
            return ev;
        }
        if (cg.upper_bound == Rational(cg.integral_value)) {
            ++out.stats.cg_true;
            ev.z_star_r = cg.solution.value;
            if (expanded) {
                ev.expanded = cg.solution.selected;
                for (int id : ev.expanded)
                    if (!unit_fails(catalog[id], gamma)) ev.surviving.push_back(id);
            } else {
                ev.surviving = cg.solution.selected;
            }
        } else {
            RecourseOutcome rec;
            {
                PhaseScope timer(out.stats.recourse);
                rec = solve_recourse_R(g, catalog, transitory.units, gamma, engine_options);
            }
            out.stats.recourse.work += rec.work;
            ++out.stats.re_solves;
            if (rec.hit_time_limit) {
                mark_time_limit();
                return ev;
            }
            ev.z_star_r = rec.solution.value;
            ev.surviving = rec.solution.selected;
        }
        if (!ev.surviving.empty())
            add_solution_constraint(state, ev.surviving, ConstraintOrigin::SecondStageSolution,
                                    gamma);
        if (!ev.expanded.empty()) {
            if (state.kind == MasterState::Kind::MT)
                add_solution_constraint(state, ev.expanded, ConstraintOrigin::ExpandedSolution,
                                        gamma);
            if (is_hybrid(config.algorithm)) add_ssf_row(state, ev.expanded, ev.z_star_r);
        }
        ev.ok = true;
        return ev;
    }

    void improve_bound(const Scenario& gamma, long long z_star_r, bool restrengthen) {
        if (z_star_r >= state.z_bar_q) return;
        update_bound(state, z_star_r);
        incumbent = gamma;
        if (restrengthen) restrengthen_all(state);
    }

    SecondStageResult finish() {
        out.z_q_star = state.z_bar_q;
        out.worst_case = incumbent;
        trace(json{{"event", "second_stage_finished"},
                   {"reason", finish_reason},
                   {"z_q_star", out.z_q_star},
                   {"scenarios", out.stats.scenarios_accepted},
                   {"worst_case", out.worst_case.to_string(g)}});
        out.trace = std::move(state.trace);
        return std::move(out);
    }

    // Unstrengthened baseline: every candidate comes from the covering
    // master, the recourse is a direct MIP and rows keep their initial rhs.
    SecondStageResult run_basic() {
        std::optional<Scenario> cand = take_override();
        CandidateSource source = CandidateSource::Override;
        if (!cand) {
            cand = master_candidate();
            source = CandidateSource::Master;
        }
        while (cand) {
            if (config.deadline.expired()) {
                mark_time_limit();
                break;
            }
            consume(*cand, source);
            RecourseOutcome rec;
            {
                PhaseScope timer(out.stats.recourse);
                rec = solve_recourse_R(g, catalog, transitory.units, *cand, engine_options);
            }
            out.stats.recourse.work += rec.work;
            ++out.stats.re_solves;
            if (rec.hit_time_limit) {
                mark_time_limit();
                break;
            }
            if (!rec.solution.selected.empty())
                add_solution_constraint(state, rec.solution.selected,
                                        ConstraintOrigin::SecondStageSolution, *cand);
            improve_bound(*cand, rec.solution.value, /*restrengthen=*/false);
            cand = master_candidate();
            source = CandidateSource::Master;
        }
        return finish();
    }

    // Strengthened loop shared by the feasibility-seeking and hybrid
    // algorithms: heuristic candidates while they cover and are fresh, master
    // MIP otherwise, and for the hybrids the SSF relaxation from iteration tr
    // onward.
    SecondStageResult run_covering() {
        const bool hybrid = is_hybrid(config.algorithm);
        int iter = 0;
        std::optional<Scenario> cand = take_override();
        CandidateSource source = CandidateSource::Override;
        if (!cand) {
            cand = heuristic_candidate();
            source = CandidateSource::Heuristic;
            if (!cand) {
                cand = master_candidate();
                source = CandidateSource::Master;
            }
        }
        while (cand) {
            if (config.deadline.expired()) {
                mark_time_limit();
                break;
            }
            ++iter;
            consume(*cand, source);
            Evaluation ev = evaluate(*cand);
            if (!ev.ok) break;
            improve_bound(*cand, ev.z_star_r, /*restrengthen=*/true);
            cand.reset();
            if (hybrid && iter >= config.tr) {
                cand = ssf_candidate();
                source = CandidateSource::Ssf;
            } else {
                cand = heuristic_candidate();
                source = CandidateSource::Heuristic;
                if (!cand) {
                    cand = master_candidate();
                    source = CandidateSource::Master;
                }
            }
        }
        return finish();
    }
};

}  // namespace

std::string algorithm_name(SecondStageAlgorithm algorithm) {
    switch (algorithm) {
        case SecondStageAlgorithm::BasicCovering: return "basic";
        case SecondStageAlgorithm::FBSA_MB: return "fbsa-mb";
        case SecondStageAlgorithm::FBSA_ME: return "fbsa-me";
        case SecondStageAlgorithm::HSA_MB: return "hsa-mb";
        case SecondStageAlgorithm::HSA_ME: return "hsa-me";
    }
    return "?";
}

std::optional<SecondStageAlgorithm> algorithm_from_name(const std::string& name) {
    if (name == "basic") return SecondStageAlgorithm::BasicCovering;
    if (name == "fbsa-mb") return SecondStageAlgorithm::FBSA_MB;
    if (name == "fbsa-me") return SecondStageAlgorithm::FBSA_ME;
    if (name == "hsa-mb") return SecondStageAlgorithm::HSA_MB;
    if (name == "hsa-me") return SecondStageAlgorithm::HSA_ME;
    return std::nullopt;
}

SecondStageResult solve_second_stage(const CompatibilityGraph& g, const UnitCatalog& catalog,
                                     const Matching& x_tilde, long long z_tilde_p,
                                     Policy policy, Budget budget, int L,
                                     const AlgorithmConfig& config) {
    if (is_hybrid(config.algorithm) && config.tr < 1)
        throw Error(ErrorKind::Validation, "tr must be at least 1 for the hybrid algorithms");
    Driver driver(g, catalog, x_tilde, z_tilde_p, policy, budget, L, config);
    if (config.algorithm == SecondStageAlgorithm::BasicCovering) return driver.run_basic();
    return driver.run_covering();
}

}  // namespace kepro
