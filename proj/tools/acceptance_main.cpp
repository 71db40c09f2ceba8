// Acceptance suite: checks the library end to end against its reference
// values and properties, one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kepro/cli.hpp"
#include "kepro/common.hpp"
#include "kepro/enumeration.hpp"
#include "kepro/instance.hpp"
#include "kepro/master.hpp"
#include "kepro/oracle.hpp"
#include "kepro/recourse.hpp"
#include "kepro/robust_model.hpp"
#include "kepro/scenario.hpp"
#include "kepro/second_stage.hpp"

using namespace kepro;

namespace {

struct Check {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
    void expect(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(1);
    out << s << "s";
    return out.str();
}

int unit_with_vertices(const CompatibilityGraph& g, const UnitCatalog& catalog,
                       std::vector<long long> external_ids) {
    std::sort(external_ids.begin(), external_ids.end());
    for (const ExchangeUnit& unit : catalog.units) {
        std::vector<long long> ids;
        for (int v : unit.vertices) ids.push_back(g.vertices[v].id);
        std::sort(ids.begin(), ids.end());
        if (ids == external_ids) return unit.id;
    }
    throw Error(ErrorKind::Internal, "no catalog unit with the requested vertices");
}

Matching reference_matching(const CompatibilityGraph& g, const UnitCatalog& catalog) {
    Matching x;
    x.unit_ids = {
        unit_with_vertices(g, catalog, {1, 5, 6}),
        unit_with_vertices(g, catalog, {2, 9, 10}),
        unit_with_vertices(g, catalog, {3, 4}),
    };
    std::sort(x.unit_ids.begin(), x.unit_ids.end());
    return x;
}

Scenario scenario_v2_a56(const CompatibilityGraph& g) {
    Scenario s = Scenario::empty_for(g);
    s.vertex_fail[g.vertex_index(2)] = 1;
    s.arc_fail[g.arc_index(g.vertex_index(5), g.vertex_index(6))] = 1;
    return s;
}

// A deterministic first stage for a sampled instance: the plain model's
// optimum and its decoded matching. A zero value reports an empty matching.
struct DetSolution {
    Matching matching;
    long long value = 0;
};

DetSolution det_first_stage(const CompatibilityGraph& g, const UnitCatalog& catalog, int L) {
    PositionIndex positions = compute_position_index(g, L);
    RobustPicefModel model = build_fsf(g, catalog, positions, Policy::FullRecourse, {});
    SolveOutcome outcome = solve(model.program);
    if (outcome.status != SolveStatus::Optimal)
        throw Error(ErrorKind::Internal, "deterministic first stage did not solve");
    DetSolution det;
    det.value = outcome.objective_value;
    det.matching = decode_fsf_matching(model, g, catalog, positions, outcome.assignment).matching;
    return det;
}

// Shared sample: one desk-scale instance with its first stage solved.
struct SampleCase {
    CompatibilityGraph g;
    UnitCatalog catalog;
    Matching x_tilde;
    long long z_tilde_p = 0;
    int K = 3;
    int L = 2;
};

// Deterministically samples an instance with a nonempty first stage and at
// most `max_arcs` arcs. Returns false when the seed's draw is unusable.
bool sample_case(std::uint64_t seed, int pairs, int ndds, double density, int K, int L,
                 int max_arcs, SampleCase& out) {
    GenSpec spec;
    spec.pairs = pairs;
    spec.ndds = ndds;
    spec.density = density;
    spec.pra_high_share = 0.25;
    spec.seed = seed;
    std::istringstream in(generate_instance_json(spec));
    CompatibilityGraph g = parse_instance(in, InstanceFormat::Json);
    if (g.num_arcs() == 0 || g.num_arcs() > max_arcs) return false;
    UnitCatalog catalog = build_catalog(g, K, L);
    if (catalog.size() == 0) return false;
    DetSolution det = det_first_stage(g, catalog, L);
    if (det.value == 0) return false;
    out.g = std::move(g);
    out.catalog = std::move(catalog);
    out.x_tilde = det.matching;
    out.z_tilde_p = det.value;
    out.K = K;
    out.L = L;
    return true;
}

SecondStageResult run_second_stage(const SampleCase& c, Policy policy, Budget budget,
                                   SecondStageAlgorithm algorithm,
                                   bool adjacency_cuts = true) {
    AlgorithmConfig config;
    config.algorithm = algorithm;
    config.adjacency_cuts = adjacency_cuts;
    return solve_second_stage(c.g, c.catalog, c.x_tilde, c.z_tilde_p, policy, budget, c.L,
                              config);
}

const std::vector<SecondStageAlgorithm> kAllAlgorithms = {
    SecondStageAlgorithm::BasicCovering, SecondStageAlgorithm::FBSA_MB,
    SecondStageAlgorithm::FBSA_ME,       SecondStageAlgorithm::HSA_MB,
    SecondStageAlgorithm::HSA_ME,
};

// ---------------------------------------------------------------------------
// Criterion 1: worked-example values.

Check criterion_worked_example() {
    Check c;
    CompatibilityGraph g = load_instance("data/fig1.json", InstanceFormat::Json);
    UnitCatalog catalog = build_catalog(g, 4, 4);

    DetSolution det = det_first_stage(g, catalog, 4);
    if (det.value != 8) {
        std::ostringstream why;
        why << "deterministic optimum is " << det.value
            << ", reference text documents 8 (its depicted solution is not optimal here)";
        c.fail(why.str());
    }

    Matching x = reference_matching(g, catalog);
    Scenario gamma = scenario_v2_a56(g);

    PolicyUnitSets full = policy_units(g, catalog, x, Policy::FullRecourse);
    long long full_value = solve_recourse_R(g, catalog, full, gamma).solution.value;
    c.expect(full_value == 5, "full recourse under {v2, a(5,6)} should be 5, got " +
                                  std::to_string(full_value));
    c.expect(oracle_recourse(g, catalog, full, gamma) == 5, "full-recourse oracle mismatch");

    PolicyUnitSets fso = policy_units(g, catalog, x, Policy::FirstStageOnly);
    long long fso_value = solve_recourse_R(g, catalog, fso, gamma).solution.value;
    c.expect(fso_value == 3, "first-stage-only recourse under {v2, a(5,6)} should be 3, got " +
                                 std::to_string(fso_value));
    c.expect(oracle_recourse(g, catalog, fso, gamma) == 3, "first-stage-only oracle mismatch");
    if (!c.pass) c.note("recourse values 5/3 confirmed");
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 2: replay of the documented strengthening trace.

std::vector<std::string> trace_lines_with(const std::vector<std::string>& trace,
                                          const std::string& needle) {
    std::vector<std::string> hits;
    for (const std::string& line : trace)
        if (line.find(needle) != std::string::npos) hits.push_back(line);
    return hits;
}

Check criterion_trace_replay() {
    Check c;
    CompatibilityGraph g = load_instance("data/fig1.json", InstanceFormat::Json);
    UnitCatalog catalog = build_catalog(g, 4, 4);
    Matching x = reference_matching(g, catalog);

    auto replay = [&](SecondStageAlgorithm algorithm) {
        AlgorithmConfig config;
        config.algorithm = algorithm;
        config.initial_scenario = scenario_v2_a56(g);
        return solve_second_stage(g, catalog, x, 8, Policy::FullRecourse, Budget{1, 1}, 4,
                                  config);
    };
    SecondStageResult mb = replay(SecondStageAlgorithm::FBSA_MB);
    SecondStageResult me = replay(SecondStageAlgorithm::FBSA_ME);

    // Iteration 1 starts from the first-stage bound of 8.
    for (const auto* run : {&mb, &me}) {
        auto created = trace_lines_with(run->trace, "\"event\":\"state_created\"");
        c.expect(created.size() == 1 &&
                     created[0].find("\"z_bar\":8") != std::string::npos,
                 "run does not start from bound 8");
    }

    // Iteration 2 drops the bound to 5 and restrengthens the first-stage row
    // from cover-1 to cover-2.
    for (const auto* run : {&mb, &me}) {
        auto drops = trace_lines_with(run->trace, "\"event\":\"z_bar_updated\"");
        c.expect(!drops.empty() && drops[0].find("\"old\":8") != std::string::npos &&
                     drops[0].find("\"new\":5") != std::string::npos,
                 "first bound update is not 8 -> 5");
        auto rhs = trace_lines_with(run->trace, "\"event\":\"rhs_updated\"");
        bool first_row_strengthened = false;
        for (const std::string& line : rhs) {
            if (line.find("\"id\":0") != std::string::npos &&
                line.find("\"old\":1") != std::string::npos &&
                line.find("\"new\":2") != std::string::npos)
                first_row_strengthened = true;
        }
        c.expect(first_row_strengthened, "missing rhs strengthening 1 -> 2 on row 0");
    }

    // The tight master adds an expanded-solution row in iteration 2; the
    // plain master never does.
    auto me_expanded = trace_lines_with(me.trace, "\"origin\":\"expanded\"");
    auto mb_expanded = trace_lines_with(mb.trace, "\"origin\":\"expanded\"");
    c.expect(!me_expanded.empty(), "tight master added no expanded row");
    c.expect(mb_expanded.empty(), "plain master unexpectedly added an expanded row");

    auto accepted = [](const SecondStageResult& run) {
        std::vector<std::string> names;
        for (const std::string& line :
             trace_lines_with(run.trace, "\"event\":\"scenario_accepted\"")) {
            auto pos = line.find("\"scenario\":\"");
            names.push_back(line.substr(pos));
        }
        return names;
    };
    std::vector<std::string> mb_accepted = accepted(mb);
    std::vector<std::string> me_accepted = accepted(me);
    if (me_expanded.size() >= 1 && me_accepted.size() >= 2) {
        // The expanded row lands before the second accepted scenario.
        std::size_t expanded_at = 0, second_accept_at = 0, seen = 0;
        for (std::size_t i = 0; i < me.trace.size(); ++i) {
            if (me.trace[i].find("\"origin\":\"expanded\"") != std::string::npos &&
                expanded_at == 0)
                expanded_at = i;
            if (me.trace[i].find("\"event\":\"scenario_accepted\"") != std::string::npos &&
                ++seen == 2)
                second_accept_at = i;
        }
        c.expect(expanded_at < second_accept_at,
                 "expanded row was not added before the second accepted scenario");
    }
    // The expanded row cuts off the scenario the plain master accepts next.
    if (mb_accepted.size() >= 2) {
        bool excluded = std::find(me_accepted.begin(), me_accepted.end(), mb_accepted[1]) ==
                        me_accepted.end();
        c.expect(excluded, "tight master accepted the scenario its row should exclude");
    }

    // The tight master reaches the final bound one update earlier.
    auto mb_drops = trace_lines_with(mb.trace, "\"event\":\"z_bar_updated\"");
    auto me_drops = trace_lines_with(me.trace, "\"event\":\"z_bar_updated\"");
    c.expect(!mb_drops.empty() && !me_drops.empty() &&
                 mb_drops.back().find("\"new\":3") != std::string::npos &&
                 me_drops.back().find("\"new\":3") != std::string::npos,
             "runs do not end at bound 3");
    c.expect(me_drops.size() + 1 == mb_drops.size(),
             "tight master is not exactly one bound update ahead (" +
                 std::to_string(me_drops.size()) + " vs " + std::to_string(mb_drops.size()) +
                 ")");

    c.expect(mb.z_q_star == me.z_q_star && mb.z_q_star == 3,
             "final second-stage values differ or are not 3");
    return c;
}

// ---------------------------------------------------------------------------
// Criteria 3, 6, 7 share one sampled suite.

struct SuiteOutcome {
    Check equivalence;   // criterion 3
    Check toggles;       // criterion 6
    Check dominance;     // criterion 7 (second-stage half)
    long long strengthened_iterations = 0;
    long long basic_iterations = 0;
};

SuiteOutcome run_second_stage_suite(int target_cases) {
    SuiteOutcome out;
    const Budget budgets[] = {{1, 1}, {2, 0}, {0, 2}, {2, 1}, {1, 2}, {2, 2}};
    int accepted = 0;
    std::uint64_t seed = 0;
    while (accepted < target_cases && seed < 4000) {
        ++seed;
        SampleCase c;
        const int pairs = 5 + static_cast<int>(seed % 3);      // 5..7
        const int ndds = 1 + static_cast<int>(seed % 2);       // 1..2
        const double density = 0.25 + 0.05 * (seed % 4);       // .25...40
        const int K = 3 + static_cast<int>(seed % 2);          // 3..4
        const int L = 2 + static_cast<int>(seed % 2);          // 2..3
        if (!sample_case(1000 + seed, pairs, ndds, density, K, L, 30, c)) continue;
        ++accepted;

        const Budget budget = budgets[accepted % 6];
        const Policy policy = (accepted % 2) ? Policy::FullRecourse : Policy::FirstStageOnly;

        SecondStageOracle ref = oracle_second_stage(c.g, c.catalog, c.x_tilde, policy, budget);
        for (SecondStageAlgorithm algorithm : kAllAlgorithms) {
            SecondStageResult result = run_second_stage(c, policy, budget, algorithm);
            if (result.z_q_star != ref.value) {
                out.equivalence.fail("seed " + std::to_string(seed) + " " +
                                     algorithm_name(algorithm) + ": got " +
                                     std::to_string(result.z_q_star) + ", oracle " +
                                     std::to_string(ref.value));
            }
            if (algorithm == SecondStageAlgorithm::FBSA_ME)
                out.strengthened_iterations += result.stats.scenarios_accepted;
            if (algorithm == SecondStageAlgorithm::BasicCovering)
                out.basic_iterations += result.stats.scenarios_accepted;
        }

        // Toggling the adjacency cuts must not change the value; the
        // unstrengthened baseline above already covers the row-tightening
        // toggle, and the heuristic's single-element separation is a
        // candidate filter only.
        for (SecondStageAlgorithm algorithm :
             {SecondStageAlgorithm::FBSA_ME, SecondStageAlgorithm::HSA_MB}) {
            SecondStageResult result = run_second_stage(c, policy, budget, algorithm, false);
            if (result.z_q_star != ref.value) {
                out.toggles.fail("seed " + std::to_string(seed) + " " +
                                 algorithm_name(algorithm) + " without adjacency cuts: got " +
                                 std::to_string(result.z_q_star) + ", oracle " +
                                 std::to_string(ref.value));
            }
        }

        // Policy dominance on this instance and budget.
        SecondStageOracle full =
            policy == Policy::FullRecourse
                ? ref
                : oracle_second_stage(c.g, c.catalog, c.x_tilde, Policy::FullRecourse, budget);
        SecondStageOracle fso =
            policy == Policy::FirstStageOnly
                ? ref
                : oracle_second_stage(c.g, c.catalog, c.x_tilde, Policy::FirstStageOnly,
                                      budget);
        if (fso.value > full.value) {
            out.dominance.fail("seed " + std::to_string(seed) +
                               ": first-stage-only exceeds full recourse");
        }
    }
    if (accepted < target_cases) {
        out.equivalence.fail("only sampled " + std::to_string(accepted) + " cases");
    } else {
        out.equivalence.note(std::to_string(accepted) + " cases, 5 algorithms each");
        out.toggles.note(std::to_string(accepted) + " cases");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 4 (+ the robust half of criterion 7).

struct RobustSuiteOutcome {
    Check equivalence;
    Check dominance;
};

RobustSuiteOutcome run_robust_suite(int target_cases) {
    RobustSuiteOutcome out;
    const Budget budgets[] = {{1, 0}, {0, 1}, {1, 1}};
    int accepted = 0;
    std::uint64_t seed = 0;
    while (accepted < target_cases && seed < 1000) {
        ++seed;
        SampleCase c;
        if (!sample_case(5000 + seed, 5, 1, 0.3 + 0.05 * (seed % 3), 3, 2, 30, c)) continue;
        ++accepted;

        const Budget budget = budgets[accepted % 3];
        RobustOracle ref = oracle_robust(c.g, 3, 2, Policy::FullRecourse, budget);
        RobustConfig config;
        config.second_stage.algorithm = kAllAlgorithms[accepted % kAllAlgorithms.size()];
        config.second_stage.seed = seed;
        RobustRun run = solve_robust(c.g, 3, 2, Policy::FullRecourse, budget, config);
        if (!run.optimal || run.z_p_star != ref.value) {
            out.equivalence.fail("seed " + std::to_string(seed) + " " +
                                 algorithm_name(config.second_stage.algorithm) + ": got " +
                                 std::to_string(run.z_p_star) + ", oracle " +
                                 std::to_string(ref.value));
        }

        RobustOracle fso = oracle_robust(c.g, 3, 2, Policy::FirstStageOnly, budget);
        if (fso.value > ref.value) {
            out.dominance.fail("seed " + std::to_string(seed) +
                               ": first-stage-only robust value exceeds full recourse");
        }
    }
    if (accepted < target_cases) {
        out.equivalence.fail("only sampled " + std::to_string(accepted) + " cases");
    } else {
        out.equivalence.note(std::to_string(accepted) + " cases");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Criterion 5: the surviving part of an expanded-recourse optimum attains the
// plain recourse optimum.

Check criterion_survival_property(int target_pairs) {
    Check c;
    int checked = 0;
    std::uint64_t seed = 0;
    Rng rng(424242);
    while (checked < target_pairs && seed < 1000) {
        ++seed;
        SampleCase sample;
        if (!sample_case(9000 + seed, 5 + static_cast<int>(seed % 2), 1, 0.3, 3, 2, 30,
                         sample))
            continue;
        TransitoryGraph transitory = build_transitory(sample.g, sample.catalog,
                                                      sample.x_tilde, Policy::FullRecourse);
        std::vector<int> t_vertices, t_arcs;
        for (int v = 0; v < sample.g.num_vertices(); ++v)
            if (transitory.elements.vertex_in[v]) t_vertices.push_back(v);
        for (int a = 0; a < sample.g.num_arcs(); ++a)
            if (transitory.elements.arc_in[a]) t_arcs.push_back(a);

        for (int draw = 0; draw < 5 && checked < target_pairs; ++draw) {
            Scenario gamma = Scenario::empty_for(sample.g);
            const int nv = static_cast<int>(rng.below(3));  // 0..2 vertex failures
            const int na = static_cast<int>(rng.below(3));  // 0..2 arc failures
            for (int i = 0; i < nv && !t_vertices.empty(); ++i)
                gamma.vertex_fail[t_vertices[rng.below(t_vertices.size())]] = 1;
            for (int i = 0; i < na && !t_arcs.empty(); ++i)
                gamma.arc_fail[t_arcs[rng.below(t_arcs.size())]] = 1;

            ExpandedRecourseOutcome expanded = solve_recourse_RE(
                sample.g, sample.catalog, transitory.units, gamma);
            const long long reference =
                oracle_recourse(sample.g, sample.catalog, transitory.units, gamma);
            if (expanded.z_star_r != reference ||
                expanded.psi_surviving.value != reference) {
                c.fail("seed " + std::to_string(seed) + " draw " + std::to_string(draw) +
                       ": surviving value " + std::to_string(expanded.psi_surviving.value) +
                       ", oracle " + std::to_string(reference));
            }
            // The surviving selection must be the survival filter of psi_star.
            std::vector<int> filtered;
            for (int id : expanded.psi_star.selected)
                if (!unit_fails(sample.catalog[id], gamma)) filtered.push_back(id);
            if (filtered != expanded.psi_surviving.selected)
                c.fail("seed " + std::to_string(seed) + ": surviving set is not the filter");
            ++checked;
        }
    }
    if (checked < target_pairs)
        c.fail("only checked " + std::to_string(checked) + " pairs");
    else
        c.note(std::to_string(checked) + " scenario draws");
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 8: with no arc budget the solver equals an independent
// vertex-only reimplementation.

Check criterion_homogeneous(int target_cases) {
    Check c;

    auto vertex_only_value = [](const SampleCase& sample, Policy policy, int r_v) {
        TransitoryGraph transitory =
            build_transitory(sample.g, sample.catalog, sample.x_tilde, policy);
        std::vector<int> t_vertices;
        for (int v = 0; v < sample.g.num_vertices(); ++v)
            if (transitory.elements.vertex_in[v]) t_vertices.push_back(v);
        long long best = oracle_recourse(sample.g, sample.catalog, transitory.units,
                                         Scenario::empty_for(sample.g));
        // Enumerate vertex subsets of size <= r_v by odometer.
        std::vector<int> pick;
        std::function<void(std::size_t, int)> walk = [&](std::size_t from, int left) {
            if (left == 0) return;
            for (std::size_t i = from; i < t_vertices.size(); ++i) {
                pick.push_back(t_vertices[i]);
                Scenario gamma = Scenario::empty_for(sample.g);
                for (int v : pick) gamma.vertex_fail[v] = 1;
                best = std::min(best, oracle_recourse(sample.g, sample.catalog,
                                                      transitory.units, gamma));
                walk(i + 1, left - 1);
                pick.pop_back();
            }
        };
        walk(0, r_v);
        return best;
    };

    int accepted = 0;
    std::uint64_t seed = 0;
    while (accepted < target_cases && seed < 1000) {
        ++seed;
        SampleCase sample;
        if (!sample_case(12000 + seed, 5 + static_cast<int>(seed % 2), 1, 0.32, 3, 2, 30,
                         sample))
            continue;
        ++accepted;
        const int r_v = 1 + static_cast<int>(seed % 2);
        const Policy policy = (seed % 2) ? Policy::FullRecourse : Policy::FirstStageOnly;
        const long long reference = vertex_only_value(sample, policy, r_v);
        SecondStageOracle oracle =
            oracle_second_stage(sample.g, sample.catalog, sample.x_tilde, policy,
                                Budget{r_v, 0});
        SecondStageResult solved =
            run_second_stage(sample, policy, Budget{r_v, 0}, SecondStageAlgorithm::HSA_ME);
        if (oracle.value != reference || solved.z_q_star != reference) {
            c.fail("seed " + std::to_string(seed) + ": vertex-only " +
                   std::to_string(reference) + ", oracle " + std::to_string(oracle.value) +
                   ", solver " + std::to_string(solved.z_q_star));
        }
    }
    if (accepted < target_cases)
        c.fail("only sampled " + std::to_string(accepted) + " cases");
    else
        c.note(std::to_string(accepted) + " cases");
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 9: engine soundness against exhaustive enumeration.

Check criterion_engine(int target_programs) {
    Check c;
    Rng rng(314159);

    for (int p = 0; p < target_programs; ++p) {
        BinaryProgram program;
        const int n = 3 + static_cast<int>(rng.below(10));  // 3..12 variables
        for (int j = 0; j < n; ++j)
            program.add_var(static_cast<long long>(rng.below(11)) - 5);
        const int m = 1 + static_cast<int>(rng.below(5));
        for (int i = 0; i < m; ++i) {
            SparseRow row;
            long long magnitude = 0;
            for (int j = 0; j < n; ++j) {
                if (rng.unit_real() > 0.7) continue;
                long long coeff = static_cast<long long>(rng.below(7)) - 3;
                if (coeff == 0) continue;
                row.terms.push_back({j, coeff});
                magnitude += std::abs(coeff);
            }
            const double kind = rng.unit_real();
            row.sense = kind < 0.6   ? SparseRow::Sense::Le
                        : kind < 0.8 ? SparseRow::Sense::Ge
                                     : SparseRow::Sense::Eq;
            row.rhs = static_cast<long long>(rng.below(2 * magnitude + 3)) - magnitude - 1;
            program.add_row(row);
        }

        // Exhaustive reference over all 2^n assignments.
        bool any_feasible = false;
        long long best = 0;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            bool ok = true;
            for (const SparseRow& row : program.constraints) {
                long long lhs = 0;
                for (auto [var, coeff] : row.terms)
                    if (mask >> var & 1) lhs += coeff;
                if (row.sense == SparseRow::Sense::Le && lhs > row.rhs) ok = false;
                if (row.sense == SparseRow::Sense::Ge && lhs < row.rhs) ok = false;
                if (row.sense == SparseRow::Sense::Eq && lhs != row.rhs) ok = false;
                if (!ok) break;
            }
            if (!ok) continue;
            long long value = 0;
            for (int j = 0; j < n; ++j)
                if (mask >> j & 1) value += program.objective[j];
            if (!any_feasible || value > best) best = value;
            any_feasible = true;
        }

        SolveOutcome outcome = solve(program);
        if (any_feasible) {
            if (outcome.status != SolveStatus::Optimal || outcome.objective_value != best) {
                c.fail("program " + std::to_string(p) + ": engine " +
                       std::to_string(outcome.objective_value) + ", enumeration " +
                       std::to_string(best));
                continue;
            }
            LpSolution lp = solve_lp_relaxation(program);
            if (!lp.feasible || lp.value < Rational(best))
                c.fail("program " + std::to_string(p) + ": LP below IP");
        } else if (outcome.status != SolveStatus::Infeasible) {
            c.fail("program " + std::to_string(p) + ": engine missed infeasibility");
        }
    }

    // Column generation against the fully-enumerated model on packing
    // programs: same LP value, and the LP bounds the full integral optimum.
    for (int p = 0; p < 60; ++p) {
        const int rows = 3 + static_cast<int>(rng.below(3));  // 3..5 elements
        const int pool = 6 + static_cast<int>(rng.below(5));  // 6..10 columns
        std::vector<Column> columns;
        BinaryProgram full;
        std::vector<SparseRow> full_rows(rows);
        for (int i = 0; i < rows; ++i) {
            full_rows[i].sense = SparseRow::Sense::Le;
            full_rows[i].rhs = 1;
        }
        for (int j = 0; j < pool; ++j) {
            Column col;
            col.objective = 1 + static_cast<long long>(rng.below(6));
            col.external_id = j;
            for (int i = 0; i < rows; ++i)
                if (rng.unit_real() < 0.45) col.rows.push_back({i, 1});
            if (col.rows.empty()) col.rows.push_back({static_cast<int>(rng.below(rows)), 1});
            columns.push_back(col);
            const int var = full.add_var(col.objective);
            for (auto [row, coeff] : col.rows) full_rows[row].terms.push_back({var, coeff});
        }
        for (SparseRow& row : full_rows) full.add_row(std::move(row));

        Pricer pricer = [&](const std::vector<Rational>& duals) {
            std::vector<Column> out;
            for (const Column& col : columns) {
                Rational reduced = col.objective;
                for (auto [row, coeff] : col.rows) reduced -= duals[row] * coeff;
                if (reduced > 0) out.push_back(col);
                if (out.size() == 10) break;
            }
            return out;
        };
        ColumnGenResult cg =
            column_generate(rows, std::vector<long long>(rows, 1), pricer);
        LpSolution full_lp = solve_lp_relaxation(full);
        SolveOutcome full_ip = solve(full);
        if (cg.lp_value != full_lp.value)
            c.fail("packing " + std::to_string(p) + ": restricted LP differs from full LP");
        if (Rational(full_ip.objective_value) > cg.lp_value)
            c.fail("packing " + std::to_string(p) + ": LP bound below integral optimum");
    }
    if (c.pass)
        c.note(std::to_string(target_programs) + " random programs, 60 pricing models");
    return c;
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-identical reruns.

Check criterion_determinism() {
    Check c;
    CompatibilityGraph g = load_instance("data/fig1.json", InstanceFormat::Json);
    RunSpec spec;
    spec.instance = "data/fig1.json";
    spec.K = 4;
    spec.L = 4;
    spec.rv = 1;
    spec.ra = 1;
    spec.algorithm = SecondStageAlgorithm::HSA_ME;
    spec.seed = 7;
    spec.wall_timing = false;
    RunReport first = execute_run(g, spec);
    RunReport second = execute_run(g, spec);
    c.expect(first.runlog == second.runlog, "run logs differ between reruns");
    c.expect(first.csv_row == second.csv_row, "stats rows differ between reruns");
    c.expect(first.scenario_json == second.scenario_json, "scenario artifacts differ");
    c.expect(first.solution_json == second.solution_json, "solution artifacts differ");

    GenSpec gen{10, 2, 0.25, 0.3, 21};
    c.expect(generate_instance_json(gen) == generate_instance_json(gen),
             "generator output differs between calls");
    if (c.pass) c.note("solver artifacts and generator output stable");
    return c;
}

int g_failures = 0;

void report(int number, const std::string& name, const Check& check, double elapsed) {
    std::cout << (check.pass ? "PASS" : "FAIL") << " criterion " << number << " [" << name
              << "] (" << fmt_seconds(elapsed) << ")";
    if (!check.detail.empty()) std::cout << ": " << check.detail;
    std::cout << "\n" << std::flush;
    if (!check.pass) ++g_failures;
}

template <typename F>
void run_criterion(int number, const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    Check check;
    try {
        check = body();
    } catch (const std::exception& e) {
        check.pass = false;
        check.detail = std::string("exception: ") + e.what();
    }
    report(number, name, check, seconds_since(start));
}

}  // namespace

int main() {
    SuiteOutcome suite;
    RobustSuiteOutcome robust;

    run_criterion(1, "worked-example values", [] { return criterion_worked_example(); });
    run_criterion(2, "strengthening trace replay", [] { return criterion_trace_replay(); });

    const auto suite_start = std::chrono::steady_clock::now();
    bool suite_threw = false;
    std::string suite_error;
    try {
        suite = run_second_stage_suite(200);
    } catch (const std::exception& e) {
        suite_threw = true;
        suite_error = std::string("exception: ") + e.what();
    }
    const double suite_elapsed = seconds_since(suite_start);
    if (suite_threw) {
        Check failed;
        failed.fail(suite_error);
        report(3, "second-stage oracle equivalence", failed, suite_elapsed);
    } else {
        report(3, "second-stage oracle equivalence", suite.equivalence, suite_elapsed);
    }

    const auto robust_start = std::chrono::steady_clock::now();
    bool robust_threw = false;
    std::string robust_error;
    try {
        robust = run_robust_suite(50);
    } catch (const std::exception& e) {
        robust_threw = true;
        robust_error = std::string("exception: ") + e.what();
    }
    const double robust_elapsed = seconds_since(robust_start);
    if (robust_threw) {
        Check failed;
        failed.fail(robust_error);
        report(4, "robust-solve oracle equivalence", failed, robust_elapsed);
    } else {
        report(4, "robust-solve oracle equivalence", robust.equivalence, robust_elapsed);
    }

    run_criterion(5, "expanded-recourse survival", [] {
        return criterion_survival_property(200);
    });

    if (!suite_threw) {
        Check toggles = suite.toggles;
        std::ostringstream soft;
        soft << "aggregate iterations strengthened " << suite.strengthened_iterations
             << " vs baseline " << suite.basic_iterations << " (reported, not asserted)";
        toggles.note(soft.str());
        report(6, "strengthening and cut safety", toggles, 0.0);
    } else {
        Check failed;
        failed.fail("suite unavailable: " + suite_error);
        report(6, "strengthening and cut safety", failed, 0.0);
    }

    {
        Check dominance;
        if (suite_threw) {
            dominance.fail("second-stage suite unavailable");
        } else if (!suite.dominance.pass) {
            dominance = suite.dominance;
        }
        if (robust_threw) {
            dominance.fail("robust suite unavailable");
        } else if (!robust.dominance.pass) {
            dominance.fail(robust.dominance.detail);
        }
        if (dominance.pass) dominance.note("every sampled instance and budget");
        report(7, "policy dominance", dominance, 0.0);
    }

    run_criterion(8, "homogeneous special case", [] { return criterion_homogeneous(30); });
    run_criterion(9, "engine soundness", [] { return criterion_engine(500); });
    run_criterion(10, "determinism", [] { return criterion_determinism(); });

    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criterion(s) failed")
              << "\n";
    return g_failures;
}
