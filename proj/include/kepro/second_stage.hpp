#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kepro/bip_engine.hpp"
#include "kepro/common.hpp"
#include "kepro/enumeration.hpp"
#include "kepro/instance.hpp"
#include "kepro/scenario.hpp"

namespace kepro {

// The four scenario-generation strategies plus the unstrengthened baseline.
// MB variants run the basic covering master (solution rows only), ME variants
// the tight master with expanded-solution rows; HSA variants switch to the
// optimality-seeking SSF relaxation after `tr` iterations.
enum class SecondStageAlgorithm { BasicCovering, FBSA_MB, FBSA_ME, HSA_MB, HSA_ME };

// CLI spellings: basic, fbsa-mb, fbsa-me, hsa-mb, hsa-me.
std::string algorithm_name(SecondStageAlgorithm algorithm);
std::optional<SecondStageAlgorithm> algorithm_from_name(const std::string& name);

struct AlgorithmConfig {
    SecondStageAlgorithm algorithm = SecondStageAlgorithm::FBSA_ME;
    int tr = 150;  // hybrid switch-over iteration; >= 1, ignored by non-hybrids
    std::uint64_t seed = 0;
    Deadline deadline = Deadline::unlimited();
    bool adjacency_cuts = true;
    // Forces the first candidate scenario, bypassing the heuristic and the
    // master for iteration one. Used to replay documented runs; must be
    // budget-feasible and non-empty.
    std::optional<Scenario> initial_scenario;
};

// Engine effort and wall-clock seconds attributed to one phase of the solve.
// Seconds are informational; ticks drive the deterministic timing mode.
struct PhaseBreakdown {
    EngineWork work;
    double seconds = 0.0;
};

struct SecondStageStats {
    int scenarios_accepted = 0;   // 2ndS: scenarios added to Gamma-hat
    int heuristic_true = 0;       // consumed candidates built by the greedy heuristic
    int master_mip = 0;           // consumed candidates found by the covering master
    int ssf_scenarios = 0;        // consumed candidates produced by SSF solves
    int initial_overrides = 0;    // consumed candidates injected via initial_scenario
    int cg_true = 0;              // recourse solved to proven optimality by colgen
    int re_solves = 0;            // recourse MIP solves (colgen fallback or direct)
    int ssf_solves = 0;           // completed SSF solves, the certifying one included
    int dominated_rejections = 0; // heuristic single-element separation refusals

    // scenarios_accepted == heuristic_true + master_mip + ssf_scenarios
    //                       + initial_overrides holds on every return.

    PhaseBreakdown heuristic;  // work stays zero: the greedy runs no LP engine
    PhaseBreakdown master;
    PhaseBreakdown recourse;
    PhaseBreakdown colgen;
    PhaseBreakdown ssf;
};

struct SecondStageResult {
    long long z_q_star = 0;
    Scenario worst_case;  // empty when no scenario improves on z_tilde_p
    bool hit_time_limit = false;
    SecondStageStats stats;
    std::vector<std::string> trace;  // JSON lines, master events interleaved
};

// Exact second-stage value of the first-stage matching under the failure
// budget: min over budget-feasible scenarios of the optimal recourse, solved
// by the configured scenario-generation algorithm. The catalog must be the
// one x_tilde was selected from; L is the chain cap used for column limits.
SecondStageResult solve_second_stage(const CompatibilityGraph& g, const UnitCatalog& catalog,
                                     const Matching& x_tilde, long long z_tilde_p,
                                     Policy policy, Budget budget, int L,
                                     const AlgorithmConfig& config);

}  // namespace kepro
