#pragma once

#include <string>
#include <vector>

#include "kepro/bip_engine.hpp"
#include "kepro/common.hpp"
#include "kepro/enumeration.hpp"
#include "kepro/instance.hpp"
#include "kepro/scenario.hpp"
#include "kepro/second_stage.hpp"

namespace kepro {

// Feasible chain positions per arc, from BFS level propagation out of the
// non-directed donors: position l is feasible for (u,v) iff some walk of l-1
// arcs from a donor reaches u (the standard position-index relaxation; chain
// continuity restores exactness on solutions). Arcs into donors get no
// positions, donor out-arcs exactly position 1.
struct PositionIndex {
    int L = 0;
    std::vector<std::vector<int>> arc_positions;  // arc id -> ascending positions
    std::vector<std::vector<int>> position_arcs;  // position-1 -> arc ids holding it
};

PositionIndex compute_position_index(const CompatibilityGraph& g, int L);

struct FsfOptions {
    // Reproduces the printed chain-continuity index set (positions {1..L}
    // minus L-1), which admits unanchored position-L arcs. Off by default;
    // the sound set {1..L-1} is used instead.
    bool literal_chainpos = false;
};

// One built first-stage program: deterministic PICEF when the scenario list
// is empty, otherwise the robust form with one recourse block per scenario
// and the objective pushed into binary expansion bits. Only the first-stage
// variable ids are kept; they are all a solution decode needs.
struct RobustPicefModel {
    BinaryProgram program;
    int z_bits = 0;                           // 0 in the deterministic case
    std::vector<int> z_bit_var;               // objective bits, coefficient 2^k
    std::vector<int> cycle_var;               // catalog unit id -> var id, -1 for chains
    std::vector<std::vector<int>> delta_var;  // arc id -> var per feasible position
};

RobustPicefModel build_fsf(const CompatibilityGraph& g, const UnitCatalog& catalog,
                           const PositionIndex& positions, Policy policy,
                           const std::vector<Scenario>& scenarios,
                           const FsfOptions& options = {});

struct DecodedFirstStage {
    Matching matching;
    int orphan_arcs = 0;  // selected chain arcs unreachable from any donor
                          // (possible only under literal_chainpos)
};

// Reads the selected cycles and walks the selected chain arcs position by
// position from each donor, mapping every maximal path to its catalog unit.
DecodedFirstStage decode_fsf_matching(const RobustPicefModel& model,
                                      const CompatibilityGraph& g, const UnitCatalog& catalog,
                                      const PositionIndex& positions,
                                      const std::vector<std::uint8_t>& assignment);

struct RobustIteration {
    Matching x_tilde;
    long long z_tilde_p = 0;
    SecondStageResult second_stage;
};

struct RobustRun {
    std::vector<Scenario> scenarios;  // accepted worst cases, in order
    Matching x_star;
    long long z_p_star = 0;
    bool optimal = false;  // false when a time limit stopped the run
    bool hit_time_limit = false;
    std::vector<RobustIteration> iterations;
    PhaseBreakdown first_stage;      // FSF solve effort across iterations
    std::vector<std::string> log;    // JSON lines, one per iteration plus a summary

    int first_stage_iters() const { return static_cast<int>(iterations.size()); }
};

struct RobustConfig {
    AlgorithmConfig second_stage;
    FsfOptions fsf;
};

// Delayed scenario generation: alternates the first-stage solve over the
// accepted scenarios with the exact second stage for its maximizer, adding
// the worst-case scenario until the second-stage value meets the first-stage
// bound. The deadline inside config.second_stage bounds the whole run.
RobustRun solve_robust(const CompatibilityGraph& g, int K, int L, Policy policy,
                       Budget budget, const RobustConfig& config);

// Second-stage statistics summed over all iterations of a run.
SecondStageStats sum_stats(const RobustRun& run);

}  // namespace kepro
