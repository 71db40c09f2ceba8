#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kepro/enumeration.hpp"
#include "kepro/instance.hpp"
#include "kepro/robust_model.hpp"
#include "kepro/second_stage.hpp"

namespace kepro {

// One solver run as described by command-line flags or a batch manifest row.
struct RunSpec {
    std::string instance;  // path as given; echoed into the stats CSV
    InstanceFormat format = InstanceFormat::Json;
    int K = 3;
    int L = 3;
    int rv = 0;
    int ra = 0;
    double ra_frac = -1.0;  // >= 0: derive ra from the deterministic solution
    Policy policy = Policy::FullRecourse;
    SecondStageAlgorithm algorithm = SecondStageAlgorithm::HSA_ME;
    int tr = 150;
    double time_limit = 3600.0;  // seconds; <= 0 disables the limit
    std::uint64_t seed = 0;
    bool wall_timing = true;  // false: total_s 0.000, tick-based percentages
};

// Everything a run produces. The JSON/CSV strings are ready to write, so the
// batch runner and the solve command share one code path.
struct RunReport {
    RobustRun run;
    int resolved_ra = 0;      // ra actually used (after --ra-frac resolution)
    Scenario binding;         // scenario attaining min R(x*, gamma) over the pool
    std::string hsp_pct;      // "NA" or a fixed-point percentage
    double total_s = 0.0;     // wall seconds; 0 under tick timing
    std::string csv_row;      // one stats row, matching stats_csv_header()
    std::string scenario_json;
    std::string solution_json;
    std::string runlog;       // JSON lines: run log with traces interleaved
};

std::string stats_csv_header();

// Runs the full pipeline on an already-loaded instance: budget resolution,
// delayed scenario generation, binding-scenario scan, HSP%, artifact bodies.
RunReport execute_run(const CompatibilityGraph& g, const RunSpec& spec);

// Random instance generator: Erdos-Renyi arcs among pairs and from each NDD,
// PRA sampled high (uniform [90,100]) with the given share, else uniform
// [0,90). Identical specs produce byte-identical JSON.
struct GenSpec {
    int pairs = 20;
    int ndds = 2;
    double density = 0.15;
    double pra_high_share = 0.25;
    std::uint64_t seed = 1;
};

std::string generate_instance_json(const GenSpec& spec);

// Manifest parsing is exposed for tests: defaults object plus a runs array,
// unknown keys rejected.
std::vector<RunSpec> parse_manifest(const std::string& text);

int run_cli(int argc, const char* const* argv);

}  // namespace kepro
