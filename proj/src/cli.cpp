#include "kepro/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "kepro/bip_engine.hpp"
#include "kepro/oracle.hpp"
#include "kepro/recourse.hpp"
#include "kepro/scenario.hpp"

namespace kepro {

namespace {

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

InstanceFormat format_from_name(const std::string& name) {
    if (name == "json") return InstanceFormat::Json;
    if (name == "edgelist") return InstanceFormat::EdgeList;
    throw Error(ErrorKind::Usage, "unknown instance format '" + name + "'");
}

SecondStageAlgorithm algorithm_or_throw(const std::string& name) {
    auto alg = algorithm_from_name(name);
    if (!alg) throw Error(ErrorKind::Usage, "unknown algorithm '" + name + "'");
    return *alg;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Validation, "cannot write '" + path + "'");
    out << body;
    if (!out.flush()) throw Error(ErrorKind::Validation, "write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Validation, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Deterministic sizing solve for --ra-frac: the arc budget is the given
// fraction of the arcs used by the deterministic (no-failure) solution,
// rounded to the nearest integer.
int resolve_arc_budget(const CompatibilityGraph& g, const RunSpec& spec,
                       const Deadline& deadline) {
    const UnitCatalog catalog = build_catalog(g, spec.K, spec.L);
    const PositionIndex positions = compute_position_index(g, spec.L);
    const RobustPicefModel model = build_fsf(g, catalog, positions, spec.policy, {});
    SolveOptions options;
    options.deadline = deadline;
    options.seed = spec.seed;
    const SolveOutcome out = solve(model.program, options);
    if (out.status == SolveStatus::TimeLimit) {
        throw Error(ErrorKind::TimeLimit, "time limit hit while sizing --ra-frac");
    }
    if (out.status != SolveStatus::Optimal) {
        throw Error(ErrorKind::Internal, "deterministic sizing solve failed");
    }
    const DecodedFirstStage det =
        decode_fsf_matching(model, g, catalog, positions, out.assignment);
    long long arcs = 0;
    for (int id : det.matching.unit_ids) {
        arcs += static_cast<long long>(catalog[id].arcs.size());
    }
    return static_cast<int>(std::llround(spec.ra_frac * static_cast<double>(arcs)));
}

// Share of PRA >= 90 pairs of x* that the recourse optimum under the binding
// scenario still covers; "NA" when x* matches no sensitized pair.
std::string hsp_percentage(const CompatibilityGraph& g, const UnitCatalog& catalog,
                           const Matching& x_star, const RecourseSolution& recourse) {
    const ElementSet elements = matching_elements(g, catalog, x_star);
    std::vector<std::uint8_t> rematched(g.num_vertices(), 0);
    for (int id : recourse.selected) {
        for (int v : catalog[id].vertices) rematched[v] = 1;
    }
    int sensitized = 0;
    int kept = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (!elements.vertex_in[v] || !g.is_pair(v)) continue;
        if (g.vertices[v].pra < kHighSensitizationPra) continue;
        ++sensitized;
        kept += rematched[v];
    }
    if (sensitized == 0) return "NA";
    return fixed(100.0 * kept / sensitized, 1);
}

std::string build_csv_row(const RunSpec& spec, const RunReport& rep) {
    const SecondStageStats stats = sum_stats(rep.run);
    double shares[5];
    double denom;
    if (spec.wall_timing) {
        denom = rep.total_s;
        shares[0] = stats.heuristic.seconds;
        shares[1] = stats.master.seconds;
        shares[2] = stats.recourse.seconds;
        shares[3] = stats.colgen.seconds;
        shares[4] = stats.ssf.seconds;
    } else {
        shares[0] = static_cast<double>(stats.heuristic.work.ticks());
        shares[1] = static_cast<double>(stats.master.work.ticks());
        shares[2] = static_cast<double>(stats.recourse.work.ticks());
        shares[3] = static_cast<double>(stats.colgen.work.ticks());
        shares[4] = static_cast<double>(stats.ssf.work.ticks());
        denom = static_cast<double>(rep.run.first_stage.work.ticks()) + shares[0] +
                shares[1] + shares[2] + shares[3] + shares[4];
    }
    std::ostringstream row;
    row << spec.instance << ',' << spec.K << ',' << spec.L << ',' << spec.rv << ','
        << rep.resolved_ra << ',' << policy_name(spec.policy) << ','
        << algorithm_name(spec.algorithm) << ',' << (rep.run.optimal ? 1 : 0) << ','
        << fixed(rep.total_s, 3);
    for (double share : shares) {
        row << ',' << fixed(denom > 0.0 ? 100.0 * share / denom : 0.0, 1);
    }
    row << ',' << rep.run.first_stage_iters() << ',' << stats.scenarios_accepted << ','
        << stats.heuristic_true << ',' << stats.cg_true << ',' << stats.ssf_solves << ','
        << stats.dominated_rejections << ',' << rep.run.z_p_star << ',' << rep.hsp_pct;
    return row.str();
}

std::string build_solution_json(const CompatibilityGraph& g, const UnitCatalog& catalog,
                                const RobustRun& run) {
    nlohmann::ordered_json doc;
    doc["value"] = run.z_p_star;
    doc["optimal"] = run.optimal;
    doc["time_limit"] = run.hit_time_limit;
    doc["first_stage_iterations"] = run.first_stage_iters();
    doc["scenarios"] = run.scenarios.size();
    doc["units"] = nlohmann::ordered_json::array();
    for (int id : run.x_star.unit_ids) {
        const ExchangeUnit& unit = catalog[id];
        nlohmann::ordered_json entry;
        entry["kind"] = unit.kind == ExchangeUnit::Kind::Cycle ? "cycle" : "chain";
        entry["vertices"] = nlohmann::ordered_json::array();
        for (int v : unit.vertices) entry["vertices"].push_back(g.vertices[v].id);
        doc["units"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

// Run log with each iteration's second-stage trace spliced in after the
// opening line and before that iteration's summary record.
std::string build_runlog(const RobustRun& run) {
    std::ostringstream out;
    std::size_t next = 0;
    if (next < run.log.size()) out << run.log[next++] << '\n';
    for (const RobustIteration& it : run.iterations) {
        for (const std::string& line : it.second_stage.trace) out << line << '\n';
        if (next < run.log.size()) out << run.log[next++] << '\n';
    }
    for (; next < run.log.size(); ++next) out << run.log[next] << '\n';
    return out.str();
}

void apply_manifest_fields(RunSpec& spec, const nlohmann::json& obj) {
    if (!obj.is_object()) {
        throw Error(ErrorKind::Parse, "manifest entries must be objects");
    }
    for (const auto& [key, value] : obj.items()) {
        try {
            if (key == "instance") {
                spec.instance = value.get<std::string>();
            } else if (key == "format") {
                spec.format = format_from_name(value.get<std::string>());
            } else if (key == "K") {
                spec.K = value.get<int>();
            } else if (key == "L") {
                spec.L = value.get<int>();
            } else if (key == "rv") {
                spec.rv = value.get<int>();
            } else if (key == "ra") {
                spec.ra = value.get<int>();
            } else if (key == "ra_frac") {
                spec.ra_frac = value.get<double>();
            } else if (key == "policy") {
                spec.policy = policy_from_name(value.get<std::string>());
            } else if (key == "algorithm") {
                spec.algorithm = algorithm_or_throw(value.get<std::string>());
            } else if (key == "tr") {
                spec.tr = value.get<int>();
            } else if (key == "time_limit") {
                spec.time_limit = value.get<double>();
            } else if (key == "seed") {
                spec.seed = value.get<std::uint64_t>();
            } else {
                throw Error(ErrorKind::Parse, "manifest: unknown key '" + key + "'");
            }
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorKind::Parse, "manifest: bad value for '" + key + "'");
        }
    }
}

void write_solve_artifacts(const std::string& dir, const RunReport& rep) {
    std::filesystem::create_directories(dir);
    write_file(dir + "/runlog.jsonl", rep.runlog);
    write_file(dir + "/scenario.json", rep.scenario_json + "\n");
    write_file(dir + "/solution.json", rep.solution_json);
    write_file(dir + "/stats.csv", stats_csv_header() + "\n" + rep.csv_row + "\n");
}

int cmd_solve(const RunSpec& spec, const std::string& out_dir) {
    const CompatibilityGraph g = load_instance(spec.instance, spec.format);
    const RunReport rep = execute_run(g, spec);
    write_solve_artifacts(out_dir, rep);
    std::cout << "value=" << rep.run.z_p_star << " optimal=" << (rep.run.optimal ? 1 : 0)
              << " iterations=" << rep.run.first_stage_iters()
              << " scenarios=" << rep.run.scenarios.size() << " hsp=" << rep.hsp_pct
              << " out=" << out_dir << "\n";
    if (rep.run.hit_time_limit) {
        std::cerr << "time limit reached; artifacts hold the best bound so far\n";
        return exit_code_for(ErrorKind::TimeLimit);
    }
    return 0;
}

int cmd_batch(const std::string& manifest_path, const std::string& out_dir, int jobs,
              bool wall_timing) {
    std::vector<RunSpec> specs = parse_manifest(read_file(manifest_path));
    for (RunSpec& spec : specs) spec.wall_timing = wall_timing;

    const std::size_t n = specs.size();
    std::vector<std::string> rows(n);
    std::vector<std::string> errors(n);
    std::vector<double> seconds(n, 0.0);
    std::vector<std::uint8_t> succeeded(n, 0);
    std::vector<std::uint8_t> solved(n, 0);
    std::atomic<std::size_t> cursor{0};

    auto worker = [&] {
        for (std::size_t i; (i = cursor.fetch_add(1)) < n;) {
            try {
                const CompatibilityGraph g =
                    load_instance(specs[i].instance, specs[i].format);
                const RunReport rep = execute_run(g, specs[i]);
                rows[i] = rep.csv_row;
                seconds[i] = rep.total_s;
                solved[i] = rep.run.optimal ? 1 : 0;
                succeeded[i] = 1;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(n == 0 ? 1 : n)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::filesystem::create_directories(out_dir);
    std::ostringstream csv;
    csv << stats_csv_header() << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        if (succeeded[i]) csv << rows[i] << '\n';
    }
    write_file(out_dir + "/batch.csv", csv.str());

    // Performance profile: per algorithm, the fraction of its manifest runs
    // solved to optimality within each observed time. Failed and unsolved
    // runs stay in the denominator.
    std::map<std::string, std::vector<std::size_t>> by_algorithm;
    for (std::size_t i = 0; i < n; ++i) {
        by_algorithm[algorithm_name(specs[i].algorithm)].push_back(i);
    }
    std::ostringstream profile;
    profile << "algorithm,time_s,frac_solved\n";
    for (const auto& [name, members] : by_algorithm) {
        std::vector<std::size_t> done;
        for (std::size_t i : members) {
            if (succeeded[i] && solved[i]) done.push_back(i);
        }
        std::stable_sort(done.begin(), done.end(), [&](std::size_t a, std::size_t b) {
            return seconds[a] < seconds[b];
        });
        for (std::size_t k = 0; k < done.size(); ++k) {
            profile << name << ',' << fixed(seconds[done[k]], 3) << ','
                    << fixed(static_cast<double>(k + 1) / members.size(), 4) << '\n';
        }
    }
    write_file(out_dir + "/profile.csv", profile.str());

    std::size_t failed = 0;
    std::ostringstream failures;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i].empty()) continue;
        ++failed;
        failures << i << ' ' << specs[i].instance << ": " << errors[i] << '\n';
        std::cerr << "run " << i << " (" << specs[i].instance
                  << ") failed: " << errors[i] << '\n';
    }
    if (failed > 0) write_file(out_dir + "/failures.txt", failures.str());

    std::cout << "runs=" << n << " ok=" << (n - failed) << " failed=" << failed
              << " out=" << out_dir << "\n";
    return 0;
}

int cmd_oracle(const RunSpec& spec) {
    const CompatibilityGraph g = load_instance(spec.instance, spec.format);
    const RobustOracle reference =
        oracle_robust(g, spec.K, spec.L, spec.policy, Budget{spec.rv, spec.ra});
    RunSpec algo_spec = spec;
    algo_spec.wall_timing = false;
    const RunReport rep = execute_run(g, algo_spec);
    if (rep.run.optimal && rep.run.z_p_star == reference.value) {
        std::cout << "agree value=" << reference.value << "\n";
        return 0;
    }
    std::cout << "disagree oracle=" << reference.value
              << " algorithm=" << rep.run.z_p_star
              << (rep.run.optimal ? "" : " (algorithm hit the time limit)") << "\n";
    const UnitCatalog catalog = build_catalog(g, spec.K, spec.L);
    std::cout << "oracle matching:\n";
    for (int id : reference.matching.unit_ids) {
        std::cout << "  " << catalog[id].to_string(g) << "\n";
    }
    std::cout << "oracle scenario: " << reference.scenario.to_string(g) << "\n";
    std::cout << "algorithm trace:\n" << rep.runlog;
    return 1;
}

int cmd_gen(const GenSpec& spec, const std::string& out_path) {
    const std::string doc = generate_instance_json(spec);
    if (out_path.empty() || out_path == "-") {
        std::cout << doc;
        return 0;
    }
    const std::filesystem::path parent = std::filesystem::path(out_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    write_file(out_path, doc);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

std::string stats_csv_header() {
    return "instance,K,L,rv,ra,policy,algorithm,opt,total_s,heur_pct,master_pct,"
           "re_pct,cg_pct,ssf_pct,firstS,secondS,heur_true,cg_true,ssf_iters,"
           "dom_scen,robust_value,hsp_pct";
}

RunReport execute_run(const CompatibilityGraph& g, const RunSpec& spec) {
    if (spec.K < 0 || spec.L < 0) {
        throw Error(ErrorKind::Validation, "K and L must be non-negative");
    }
    if (spec.rv < 0 || spec.ra < 0) {
        throw Error(ErrorKind::Validation, "failure budgets must be non-negative");
    }
    if (spec.ra_frac > 1.0) {
        throw Error(ErrorKind::Validation, "--ra-frac must lie in [0,1]");
    }
    const Deadline deadline =
        spec.time_limit > 0.0 ? Deadline(spec.time_limit) : Deadline::unlimited();
    const auto started = std::chrono::steady_clock::now();

    RunReport rep;
    rep.resolved_ra =
        spec.ra_frac >= 0.0 ? resolve_arc_budget(g, spec, deadline) : spec.ra;

    RobustConfig config;
    config.second_stage.algorithm = spec.algorithm;
    config.second_stage.tr = spec.tr;
    config.second_stage.seed = spec.seed;
    config.second_stage.deadline = deadline;
    rep.run = solve_robust(g, spec.K, spec.L, spec.policy,
                           Budget{spec.rv, rep.resolved_ra}, config);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    rep.total_s = spec.wall_timing ? wall : 0.0;

    // Binding scenario: the accepted scenario minimizing R(x*, gamma); the
    // empty scenario stands in when nothing in the pool hurts x*.
    const UnitCatalog catalog = build_catalog(g, spec.K, spec.L);
    const PolicyUnitSets units = policy_units(g, catalog, rep.run.x_star, spec.policy);
    SolveOptions recourse_options;
    recourse_options.seed = spec.seed;
    rep.binding = Scenario::empty_for(g);
    RecourseSolution best =
        solve_recourse_R(g, catalog, units, rep.binding, recourse_options).solution;
    for (const Scenario& gamma : rep.run.scenarios) {
        RecourseSolution candidate =
            solve_recourse_R(g, catalog, units, gamma, recourse_options).solution;
        if (candidate.value < best.value) {
            best = std::move(candidate);
            rep.binding = gamma;
        }
    }

    rep.hsp_pct = hsp_percentage(g, catalog, rep.run.x_star, best);
    rep.csv_row = build_csv_row(spec, rep);
    rep.scenario_json = scenario_to_json(rep.binding, g);
    rep.solution_json = build_solution_json(g, catalog, rep.run);
    rep.runlog = build_runlog(rep.run);
    return rep;
}

std::string generate_instance_json(const GenSpec& spec) {
    if (spec.pairs < 0 || spec.ndds < 0) {
        throw Error(ErrorKind::Validation, "pair and NDD counts must be non-negative");
    }
    if (spec.density < 0.0 || spec.density > 1.0) {
        throw Error(ErrorKind::Validation, "density must lie in [0,1]");
    }
    if (spec.pra_high_share < 0.0 || spec.pra_high_share > 1.0) {
        throw Error(ErrorKind::Validation, "PRA share must lie in [0,1]");
    }
    Rng rng(spec.seed);
    nlohmann::ordered_json doc;
    doc["vertices"] = nlohmann::ordered_json::array();
    for (int i = 1; i <= spec.pairs; ++i) {
        const bool high = rng.unit_real() < spec.pra_high_share;
        const double raw = high ? 90.0 + 10.0 * rng.unit_real() : 90.0 * rng.unit_real();
        nlohmann::ordered_json v;
        v["id"] = i;
        v["kind"] = "pair";
        v["pra"] = std::round(raw * 10.0) / 10.0;
        doc["vertices"].push_back(std::move(v));
    }
    for (int i = spec.pairs + 1; i <= spec.pairs + spec.ndds; ++i) {
        nlohmann::ordered_json v;
        v["id"] = i;
        v["kind"] = "ndd";
        v["pra"] = 0.0;
        doc["vertices"].push_back(std::move(v));
    }
    doc["arcs"] = nlohmann::ordered_json::array();
    auto add_arcs_from = [&](int from) {
        for (int to = 1; to <= spec.pairs; ++to) {
            if (to == from) continue;
            if (rng.unit_real() < spec.density) {
                nlohmann::ordered_json a;
                a["from"] = from;
                a["to"] = to;
                doc["arcs"].push_back(std::move(a));
            }
        }
    };
    for (int u = 1; u <= spec.pairs; ++u) add_arcs_from(u);
    for (int d = spec.pairs + 1; d <= spec.pairs + spec.ndds; ++d) add_arcs_from(d);
    return doc.dump(2) + "\n";
}

std::vector<RunSpec> parse_manifest(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("manifest: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("runs") || !doc["runs"].is_array()) {
        throw Error(ErrorKind::Parse, "manifest must be an object with a 'runs' array");
    }
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "defaults" && key != "runs") {
            throw Error(ErrorKind::Parse, "manifest: unknown top-level key '" + key + "'");
        }
    }
    RunSpec defaults;
    if (doc.contains("defaults")) apply_manifest_fields(defaults, doc["defaults"]);
    std::vector<RunSpec> specs;
    for (const auto& entry : doc["runs"]) {
        RunSpec spec = defaults;
        apply_manifest_fields(spec, entry);
        if (spec.instance.empty()) {
            throw Error(ErrorKind::Parse, "manifest run without an instance path");
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Exact solver for two-stage robust kidney exchange"};
    app.require_subcommand(1);

    RunSpec solve_spec;
    std::string solve_format = "json";
    std::string solve_policy = "full";
    std::string solve_algorithm = "hsa-me";
    std::string solve_timing = "wall";
    std::string solve_out;
    CLI::App* solve_cmd =
        app.add_subcommand("solve", "Solve one instance and write artifacts");
    solve_cmd->add_option("--instance", solve_spec.instance, "Instance file")
        ->required();
    solve_cmd->add_option("--format", solve_format, "Instance format")
        ->check(CLI::IsMember({"json", "edgelist"}));
    solve_cmd->add_option("--K", solve_spec.K, "Cycle length cap")
        ->check(CLI::Range(0, 1000));
    solve_cmd->add_option("--L", solve_spec.L, "Chain length cap (arcs)")
        ->check(CLI::Range(0, 1000));
    solve_cmd->add_option("--rv", solve_spec.rv, "Vertex failure budget")
        ->check(CLI::Range(0, 1000000));
    CLI::Option* ra_opt =
        solve_cmd->add_option("--ra", solve_spec.ra, "Arc failure budget")
            ->check(CLI::Range(0, 1000000));
    CLI::Option* ra_frac_opt =
        solve_cmd
            ->add_option("--ra-frac", solve_spec.ra_frac,
                         "Arc budget as a fraction of the deterministic "
                         "solution's arcs, rounded")
            ->check(CLI::Range(0.0, 1.0));
    ra_opt->excludes(ra_frac_opt);
    ra_frac_opt->excludes(ra_opt);
    solve_cmd->add_option("--policy", solve_policy, "Recourse policy")
        ->check(CLI::IsMember({"full", "first-stage-only"}));
    solve_cmd->add_option("--algorithm", solve_algorithm, "Second-stage algorithm")
        ->check(CLI::IsMember({"basic", "fbsa-mb", "fbsa-me", "hsa-mb", "hsa-me"}));
    solve_cmd->add_option("--tr", solve_spec.tr, "Hybrid switch-over iteration")
        ->check(CLI::Range(1, 1000000));
    solve_cmd->add_option("--time-limit", solve_spec.time_limit,
                          "Wall-clock limit in seconds; 0 disables");
    solve_cmd->add_option("--seed", solve_spec.seed, "Random seed");
    solve_cmd->add_option("--out", solve_out, "Output directory")->required();
    solve_cmd->add_option("--timing", solve_timing,
                          "wall: measured seconds; none: zero total with "
                          "tick-based percentages")
        ->check(CLI::IsMember({"wall", "none"}));

    std::string batch_manifest;
    std::string batch_out;
    std::string batch_timing = "wall";
    int batch_jobs = 1;
    CLI::App* batch_cmd =
        app.add_subcommand("batch", "Run a manifest of instances and aggregate stats");
    batch_cmd->add_option("--manifest", batch_manifest, "Manifest JSON file")
        ->required();
    batch_cmd->add_option("--out", batch_out, "Output directory")->required();
    batch_cmd->add_option("--jobs", batch_jobs, "Concurrent runs")
        ->check(CLI::Range(1, 256));
    batch_cmd->add_option("--timing", batch_timing, "wall or none")
        ->check(CLI::IsMember({"wall", "none"}));

    RunSpec oracle_spec;
    oracle_spec.time_limit = 0.0;
    std::string oracle_format = "json";
    std::string oracle_policy = "full";
    std::string oracle_algorithm = "hsa-me";
    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle", "Cross-check an algorithm against the exhaustive oracle");
    oracle_cmd->add_option("--instance", oracle_spec.instance, "Instance file")
        ->required();
    oracle_cmd->add_option("--format", oracle_format, "Instance format")
        ->check(CLI::IsMember({"json", "edgelist"}));
    oracle_cmd->add_option("--K", oracle_spec.K, "Cycle length cap")
        ->check(CLI::Range(0, 1000));
    oracle_cmd->add_option("--L", oracle_spec.L, "Chain length cap (arcs)")
        ->check(CLI::Range(0, 1000));
    oracle_cmd->add_option("--rv", oracle_spec.rv, "Vertex failure budget")
        ->check(CLI::Range(0, 1000000));
    oracle_cmd->add_option("--ra", oracle_spec.ra, "Arc failure budget")
        ->check(CLI::Range(0, 1000000));
    oracle_cmd->add_option("--policy", oracle_policy, "Recourse policy")
        ->check(CLI::IsMember({"full", "first-stage-only"}));
    oracle_cmd->add_option("--algorithm", oracle_algorithm, "Second-stage algorithm")
        ->check(CLI::IsMember({"basic", "fbsa-mb", "fbsa-me", "hsa-mb", "hsa-me"}));
    oracle_cmd->add_option("--tr", oracle_spec.tr, "Hybrid switch-over iteration")
        ->check(CLI::Range(1, 1000000));
    oracle_cmd->add_option("--seed", oracle_spec.seed, "Random seed");

    GenSpec gen_spec;
    std::string gen_out;
    CLI::App* gen_cmd =
        app.add_subcommand("gen", "Generate a random instance (JSON to stdout)");
    gen_cmd->add_option("--pairs", gen_spec.pairs, "Number of pairs")
        ->check(CLI::Range(0, 100000));
    gen_cmd->add_option("--ndds", gen_spec.ndds, "Number of non-directed donors")
        ->check(CLI::Range(0, 100000));
    gen_cmd->add_option("--density", gen_spec.density, "Arc probability")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--pra-high", gen_spec.pra_high_share,
                        "Share of pairs with PRA in [90,100]")
        ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", gen_spec.seed, "Random seed");
    gen_cmd->add_option("--out", gen_out, "Output file; '-' for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code_for(ErrorKind::Usage);
    }

    try {
        if (solve_cmd->parsed()) {
            solve_spec.format = format_from_name(solve_format);
            solve_spec.policy = policy_from_name(solve_policy);
            solve_spec.algorithm = algorithm_or_throw(solve_algorithm);
            solve_spec.wall_timing = solve_timing == "wall";
            return cmd_solve(solve_spec, solve_out);
        }
        if (batch_cmd->parsed()) {
            return cmd_batch(batch_manifest, batch_out, batch_jobs,
                             batch_timing == "wall");
        }
        if (oracle_cmd->parsed()) {
            oracle_spec.format = format_from_name(oracle_format);
            oracle_spec.policy = policy_from_name(oracle_policy);
            oracle_spec.algorithm = algorithm_or_throw(oracle_algorithm);
            return cmd_oracle(oracle_spec);
        }
        if (gen_cmd->parsed()) {
            return cmd_gen(gen_spec, gen_out);
        }
        return exit_code_for(ErrorKind::Usage);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace kepro
