#include "kepro/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>

#include "kepro/common.hpp"

namespace kepro {

namespace {

// Oracle-local survival check, kept independent of unit_fails on purpose.
bool survives(const ExchangeUnit& unit, const Scenario& gamma) {
    for (int v : unit.vertices) {
        if (gamma.vertex_fail[v]) return false;
    }
    for (int a : unit.arcs) {
        if (gamma.arc_fail[a]) return false;
    }
    return true;
}

// Count of subsets of size <= cap from n elements, saturating at limit + 1.
long long bounded_subset_count(int n, int cap, long long limit) {
    long long total = 0;
    long long layer = 1;  // C(n, 0)
    for (int k = 0; k <= cap; ++k) {
        total += layer;
        if (total > limit) return limit + 1;
        if (k >= n) break;
        if (layer > limit) return limit + 1;
        layer = layer * (n - k) / (k + 1);
    }
    return total;
}

struct DisjointSearch {
    int count = 0;
    std::vector<long long> weight;
    std::vector<std::uint32_t> conflict;  // unit-vs-unit shared-vertex mask
    std::vector<long long> suffix_best;   // sum of weights from index i on

    long long best = 0;

    void run(int i, std::uint32_t blocked, long long acc) {
        if (acc > best) best = acc;
        if (i >= count || acc + suffix_best[i] <= best) return;
        if (!(blocked & (std::uint32_t{1} << i))) {
            run(i + 1, blocked | conflict[i], acc + weight[i]);
        }
        run(i + 1, blocked, acc);
    }
};

}  // namespace

long long oracle_recourse(const CompatibilityGraph& g, const UnitCatalog& catalog,
                          const PolicyUnitSets& units, const Scenario& gamma) {
    std::vector<int> alive;
    for (int id : units.all_units()) {
        if (survives(catalog[id], gamma)) alive.push_back(id);
    }
    const int n = static_cast<int>(alive.size());
    if (n > kOracleUnitLimit) {
        throw Error(ErrorKind::SizeGuard,
                    "oracle_recourse: " + std::to_string(n) + " surviving units exceed " +
                        std::to_string(kOracleUnitLimit));
    }
    if (n == 0) return 0;

    std::vector<std::vector<std::uint8_t>> uses(n);
    DisjointSearch search;
    search.count = n;
    search.weight.resize(n);
    search.conflict.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        search.weight[i] = units.weight[alive[i]];
        uses[i].assign(g.num_vertices(), 0);
        for (int v : catalog[alive[i]].vertices) uses[i][v] = 1;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool clash = false;
            for (int v : catalog[alive[j]].vertices) {
                if (uses[i][v]) {
                    clash = true;
                    break;
                }
            }
            if (clash) {
                search.conflict[i] |= std::uint32_t{1} << j;
                search.conflict[j] |= std::uint32_t{1} << i;
            }
        }
    }
    search.suffix_best.assign(n + 1, 0);
    for (int i = n - 1; i >= 0; --i) {
        search.suffix_best[i] = search.suffix_best[i + 1] + search.weight[i];
    }
    search.run(0, 0, 0);
    return search.best;
}

SecondStageOracle oracle_second_stage(const CompatibilityGraph& g,
                                      const UnitCatalog& catalog,
                                      const Matching& x_tilde, Policy policy,
                                      const Budget& budget) {
    const TransitoryGraph transitory = build_transitory(g, catalog, x_tilde, policy);

    std::vector<int> t_vertices;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (transitory.elements.vertex_in[v]) t_vertices.push_back(v);
    }
    std::vector<int> t_arcs;
    for (int a = 0; a < g.num_arcs(); ++a) {
        if (transitory.elements.arc_in[a]) t_arcs.push_back(a);
    }

    const long long v_count = bounded_subset_count(
        static_cast<int>(t_vertices.size()), budget.r_v, kOracleScenarioLimit);
    const long long a_count = bounded_subset_count(
        static_cast<int>(t_arcs.size()), budget.r_a, kOracleScenarioLimit);
    if (v_count > kOracleScenarioLimit || a_count > kOracleScenarioLimit ||
        v_count * a_count > kOracleScenarioLimit) {
        throw Error(ErrorKind::SizeGuard,
                    "oracle_second_stage: scenario space exceeds " +
                        std::to_string(kOracleScenarioLimit));
    }

    SecondStageOracle best;
    best.scenario = Scenario::empty_for(g);
    bool have = false;

    Scenario gamma = Scenario::empty_for(g);

    // Enumerate arc subsets for the fixed vertex subset in gamma.
    auto evaluate = [&]() {
        const long long value = oracle_recourse(g, catalog, transitory.units, gamma);
        if (!have || value < best.value) {
            have = true;
            best.value = value;
            best.scenario = gamma;
        }
    };
    std::function<void(std::size_t, int)> arcs_from = [&](std::size_t idx, int left) {
        if (have && best.value == 0) return;
        evaluate();
        if (left == 0) return;
        for (std::size_t i = idx; i < t_arcs.size(); ++i) {
            gamma.arc_fail[t_arcs[i]] = 1;
            arcs_from(i + 1, left - 1);
            gamma.arc_fail[t_arcs[i]] = 0;
        }
    };
    std::function<void(std::size_t, int)> vertices_from = [&](std::size_t idx, int left) {
        if (have && best.value == 0) return;
        arcs_from(0, budget.r_a);
        if (left == 0) return;
        for (std::size_t i = idx; i < t_vertices.size(); ++i) {
            gamma.vertex_fail[t_vertices[i]] = 1;
            vertices_from(i + 1, left - 1);
            gamma.vertex_fail[t_vertices[i]] = 0;
        }
    };
    vertices_from(0, budget.r_v);
    return best;
}

RobustOracle oracle_robust(const CompatibilityGraph& g, int K, int L, Policy policy,
                           const Budget& budget) {
    const UnitCatalog catalog = build_catalog(g, K, L);
    const int n = catalog.size();

    std::vector<std::uint8_t> used(g.num_vertices(), 0);
    Matching current;
    long long examined = 0;

    RobustOracle best;
    best.scenario = Scenario::empty_for(g);
    bool have = false;

    auto evaluate = [&]() {
        if (++examined > kOracleMatchingLimit) {
            throw Error(ErrorKind::SizeGuard,
                        "oracle_robust: matching count exceeds " +
                            std::to_string(kOracleMatchingLimit));
        }
        const SecondStageOracle second =
            oracle_second_stage(g, catalog, current, policy, budget);
        if (!have || second.value > best.value) {
            have = true;
            best.value = second.value;
            best.matching = current;
            best.scenario = second.scenario;
        }
    };

    // Every vertex-disjoint subset is visited exactly once by extending with
    // units of strictly increasing id.
    std::function<void(int)> extend = [&](int from) {
        evaluate();
        for (int id = from; id < n; ++id) {
            const ExchangeUnit& unit = catalog[id];
            bool clash = false;
            for (int v : unit.vertices) {
                if (used[v]) {
                    clash = true;
                    break;
                }
            }
            if (clash) continue;
            for (int v : unit.vertices) used[v] = 1;
            current.unit_ids.push_back(id);
            extend(id + 1);
            current.unit_ids.pop_back();
            for (int v : unit.vertices) used[v] = 0;
        }
    };
    extend(0);
    return best;
}

}  // namespace kepro
