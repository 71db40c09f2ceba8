#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kepro/instance.hpp"

namespace kepro {

struct Budget {
    int r_v = 0;  // max vertex failures
    int r_a = 0;  // max arc failures
};

// Failure scenario gamma = (gamma^v, gamma^a): bit vectors sized to the
// first-stage graph (|V| and |A|), not to the transitory graph; observability
// is enforced by which constraints reference each element.
struct Scenario {
    std::vector<std::uint8_t> vertex_fail;
    std::vector<std::uint8_t> arc_fail;

    Scenario() = default;
    Scenario(int num_vertices, int num_arcs)
        : vertex_fail(num_vertices, 0), arc_fail(num_arcs, 0) {}
    static Scenario empty_for(const CompatibilityGraph& g) {
        return Scenario(g.num_vertices(), g.num_arcs());
    }

    int vertex_count() const;
    int arc_count() const;
    int total_count() const { return vertex_count() + arc_count(); }  // I(gamma)
    bool is_empty() const { return total_count() == 0; }

    std::vector<int> failed_vertices() const;
    std::vector<int> failed_arcs() const;

    bool within(const Budget& b) const {
        return vertex_count() <= b.r_v && arc_count() <= b.r_a;
    }

    bool operator==(const Scenario& other) const = default;

    std::string to_string(const CompatibilityGraph& g) const;  // {v2, a(5,6)}
};

// JSON round-trip uses external vertex ids and (from,to) id pairs.
std::string scenario_to_json(const Scenario& s, const CompatibilityGraph& g);
Scenario scenario_from_json(const std::string& text, const CompatibilityGraph& g);

}  // namespace kepro
