#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "kepro/common.hpp"

namespace kepro {

enum class VertexKind { Pair, Ndd };

struct VertexRecord {
    long long id = 0;     // external label, preserved through round-trips
    VertexKind kind = VertexKind::Pair;
    double pra = 0.0;     // panel reactive antibody, 0..100; 0 when absent
};

struct ArcRecord {
    int from = -1;  // internal vertex indices
    int to = -1;
};

enum class InstanceFormat { Json, EdgeList };

// Directed compatibility graph D = (V, A). Vertices are pairs or non-directed
// donors; arcs always point into a pair. Internal indices are dense 0-based;
// external ids live in VertexRecord and are what files and logs use.
struct CompatibilityGraph {
    std::vector<VertexRecord> vertices;
    std::vector<ArcRecord> arcs;
    std::vector<std::vector<int>> out_arcs;  // vertex -> arc ids leaving it
    std::vector<std::vector<int>> in_arcs;   // vertex -> arc ids entering it

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_arcs() const { return static_cast<int>(arcs.size()); }
    bool is_ndd(int v) const { return vertices[v].kind == VertexKind::Ndd; }
    bool is_pair(int v) const { return vertices[v].kind == VertexKind::Pair; }
    int num_ndds() const;
    int num_pairs() const { return num_vertices() - num_ndds(); }

    // -1 when no such vertex / arc exists.
    int vertex_index(long long external_id) const;
    int arc_index(int from, int to) const;

    std::string arc_label(int arc_id) const;  // "(u,v)" with external ids

    bool operator==(const CompatibilityGraph& other) const;

private:
    mutable std::unordered_map<long long, int> id_cache_;
    mutable std::unordered_map<long long, int> arc_cache_;
    friend CompatibilityGraph finalize_graph(std::vector<VertexRecord>,
                                             std::vector<std::pair<long long, long long>>);
};

// Builds adjacency, validates, and returns the finished graph. Arc endpoints
// are given as external ids. Throws Error{Validation} on dangling ids, arcs
// into an NDD, self-loops, or duplicate arcs.
CompatibilityGraph finalize_graph(std::vector<VertexRecord> vertices,
                                  std::vector<std::pair<long long, long long>> arc_ids);

CompatibilityGraph parse_instance(std::istream& in, InstanceFormat format);
CompatibilityGraph load_instance(const std::string& path, InstanceFormat format);
std::string write_instance(const CompatibilityGraph& graph, InstanceFormat format);

// PRA threshold for "highly sensitized" patients.
inline constexpr double kHighSensitizationPra = 90.0;

}  // namespace kepro
