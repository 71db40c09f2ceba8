#include "kepro/instance.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kepro {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) {
    throw Error(ErrorKind::Parse, what);
}

[[noreturn]] void validation_fail(const std::string& what) {
    throw Error(ErrorKind::Validation, what);
}

}  // namespace

int CompatibilityGraph::num_ndds() const {
    int n = 0;
    for (const auto& v : vertices) {
        if (v.kind == VertexKind::Ndd) ++n;
    }
    return n;
}

int CompatibilityGraph::vertex_index(long long external_id) const {
    if (id_cache_.empty() && !vertices.empty()) {
        for (int i = 0; i < num_vertices(); ++i) {
            id_cache_.emplace(vertices[i].id, i);
        }
    }
    auto it = id_cache_.find(external_id);
    return it == id_cache_.end() ? -1 : it->second;
}

int CompatibilityGraph::arc_index(int from, int to) const {
    if (arc_cache_.empty() && !arcs.empty()) {
        for (int a = 0; a < num_arcs(); ++a) {
            arc_cache_.emplace(static_cast<long long>(arcs[a].from) * num_vertices() +
                                   arcs[a].to,
                               a);
        }
    }
    auto it = arc_cache_.find(static_cast<long long>(from) * num_vertices() + to);
    return it == arc_cache_.end() ? -1 : it->second;
}

std::string CompatibilityGraph::arc_label(int arc_id) const {
    const ArcRecord& a = arcs[arc_id];
    std::ostringstream out;
    out << "(" << vertices[a.from].id << "," << vertices[a.to].id << ")";
    return out.str();
}

bool CompatibilityGraph::operator==(const CompatibilityGraph& other) const {
    if (vertices.size() != other.vertices.size() || arcs.size() != other.arcs.size()) {
        return false;
    }
    for (size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i].id != other.vertices[i].id ||
            vertices[i].kind != other.vertices[i].kind ||
            vertices[i].pra != other.vertices[i].pra) {
            return false;
        }
    }
    for (size_t i = 0; i < arcs.size(); ++i) {
        if (arcs[i].from != other.arcs[i].from || arcs[i].to != other.arcs[i].to) {
            return false;
        }
    }
    return true;
}

CompatibilityGraph finalize_graph(std::vector<VertexRecord> vertices,
                                  std::vector<std::pair<long long, long long>> arc_ids) {
    CompatibilityGraph g;
    g.vertices = std::move(vertices);

    std::unordered_map<long long, int> index;
    for (int i = 0; i < g.num_vertices(); ++i) {
        if (!index.emplace(g.vertices[i].id, i).second) {
            validation_fail("duplicate vertex id " + std::to_string(g.vertices[i].id));
        }
        if (g.vertices[i].pra < 0.0 || g.vertices[i].pra > 100.0) {
            validation_fail("PRA out of [0,100] for vertex " +
                            std::to_string(g.vertices[i].id));
        }
    }

    g.out_arcs.assign(g.num_vertices(), {});
    g.in_arcs.assign(g.num_vertices(), {});
    std::unordered_map<long long, int> seen_arcs;
    for (const auto& [from_id, to_id] : arc_ids) {
        auto fit = index.find(from_id);
        auto tit = index.find(to_id);
        if (fit == index.end() || tit == index.end()) {
            validation_fail("arc (" + std::to_string(from_id) + "," +
                            std::to_string(to_id) + ") references an unknown vertex");
        }
        const int from = fit->second, to = tit->second;
        if (from == to) {
            validation_fail("self-loop on vertex " + std::to_string(from_id));
        }
        // Every arc's head must be a pair: nothing can be donated to an NDD.
        if (g.vertices[to].kind == VertexKind::Ndd) {
            validation_fail("arc into non-directed donor " + std::to_string(to_id));
        }
        const long long key = static_cast<long long>(from) * g.num_vertices() + to;
        if (!seen_arcs.emplace(key, 1).second) {
            validation_fail("duplicate arc (" + std::to_string(from_id) + "," +
                            std::to_string(to_id) + ")");
        }
        const int arc_id = g.num_arcs();
        g.arcs.push_back({from, to});
        g.out_arcs[from].push_back(arc_id);
        g.in_arcs[to].push_back(arc_id);
    }
    return g;
}

namespace {

CompatibilityGraph parse_json_instance(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        parse_fail(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("arcs")) {
        parse_fail("instance JSON must be an object with 'vertices' and 'arcs'");
    }

    std::vector<VertexRecord> vertices;
    for (const auto& v : doc["vertices"]) {
        if (!v.is_object() || !v.contains("id")) {
            parse_fail("vertex record missing 'id'");
        }
        VertexRecord rec;
        rec.id = v["id"].get<long long>();
        std::string kind = v.value("kind", std::string("pair"));
        if (kind == "pair") {
            rec.kind = VertexKind::Pair;
        } else if (kind == "ndd") {
            rec.kind = VertexKind::Ndd;
        } else {
            parse_fail("vertex " + std::to_string(rec.id) + " has unknown kind '" +
                       kind + "'");
        }
        rec.pra = v.value("pra", 0.0);
        vertices.push_back(rec);
    }

    std::vector<std::pair<long long, long long>> arc_ids;
    for (const auto& a : doc["arcs"]) {
        if (a.is_object() && a.contains("from") && a.contains("to")) {
            arc_ids.emplace_back(a["from"].get<long long>(), a["to"].get<long long>());
        } else if (a.is_array() && a.size() == 2) {
            arc_ids.emplace_back(a[0].get<long long>(), a[1].get<long long>());
        } else {
            parse_fail("arc record must be {from,to} or [from,to]");
        }
    }
    return finalize_graph(std::move(vertices), std::move(arc_ids));
}

// EdgeList format: '#'-prefixed header lines, then one 'i j' arc per line.
//   # vertices: 1 2 3 ...     (optional; ids otherwise inferred from arcs)
//   # ndds: 8 ...             (external ids that are non-directed donors)
//   # pra: 1=97 3=95 ...      (id=value, omitted vertices default to 0)
CompatibilityGraph parse_edgelist_instance(std::istream& in) {
    std::vector<long long> declared_vertices;
    std::vector<long long> ndds;
    std::unordered_map<long long, double> pra;
    std::vector<std::pair<long long, long long>> arc_ids;
    std::vector<long long> arc_vertex_ids;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') {
            std::istringstream header(line.substr(start + 1));
            std::string tag;
            header >> tag;
            if (tag == "vertices:") {
                long long id;
                while (header >> id) declared_vertices.push_back(id);
            } else if (tag == "ndds:") {
                long long id;
                while (header >> id) ndds.push_back(id);
            } else if (tag == "pra:") {
                std::string item;
                while (header >> item) {
                    size_t eq = item.find('=');
                    if (eq == std::string::npos) {
                        parse_fail("line " + std::to_string(line_no) +
                                   ": pra entries must look like id=value");
                    }
                    try {
                        pra[std::stoll(item.substr(0, eq))] =
                            std::stod(item.substr(eq + 1));
                    } catch (const std::exception&) {
                        parse_fail("line " + std::to_string(line_no) +
                                   ": bad pra entry '" + item + "'");
                    }
                }
            }
            // Unknown header tags are comments.
            continue;
        }
        std::istringstream row(line.substr(start));
        long long u, v;
        if (!(row >> u >> v)) {
            parse_fail("line " + std::to_string(line_no) + ": expected 'i j'");
        }
        arc_ids.emplace_back(u, v);
        arc_vertex_ids.push_back(u);
        arc_vertex_ids.push_back(v);
    }

    std::vector<long long> ids = declared_vertices;
    if (ids.empty()) {
        ids = arc_vertex_ids;
        ids.insert(ids.end(), ndds.begin(), ndds.end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }

    std::vector<VertexRecord> vertices;
    for (long long id : ids) {
        VertexRecord rec;
        rec.id = id;
        rec.kind = std::find(ndds.begin(), ndds.end(), id) != ndds.end()
                       ? VertexKind::Ndd
                       : VertexKind::Pair;
        auto it = pra.find(id);
        rec.pra = it == pra.end() ? 0.0 : it->second;
        vertices.push_back(rec);
    }
    return finalize_graph(std::move(vertices), std::move(arc_ids));
}

}  // namespace

CompatibilityGraph parse_instance(std::istream& in, InstanceFormat format) {
    switch (format) {
        case InstanceFormat::Json: return parse_json_instance(in);
        case InstanceFormat::EdgeList: return parse_edgelist_instance(in);
    }
    throw Error(ErrorKind::Internal, "unknown instance format");
}

CompatibilityGraph load_instance(const std::string& path, InstanceFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Usage, "cannot open instance file: " + path);
    }
    return parse_instance(in, format);
}

std::string write_instance(const CompatibilityGraph& graph, InstanceFormat format) {
    if (format == InstanceFormat::Json) {
        json doc;
        doc["vertices"] = json::array();
        for (const auto& v : graph.vertices) {
            json rec;
            rec["id"] = v.id;
            rec["kind"] = v.kind == VertexKind::Ndd ? "ndd" : "pair";
            rec["pra"] = v.pra;
            doc["vertices"].push_back(rec);
        }
        doc["arcs"] = json::array();
        for (const auto& a : graph.arcs) {
            json rec;
            rec["from"] = graph.vertices[a.from].id;
            rec["to"] = graph.vertices[a.to].id;
            doc["arcs"].push_back(rec);
        }
        return doc.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "# vertices:";
    for (const auto& v : graph.vertices) out << " " << v.id;
    out << "\n# ndds:";
    for (const auto& v : graph.vertices) {
        if (v.kind == VertexKind::Ndd) out << " " << v.id;
    }
    out << "\n# pra:";
    for (const auto& v : graph.vertices) {
        if (v.pra != 0.0) out << " " << v.id << "=" << v.pra;
    }
    out << "\n";
    for (const auto& a : graph.arcs) {
        out << graph.vertices[a.from].id << " " << graph.vertices[a.to].id << "\n";
    }
    return out.str();
}

}  // namespace kepro
