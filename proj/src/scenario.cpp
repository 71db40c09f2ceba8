#include "kepro/scenario.hpp"

#include <numeric>
#include <sstream>

#include <json.hpp>

namespace kepro {

int Scenario::vertex_count() const {
    return std::accumulate(vertex_fail.begin(), vertex_fail.end(), 0);
}

int Scenario::arc_count() const {
    return std::accumulate(arc_fail.begin(), arc_fail.end(), 0);
}

std::vector<int> Scenario::failed_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(vertex_fail.size()); ++v) {
        if (vertex_fail[v]) out.push_back(v);
    }
    return out;
}

std::vector<int> Scenario::failed_arcs() const {
    std::vector<int> out;
    for (int a = 0; a < static_cast<int>(arc_fail.size()); ++a) {
        if (arc_fail[a]) out.push_back(a);
    }
    return out;
}

std::string Scenario::to_string(const CompatibilityGraph& g) const {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (int v : failed_vertices()) {
        out << (first ? "" : ", ") << "v" << g.vertices[v].id;
        first = false;
    }
    for (int a : failed_arcs()) {
        out << (first ? "" : ", ") << "a" << g.arc_label(a);
        first = false;
    }
    out << "}";
    return out.str();
}

std::string scenario_to_json(const Scenario& s, const CompatibilityGraph& g) {
    nlohmann::json doc;
    doc["vertices"] = nlohmann::json::array();
    for (int v : s.failed_vertices()) {
        doc["vertices"].push_back(g.vertices[v].id);
    }
    doc["arcs"] = nlohmann::json::array();
    for (int a : s.failed_arcs()) {
        doc["arcs"].push_back({g.vertices[g.arcs[a].from].id,
                               g.vertices[g.arcs[a].to].id});
    }
    return doc.dump();
}

Scenario scenario_from_json(const std::string& text, const CompatibilityGraph& g) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("invalid scenario JSON: ") + e.what());
    }
    Scenario s = Scenario::empty_for(g);
    for (const auto& id : doc.value("vertices", nlohmann::json::array())) {
        int v = g.vertex_index(id.get<long long>());
        if (v < 0) {
            throw Error(ErrorKind::Validation,
                        "scenario names unknown vertex " + id.dump());
        }
        s.vertex_fail[v] = 1;
    }
    for (const auto& pair : doc.value("arcs", nlohmann::json::array())) {
        if (!pair.is_array() || pair.size() != 2) {
            throw Error(ErrorKind::Parse, "scenario arcs must be [from,to] pairs");
        }
        int from = g.vertex_index(pair[0].get<long long>());
        int to = g.vertex_index(pair[1].get<long long>());
        int a = (from >= 0 && to >= 0) ? g.arc_index(from, to) : -1;
        if (a < 0) {
            throw Error(ErrorKind::Validation,
                        "scenario names unknown arc " + pair.dump());
        }
        s.arc_fail[a] = 1;
    }
    return s;
}

}  // namespace kepro
