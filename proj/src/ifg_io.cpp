#include "dift/errors.hpp"
#include "dift/ifg.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dift::ifg {

using nlohmann::json;

namespace {

std::vector<NodeId> id_list(const json& arr, const char* what) {
    if (!arr.is_array()) throw ParseError(std::string(what) + " must be an array of node ids");
    std::vector<NodeId> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer()) throw ParseError(std::string(what) + " must contain integers");
        out.push_back(v.get<NodeId>());
    }
    return out;
}

} // namespace

LoadedGraph parse_graph_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("graph JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw ParseError("graph JSON must be an object with a 'nodes' array");
    }

    LoadedGraph out;
    const auto& nodes = doc["nodes"];
    if (nodes.empty()) throw ValidationError("empty graph");
    std::vector<Node> parsed;
    try {
        for (const auto& n : nodes) {
            Node node;
            node.id = n.at("id").get<NodeId>();
            node.kind = parse_node_kind(n.value("kind", std::string("other")));
            node.label = n.value("label", std::to_string(node.id));
            parsed.push_back(std::move(node));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("graph JSON node: ") + e.what());
    }
    std::sort(parsed.begin(), parsed.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (parsed[i].id != static_cast<NodeId>(i)) {
            throw ValidationError("node ids must be unique and dense from 0 (problem at id " +
                                  std::to_string(parsed[i].id) + ")");
        }
    }
    out.graph.nodes = std::move(parsed);
    const auto n = static_cast<NodeId>(out.graph.nodes.size());

    if (doc.contains("edges")) {
        const auto& edges = doc["edges"];
        if (!edges.is_array()) throw ParseError("'edges' must be an array");
        for (const auto& e : edges) {
            NodeId u = 0;
            NodeId v = 0;
            try {
                if (e.is_array() && e.size() == 2) {
                    u = e[0].get<NodeId>();
                    v = e[1].get<NodeId>();
                } else {
                    u = e.at("src").get<NodeId>();
                    v = e.at("dst").get<NodeId>();
                }
            } catch (const json::exception& ex) {
                throw ParseError(std::string("graph JSON edge: ") + ex.what());
            }
            if (u < 0 || u >= n || v < 0 || v >= n) {
                throw ValidationError("edge " + std::to_string(u) + "->" + std::to_string(v) +
                                      " references an unknown node");
            }
            if (u == v) {
                ++out.report.self_loops_dropped;
                continue;
            }
            out.graph.edges.emplace_back(u, v);
        }
    }

    if (doc.contains("entries")) out.surface.entries = id_list(doc["entries"], "entries");
    if (doc.contains("destinations")) {
        const auto& d = doc["destinations"];
        if (!d.is_array()) throw ParseError("'destinations' must be an array of arrays");
        for (const auto& dj : d) out.surface.destinations.push_back(id_list(dj, "destinations"));
    }
    auto check = [n](NodeId u) {
        if (u < 0 || u >= n) throw ValidationError("attack surface references unknown node " + std::to_string(u));
    };
    for (NodeId u : out.surface.entries) check(u);
    for (const auto& dj : out.surface.destinations) {
        for (NodeId u : dj) check(u);
    }
    return out;
}

LoadedGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph_json(buf.str());
}

std::string dump_graph_json(const Graph& graph, const AttackSurface& surface) {
    json doc;
    doc["nodes"] = json::array();
    for (const auto& n : graph.nodes) {
        doc["nodes"].push_back({{"id", n.id}, {"kind", std::string(to_string(n.kind))}, {"label", n.label}});
    }
    doc["edges"] = json::array();
    for (const auto& [u, v] : graph.edges) doc["edges"].push_back({u, v});
    doc["entries"] = surface.entries;
    doc["destinations"] = surface.destinations;
    return doc.dump(2) + "\n";
}

} // namespace dift::ifg
