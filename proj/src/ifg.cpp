#include "dift/ifg.hpp"

#include "dift/errors.hpp"
#include "dift/rng.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace dift::ifg {

namespace {

using Adjacency = std::vector<std::vector<NodeId>>;

std::size_t idx(NodeId u) { return static_cast<std::size_t>(u); }

Adjacency out_adjacency(const Graph& g) {
    Adjacency adj(g.nodes.size());
    for (const auto& [u, v] : g.edges) adj[idx(u)].push_back(v);
    return adj;
}

Adjacency in_adjacency(const Graph& g) {
    Adjacency adj(g.nodes.size());
    for (const auto& [u, v] : g.edges) adj[idx(v)].push_back(u);
    return adj;
}

/// Nodes reachable from any seed by a walk of length >= 0.
std::vector<bool> reach_from(const Adjacency& adj, std::span<const NodeId> seeds) {
    std::vector<bool> seen(adj.size(), false);
    std::deque<NodeId> queue;
    for (NodeId s : seeds) {
        if (!seen[idx(s)]) {
            seen[idx(s)] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        for (NodeId w : adj[idx(u)]) {
            if (!seen[idx(w)]) {
                seen[idx(w)] = true;
                queue.push_back(w);
            }
        }
    }
    return seen;
}

void check_surface_ids(const Graph& g, const AttackSurface& s) {
    const auto n = static_cast<NodeId>(g.nodes.size());
    auto in_range = [n](NodeId u) { return u >= 0 && u < n; };
    for (NodeId e : s.entries) {
        if (!in_range(e)) throw ValidationError("entry id " + std::to_string(e) + " is not a node");
    }
    for (const auto& dj : s.destinations) {
        for (NodeId d : dj) {
            if (!in_range(d)) throw ValidationError("destination id " + std::to_string(d) + " is not a node");
        }
    }
}

/// Nodes satisfying the retained-node predicate of the pruning step.
std::vector<bool> qualifying_nodes(const Graph& g, const AttackSurface& s) {
    const Adjacency out = out_adjacency(g);
    const Adjacency in = in_adjacency(g);
    const std::size_t n = g.nodes.size();
    const int m = s.stages();

    std::vector<bool> keep(n, false);
    for (NodeId e : s.entries) keep[idx(e)] = true;
    for (const auto& dj : s.destinations) {
        for (NodeId d : dj) keep[idx(d)] = true;
    }
    if (m == 0) return keep;

    const auto from_entries = reach_from(out, s.entries);
    const auto to_first = reach_from(in, s.destinations[0]);
    for (std::size_t u = 0; u < n; ++u) {
        if (from_entries[u] && to_first[u]) keep[u] = true;
    }

    std::vector<std::vector<bool>> fwd(static_cast<std::size_t>(m));
    std::vector<std::vector<bool>> bwd(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        fwd[static_cast<std::size_t>(j)] = reach_from(out, s.destinations[static_cast<std::size_t>(j)]);
        bwd[static_cast<std::size_t>(j)] = reach_from(in, s.destinations[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < m; ++j) {
        for (int jp = 0; jp < m; ++jp) {
            if (j == jp) continue;
            const auto& f = fwd[static_cast<std::size_t>(j)];
            const auto& b = bwd[static_cast<std::size_t>(jp)];
            for (std::size_t u = 0; u < n; ++u) {
                if (f[u] && b[u]) keep[u] = true;
            }
        }
    }
    return keep;
}

bool entries_reach_first_stage(const Graph& g, const AttackSurface& s) {
    if (s.entries.empty() || s.destinations.empty()) return false;
    const auto reach = reach_from(out_adjacency(g), s.entries);
    return std::any_of(s.destinations[0].begin(), s.destinations[0].end(),
                       [&](NodeId d) { return reach[idx(d)]; });
}

std::vector<NodeId> remap_unique(std::span<const NodeId> ids, std::span<const NodeId> map) {
    std::vector<NodeId> out;
    for (NodeId u : ids) {
        NodeId v = map[idx(u)];
        if (v >= 0 && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

AttackSurface remap_surface(const AttackSurface& s, std::span<const NodeId> map) {
    AttackSurface out;
    out.entries = remap_unique(s.entries, map);
    for (const auto& dj : s.destinations) out.destinations.push_back(remap_unique(dj, map));
    return out;
}

/// Tarjan's algorithm, iterative. Returns component id per node.
std::vector<int> strongly_connected(const Adjacency& adj, int& count) {
    const std::size_t n = adj.size();
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<NodeId> stack;
    int next_index = 0;
    count = 0;

    struct Frame {
        NodeId node;
        std::size_t child;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> frames{{static_cast<NodeId>(root), 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(static_cast<NodeId>(root));
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const std::size_t u = idx(f.node);
            if (f.child < adj[u].size()) {
                const std::size_t w = idx(adj[u][f.child++]);
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(static_cast<NodeId>(w));
                    on_stack[w] = true;
                    frames.push_back({static_cast<NodeId>(w), 0});
                } else if (on_stack[w]) {
                    low[u] = std::min(low[u], index[w]);
                }
                continue;
            }
            if (low[u] == index[u]) {
                NodeId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[idx(w)] = false;
                    comp[idx(w)] = count;
                } while (idx(w) != u);
                ++count;
            }
            frames.pop_back();
            if (!frames.empty()) {
                const std::size_t p = idx(frames.back().node);
                low[p] = std::min(low[p], low[u]);
            }
        }
    }
    return comp;
}

/// DFS preorder rank of every node, roots taken in id order.
std::vector<int> dfs_preorder(const Adjacency& adj) {
    const std::size_t n = adj.size();
    std::vector<int> order(n, -1);
    int next = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (order[root] >= 0) continue;
        std::vector<std::pair<NodeId, std::size_t>> frames{{static_cast<NodeId>(root), 0}};
        order[root] = next++;
        while (!frames.empty()) {
            auto& [u, child] = frames.back();
            if (child < adj[idx(u)].size()) {
                NodeId w = adj[idx(u)][child++];
                if (order[idx(w)] < 0) {
                    order[idx(w)] = next++;
                    frames.emplace_back(w, 0);
                }
            } else {
                frames.pop_back();
            }
        }
    }
    return order;
}

} // namespace

std::string_view to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::process: return "process";
    case NodeKind::file: return "file";
    case NodeKind::socket: return "socket";
    case NodeKind::other: return "other";
    }
    return "other";
}

NodeKind parse_node_kind(std::string_view text) {
    if (text == "process") return NodeKind::process;
    if (text == "file") return NodeKind::file;
    if (text == "socket") return NodeKind::socket;
    if (text == "other") return NodeKind::other;
    throw ValidationError("unknown node kind '" + std::string(text) + "'");
}

int VersionedGraph::added_versions() const {
    return static_cast<int>(std::count_if(version.begin(), version.end(), [](int v) { return v > 0; }));
}

Graph collapse_multi_edges(const Graph& graph) {
    Graph out;
    out.nodes = graph.nodes;
    std::set<Edge> seen;
    for (const Edge& e : graph.edges) {
        if (seen.insert(e).second) out.edges.push_back(e);
    }
    return out;
}

Subgraph prune_attack_subgraph(const Graph& graph, const AttackSurface& surface) {
    if (surface.destinations.empty()) throw ValidationError("attack surface has no stages");
    check_surface_ids(graph, surface);
    if (!entries_reach_first_stage(graph, surface)) {
        throw InfeasibleError("no information-flow path from an entry point to a stage-1 destination");
    }
    const auto keep = qualifying_nodes(graph, surface);

    Subgraph out;
    std::vector<NodeId> map(graph.nodes.size(), -1);
    for (std::size_t u = 0; u < graph.nodes.size(); ++u) {
        if (!keep[u]) continue;
        map[u] = static_cast<NodeId>(out.graph.nodes.size());
        Node node = graph.nodes[u];
        node.id = map[u];
        out.graph.nodes.push_back(std::move(node));
        out.origin.push_back(static_cast<NodeId>(u));
    }
    for (const auto& [u, v] : graph.edges) {
        if (map[idx(u)] >= 0 && map[idx(v)] >= 0) out.graph.edges.emplace_back(map[idx(u)], map[idx(v)]);
    }
    out.surface = remap_surface(surface, map);
    return out;
}

Subgraph merge_directory_nodes(const Graph& graph, const AttackSurface& surface,
                               std::span<const DirectoryGroup> groups) {
    const std::size_t n = graph.nodes.size();
    // group index per node, -1 when not merged
    std::vector<int> group_of(n, -1);
    for (std::size_t u = 0; u < n; ++u) {
        const Node& node = graph.nodes[u];
        if (node.kind != NodeKind::file) continue;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) {
            if (node.label.starts_with(groups[gi].prefix)) {
                group_of[u] = static_cast<int>(gi);
                break;
            }
        }
    }

    Subgraph out;
    std::vector<NodeId> map(n, -1);
    std::vector<NodeId> group_node(groups.size(), -1);
    for (std::size_t u = 0; u < n; ++u) {
        const int gi = group_of[u];
        if (gi >= 0 && group_node[static_cast<std::size_t>(gi)] >= 0) {
            map[u] = group_node[static_cast<std::size_t>(gi)];
            continue;
        }
        const auto id = static_cast<NodeId>(out.graph.nodes.size());
        map[u] = id;
        Node node = graph.nodes[u];
        node.id = id;
        if (gi >= 0) {
            node.label = groups[static_cast<std::size_t>(gi)].merged_label;
            group_node[static_cast<std::size_t>(gi)] = id;
        }
        out.graph.nodes.push_back(std::move(node));
        out.origin.push_back(static_cast<NodeId>(u));
    }

    Graph remapped{out.graph.nodes, {}};
    for (const auto& [u, v] : graph.edges) {
        NodeId a = map[idx(u)];
        NodeId b = map[idx(v)];
        if (a != b) remapped.edges.emplace_back(a, b);
    }
    out.graph = collapse_multi_edges(remapped);
    out.surface = remap_surface(surface, map);
    return out;
}

bool is_acyclic(const Graph& graph) {
    const std::size_t n = graph.nodes.size();
    std::vector<int> indegree(n, 0);
    const Adjacency out = out_adjacency(graph);
    for (const auto& [u, v] : graph.edges) {
        if (u == v) return false;
        ++indegree[idx(v)];
    }
    std::vector<NodeId> ready;
    for (std::size_t u = 0; u < n; ++u) {
        if (indegree[u] == 0) ready.push_back(static_cast<NodeId>(u));
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        NodeId u = ready.back();
        ready.pop_back();
        ++visited;
        for (NodeId w : out[idx(u)]) {
            if (--indegree[idx(w)] == 0) ready.push_back(w);
        }
    }
    return visited == n;
}

std::vector<std::vector<bool>> reachability(const Graph& graph) {
    const Adjacency out = out_adjacency(graph);
    const std::size_t n = graph.nodes.size();
    std::vector<std::vector<bool>> result(n);
    for (std::size_t u = 0; u < n; ++u) {
        // seed with successors so that u itself is included only via a cycle
        std::vector<bool> r = reach_from(out, out[u]);
        result[u] = std::move(r);
    }
    return result;
}

VersionedGraph remove_cycles_by_versioning(const Graph& graph, const AttackSurface& surface) {
    const std::size_t n = graph.nodes.size();
    Adjacency out(n);
    for (const auto& [u, v] : graph.edges) {
        if (u != v) out[idx(u)].push_back(v);
    }

    int n_comp = 0;
    const std::vector<int> comp = strongly_connected(out, n_comp);
    std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(n_comp));
    for (std::size_t u = 0; u < n; ++u) members[static_cast<std::size_t>(comp[u])].push_back(static_cast<NodeId>(u));

    const std::vector<int> preorder = dfs_preorder(out);
    std::vector<NodeId> pivot(static_cast<std::size_t>(n_comp), -1);
    for (std::size_t c = 0; c < members.size(); ++c) {
        pivot[c] = *std::max_element(members[c].begin(), members[c].end(),
                                     [&](NodeId a, NodeId b) { return preorder[idx(a)] < preorder[idx(b)]; });
    }

    VersionedGraph result;
    result.graph.nodes = graph.nodes;
    result.origin.resize(n);
    std::iota(result.origin.begin(), result.origin.end(), 0);
    result.version.assign(n, 0);

    // outbound version of u; equal to u for singletons and pivots
    std::vector<NodeId> outbound(n);
    std::iota(outbound.begin(), outbound.end(), 0);
    for (std::size_t u = 0; u < n; ++u) {
        const auto c = static_cast<std::size_t>(comp[u]);
        if (members[c].size() < 2 || pivot[c] == static_cast<NodeId>(u)) continue;
        const auto id = static_cast<NodeId>(result.graph.nodes.size());
        Node copy = graph.nodes[u];
        copy.id = id;
        copy.label += "#1";
        result.graph.nodes.push_back(std::move(copy));
        result.origin.push_back(static_cast<NodeId>(u));
        result.version.push_back(1);
        outbound[u] = id;
    }

    std::set<Edge> added;
    auto add = [&](NodeId a, NodeId b) {
        if (added.insert({a, b}).second) result.graph.edges.emplace_back(a, b);
    };
    // origin pairs already carried by some version edge
    std::set<Edge> covered;

    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].size() < 2) continue;
        const NodeId r = pivot[c];
        auto inside = [&](NodeId w) { return comp[idx(w)] == static_cast<int>(c); };

        // reverse BFS: inbound versions drain into the pivot
        std::vector<bool> seen(n, false);
        std::deque<NodeId> queue{r};
        seen[idx(r)] = true;
        Adjacency in(n);
        for (NodeId u : members[c]) {
            for (NodeId w : out[idx(u)]) {
                if (inside(w)) in[idx(w)].push_back(u);
            }
        }
        while (!queue.empty()) {
            NodeId x = queue.front();
            queue.pop_front();
            for (NodeId w : in[idx(x)]) {
                if (seen[idx(w)]) continue;
                seen[idx(w)] = true;
                add(w, x);
                covered.insert({w, x});
                queue.push_back(w);
            }
        }

        // forward BFS: outbound versions fed from the pivot
        std::fill(seen.begin(), seen.end(), false);
        queue = {r};
        seen[idx(r)] = true;
        while (!queue.empty()) {
            NodeId x = queue.front();
            queue.pop_front();
            for (NodeId w : out[idx(x)]) {
                if (!inside(w) || seen[idx(w)]) continue;
                seen[idx(w)] = true;
                add(outbound[idx(x)], outbound[idx(w)]);
                covered.insert({x, w});
                queue.push_back(w);
            }
        }
    }

    for (const auto& [u, v] : graph.edges) {
        if (u == v) continue;
        if (comp[idx(u)] != comp[idx(v)]) {
            add(outbound[idx(u)], v);
        } else if (!covered.contains({u, v})) {
            add(u, outbound[idx(v)]);
            covered.insert({u, v});
        }
    }

    result.surface.entries = surface.entries;
    for (const auto& dj : surface.destinations) {
        std::vector<NodeId> d = dj;
        for (NodeId u : dj) {
            if (outbound[idx(u)] != u) d.push_back(outbound[idx(u)]);
        }
        result.surface.destinations.push_back(std::move(d));
    }
    return result;
}

std::vector<std::string> invariant_violations(const Graph& graph, const AttackSurface& surface) {
    std::vector<std::string> errors;
    const std::size_t n = graph.nodes.size();
    if (n == 0) {
        errors.emplace_back("empty graph");
        return errors;
    }
    for (std::size_t u = 0; u < n; ++u) {
        if (graph.nodes[u].id != static_cast<NodeId>(u)) {
            errors.push_back("node ids are not dense at position " + std::to_string(u));
            return errors;
        }
    }
    std::set<Edge> seen;
    for (const auto& [u, v] : graph.edges) {
        if (u < 0 || v < 0 || idx(u) >= n || idx(v) >= n) {
            errors.push_back("edge references unknown node");
            return errors;
        }
        if (u == v) errors.push_back("self-loop at node " + std::to_string(u));
        if (!seen.insert({u, v}).second) {
            errors.push_back("parallel edge " + std::to_string(u) + "->" + std::to_string(v));
        }
    }
    if (!is_acyclic(graph)) errors.emplace_back("graph is not acyclic");
    if (surface.stages() < 1) {
        errors.emplace_back("no destination stages");
        return errors;
    }
    if (surface.entries.empty()) errors.emplace_back("no entry points");
    for (int j = 0; j < surface.stages(); ++j) {
        if (surface.destinations[static_cast<std::size_t>(j)].empty()) {
            errors.push_back("destination set of stage " + std::to_string(j + 1) + " is empty");
        }
    }
    try {
        check_surface_ids(graph, surface);
    } catch (const ValidationError& e) {
        errors.emplace_back(e.what());
        return errors;
    }
    for (int j = 0; j < surface.stages(); ++j) {
        for (NodeId e : surface.entries) {
            const auto& dj = surface.destinations[static_cast<std::size_t>(j)];
            if (std::find(dj.begin(), dj.end(), e) != dj.end()) {
                errors.push_back("entry " + std::to_string(e) + " is also a stage-" + std::to_string(j + 1) + " destination");
            }
        }
    }
    if (!errors.empty()) return errors;
    if (!entries_reach_first_stage(graph, surface)) {
        errors.emplace_back("no entry reaches a stage-1 destination");
    }
    const auto keep = qualifying_nodes(graph, surface);
    for (std::size_t u = 0; u < n; ++u) {
        if (!keep[u]) errors.push_back("node " + std::to_string(u) + " lies on no attack path");
    }
    return errors;
}

Ifg Ifg::create(Graph graph, AttackSurface surface) {
    const auto errors = invariant_violations(graph, surface);
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid information-flow graph:";
        for (const auto& e : errors) msg << "\n  - " << e;
        throw ValidationError(msg.str());
    }
    Ifg g;
    g.graph_ = std::move(graph);
    g.surface_ = std::move(surface);
    const std::size_t n = g.graph_.nodes.size();
    g.out_.assign(n, {});
    for (const auto& [u, v] : g.graph_.edges) g.out_[idx(u)].push_back(v);
    for (auto& nbrs : g.out_) std::sort(nbrs.begin(), nbrs.end());
    g.entry_.assign(n, false);
    for (NodeId e : g.surface_.entries) g.entry_[idx(e)] = true;
    g.dest_.assign(static_cast<std::size_t>(g.stages()), std::vector<bool>(n, false));
    for (int j = 0; j < g.stages(); ++j) {
        for (NodeId d : g.surface_.destinations[static_cast<std::size_t>(j)]) g.dest_[static_cast<std::size_t>(j)][idx(d)] = true;
    }
    return g;
}

bool Ifg::is_destination(NodeId u, int stage) const {
    if (stage < 1 || stage > stages()) return false;
    return dest_[static_cast<std::size_t>(stage - 1)][idx(u)];
}

Ifg prune_pipeline(const LoadedGraph& input, std::span<const DirectoryGroup> groups,
                   PipelineReport* report) {
    const Graph collapsed = collapse_multi_edges(input.graph);
    Subgraph pruned = prune_attack_subgraph(collapsed, input.surface);
    if (!groups.empty()) pruned = merge_directory_nodes(pruned.graph, pruned.surface, groups);
    const VersionedGraph versioned = remove_cycles_by_versioning(pruned.graph, pruned.surface);
    if (!is_acyclic(versioned.graph)) throw std::logic_error("versioning left a cycle");
    Subgraph final_graph = prune_attack_subgraph(versioned.graph, versioned.surface);
    if (report != nullptr) {
        report->input_nodes = input.graph.node_count();
        report->input_edges = input.graph.edge_count();
        report->output_nodes = final_graph.graph.node_count();
        report->output_edges = final_graph.graph.edge_count();
        report->self_loops_dropped = input.report.self_loops_dropped;
        report->added_versions = versioned.added_versions();
    }
    return Ifg::create(std::move(final_graph.graph), std::move(final_graph.surface));
}

Ifg generate_synthetic(const SyntheticParams& p) {
    if (p.nodes <= 0 || p.stages < 1 || p.entries < 1) {
        throw InfeasibleError("synthetic graph needs nodes > 0, stages >= 1, entries >= 1");
    }
    if (static_cast<int>(p.dests_per_stage.size()) != p.stages) {
        throw InfeasibleError("dests_per_stage must list one count per stage");
    }
    if (std::any_of(p.dests_per_stage.begin(), p.dests_per_stage.end(), [](int d) { return d < 1; })) {
        throw InfeasibleError("every stage needs at least one destination");
    }
    if (!(p.edge_density > 0.0 && p.edge_density <= 1.0)) {
        throw InfeasibleError("edge_density must lie in (0, 1]");
    }
    const int total_dests = std::accumulate(p.dests_per_stage.begin(), p.dests_per_stage.end(), 0);
    if (p.nodes < p.entries + total_dests) {
        throw InfeasibleError("nodes must be at least entries + total destinations");
    }

    const int n_inter = p.nodes - p.entries - total_dests;
    const auto m = static_cast<std::size_t>(p.stages);

    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        CounterRng rng(p.seed, attempt);
        auto pick = [&rng](std::size_t count) {
            return static_cast<std::size_t>(rng.uniform() * static_cast<double>(count));
        };

        std::vector<int> inter_per_stage(m, 0);
        for (int i = 0; i < n_inter; ++i) ++inter_per_stage[pick(m)];

        Graph g;
        AttackSurface s;
        s.destinations.resize(m);
        auto add_node = [&g](NodeKind kind, std::string label) {
            const auto id = static_cast<NodeId>(g.nodes.size());
            g.nodes.push_back({id, kind, std::move(label)});
            return id;
        };
        for (int e = 0; e < p.entries; ++e) s.entries.push_back(add_node(NodeKind::socket, "socket" + std::to_string(e)));

        std::vector<std::vector<NodeId>> inter(m);
        for (std::size_t j = 0; j < m; ++j) {
            for (int i = 0; i < inter_per_stage[j]; ++i) {
                const NodeKind kind = rng.uniform() < 0.5 ? NodeKind::process : NodeKind::file;
                const std::string prefix = kind == NodeKind::process ? "proc" : "file";
                inter[j].push_back(add_node(kind, prefix + std::to_string(g.nodes.size())));
            }
            for (int d = 0; d < p.dests_per_stage[j]; ++d) {
                s.destinations[j].push_back(
                    add_node(d % 2 == 0 ? NodeKind::process : NodeKind::file,
                             "goal" + std::to_string(j + 1) + "_" + std::to_string(d)));
            }
        }

        std::set<Edge> edges;
        for (std::size_t j = 0; j < m; ++j) {
            const std::vector<NodeId>& sources = j == 0 ? s.entries : s.destinations[j - 1];
            // block members in order: intermediates then destinations
            std::vector<NodeId> members = inter[j];
            members.insert(members.end(), s.destinations[j].begin(), s.destinations[j].end());

            for (std::size_t k = 0; k < members.size(); ++k) {
                std::vector<NodeId> preds = sources;
                const std::size_t earlier = std::min(k, inter[j].size());
                preds.insert(preds.end(), inter[j].begin(), inter[j].begin() + static_cast<std::ptrdiff_t>(earlier));
                edges.insert({preds[pick(preds.size())], members[k]});
            }
            auto has_successor_in_block = [&](NodeId u) {
                return std::any_of(members.begin(), members.end(),
                                   [&](NodeId w) { return edges.contains({u, w}); });
            };
            for (NodeId src : sources) {
                if (!has_successor_in_block(src)) edges.insert({src, members[pick(members.size())]});
            }
            for (std::size_t k = 0; k < inter[j].size(); ++k) {
                const NodeId u = inter[j][k];
                if (has_successor_in_block(u)) continue;
                const std::size_t later = members.size() - (k + 1);
                edges.insert({u, members[k + 1 + pick(later)]});
            }
        }
        const auto n = static_cast<NodeId>(g.nodes.size());
        for (NodeId a = 0; a < n; ++a) {
            for (NodeId b = std::max<NodeId>(a + 1, static_cast<NodeId>(p.entries)); b < n; ++b) {
                if (rng.uniform() < p.edge_density) edges.insert({a, b});
            }
        }
        g.edges.assign(edges.begin(), edges.end());

        if (invariant_violations(g, s).empty()) return Ifg::create(std::move(g), std::move(s));
    }
    throw InfeasibleError("could not generate a valid graph in 1000 attempts");
}

} // namespace dift::ifg
