#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dift::ifg {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

enum class NodeKind { process, file, socket, other };

std::string_view to_string(NodeKind kind);
NodeKind parse_node_kind(std::string_view text);

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::other;
    std::string label;
};

/// Directed multigraph as ingested from a log conversion. Parallel edges and
/// cycles are allowed; ids are dense 0..N-1.
struct Graph {
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }
};

/// Entry points and per-stage destination sets (stage j is destinations[j-1]).
struct AttackSurface {
    std::vector<NodeId> entries;
    std::vector<std::vector<NodeId>> destinations;

    int stages() const { return static_cast<int>(destinations.size()); }
};

struct LoadReport {
    int self_loops_dropped = 0;
};

struct LoadedGraph {
    Graph graph;
    AttackSurface surface;
    LoadReport report;
};

/// Result of a transform that re-indexes nodes. origin[i] is the input id that
/// new node i came from.
struct Subgraph {
    Graph graph;
    AttackSurface surface;
    std::vector<NodeId> origin;
};

/// Result of node versioning. version[i] is 0 for the first copy of a node.
struct VersionedGraph {
    Graph graph;
    AttackSurface surface;
    std::vector<NodeId> origin;
    std::vector<int> version;

    int added_versions() const;
};

struct DirectoryGroup {
    std::string prefix;
    std::string merged_label;
};

// --- ingestion -------------------------------------------------------------

LoadedGraph parse_graph_json(std::string_view text);
LoadedGraph load_graph(const std::filesystem::path& path);
std::string dump_graph_json(const Graph& graph, const AttackSurface& surface);

// --- pruning pipeline ------------------------------------------------------

Graph collapse_multi_edges(const Graph& graph);

/// Keeps entries, destinations, nodes on an entry->D_1 walk and nodes on a
/// D_j->D_j' walk (j != j'), with the induced edge set. Throws InfeasibleError
/// when no entry reaches D_1.
Subgraph prune_attack_subgraph(const Graph& graph, const AttackSurface& surface);

/// Collapses file nodes whose label starts with a group prefix into one node
/// per group. Self-loops created by the merge are dropped, parallel edges
/// re-collapsed.
Subgraph merge_directory_nodes(const Graph& graph, const AttackSurface& surface,
                               std::span<const DirectoryGroup> groups);

/// Cycle removal that keeps every input reachability relation between
/// versions. Expects a simple digraph.
///
/// Each non-trivial strongly connected component is rebuilt around a pivot
/// (the component's last node in DFS preorder): every other member gets an
/// inbound version that drains into the pivot along a reverse BFS tree, and an
/// outbound version fed from the pivot along a forward BFS tree. External
/// in-edges land on inbound versions, external out-edges leave from outbound
/// versions. A k-node component becomes 2k-1 nodes.
VersionedGraph remove_cycles_by_versioning(const Graph& graph, const AttackSurface& surface);

bool is_acyclic(const Graph& graph);

/// forward[u] = set of nodes reachable from u by a path of length >= 1.
std::vector<std::vector<bool>> reachability(const Graph& graph);

// --- validated graph -------------------------------------------------------

/// Lists every violated Ifg invariant (empty when valid).
std::vector<std::string> invariant_violations(const Graph& graph, const AttackSurface& surface);

/// Acyclic, simple, pruned information-flow graph with M >= 1 stages.
class Ifg {
public:
    /// Throws ValidationError listing the violated invariants.
    static Ifg create(Graph graph, AttackSurface surface);

    const Graph& graph() const { return graph_; }
    const AttackSurface& surface() const { return surface_; }
    std::size_t node_count() const { return graph_.nodes.size(); }
    std::size_t edge_count() const { return graph_.edges.size(); }
    int stages() const { return surface_.stages(); }

    std::span<const NodeId> out_neighbors(NodeId u) const { return out_[static_cast<std::size_t>(u)]; }
    bool is_entry(NodeId u) const { return entry_[static_cast<std::size_t>(u)]; }
    /// stage is 1-based.
    bool is_destination(NodeId u, int stage) const;

private:
    Ifg() = default;

    Graph graph_;
    AttackSurface surface_;
    std::vector<std::vector<NodeId>> out_;
    std::vector<bool> entry_;
    std::vector<std::vector<bool>> dest_;
};

struct PipelineReport {
    std::size_t input_nodes = 0;
    std::size_t input_edges = 0;
    std::size_t output_nodes = 0;
    std::size_t output_edges = 0;
    int self_loops_dropped = 0;
    int added_versions = 0;
};

/// collapse -> prune -> merge (when groups given) -> versioning -> re-prune.
Ifg prune_pipeline(const LoadedGraph& input, std::span<const DirectoryGroup> groups,
                   PipelineReport* report = nullptr);

// --- synthetic graphs ------------------------------------------------------

struct SyntheticParams {
    int nodes = 18;
    int stages = 3;
    int entries = 2;
    std::vector<int> dests_per_stage{1, 1, 1};
    double edge_density = 0.12;
    std::uint64_t seed = 7;
};

/// Layered random DAG: entries first, then for each stage a block of
/// intermediate nodes followed by that stage's destinations. A backbone gives
/// every node a predecessor and a successor inside its stage block; extra
/// forward edges are drawn with probability edge_density. Deterministic in seed.
Ifg generate_synthetic(const SyntheticParams& params);

} // namespace dift::ifg
