#include "fixtures.hpp"

#include "dift/errors.hpp"
#include "dift/ifg.hpp"

#include <doctest.h>

#include <set>

using namespace dift;
using namespace dift::ifg;
using fixtures::make_graph;

namespace {

bool has_edge(const Graph& g, NodeId u, NodeId v) {
    return std::find(g.edges.begin(), g.edges.end(), Edge{u, v}) != g.edges.end();
}

} // namespace

TEST_CASE("load drops self-loops and counts them") {
    const auto loaded = parse_graph_json(R"({"nodes":[{"id":0,"kind":"socket","label":"a"},
        {"id":1,"kind":"process","label":"b"},{"id":2,"kind":"file","label":"c"}],
        "edges":[[0,1],[1,1],[1,2],[0,2]],"entries":[0],"destinations":[[2]]})");
    CHECK(loaded.graph.node_count() == 3);
    CHECK(loaded.graph.edge_count() == 3);
    CHECK(loaded.report.self_loops_dropped == 1);
    CHECK(loaded.graph.nodes[2].kind == NodeKind::file);
}

TEST_CASE("load rejects bad input") {
    CHECK_THROWS_AS(parse_graph_json(R"({"nodes":[{"id":0}],"edges":[[0,5]]})"), ValidationError);
    CHECK_THROWS_AS(parse_graph_json(R"({"nodes":[],"edges":[]})"), ValidationError);
    CHECK_THROWS_AS(parse_graph_json(R"({"nodes":[{"id":0}, )"), ParseError);
    CHECK_THROWS_AS(parse_graph_json(R"({"nodes":[{"id":0},{"id":0}]})"), ValidationError);
    CHECK_THROWS_AS(parse_graph_json(R"({"nodes":[{"id":0,"kind":"pipe"}]})"), ValidationError);
}

TEST_CASE("graph JSON round-trips") {
    const Ifg g = generate_synthetic({});
    const auto back = parse_graph_json(dump_graph_json(g.graph(), g.surface()));
    CHECK(back.graph.edges == g.graph().edges);
    CHECK(back.surface.entries == g.surface().entries);
    CHECK(back.surface.destinations == g.surface().destinations);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        CHECK(back.graph.nodes[i].label == g.graph().nodes[i].label);
        CHECK(back.graph.nodes[i].kind == g.graph().nodes[i].kind);
    }
}

TEST_CASE("collapse_multi_edges") {
    SUBCASE("parallel edges collapse to one") {
        const Graph g = collapse_multi_edges(make_graph(2, {{0, 1}, {0, 1}, {0, 1}}));
        CHECK(g.edges == std::vector<Edge>{{0, 1}});
    }
    SUBCASE("opposite directions are distinct") {
        const Graph g = collapse_multi_edges(make_graph(2, {{0, 1}, {1, 0}}));
        CHECK(g.edge_count() == 2);
    }
    SUBCASE("simple graph is unchanged and collapse is idempotent") {
        const Graph g = make_graph(4, {{2, 3}, {0, 1}, {1, 2}});
        CHECK(collapse_multi_edges(g).edges == g.edges);
        CounterRng rng(11);
        for (int t = 0; t < 20; ++t) {
            const Graph m = fixtures::random_multigraph(6, 15, rng);
            const Graph once = collapse_multi_edges(m);
            CHECK(collapse_multi_edges(once).edges == once.edges);
            CHECK(once.node_count() == m.node_count());
        }
    }
}

TEST_CASE("prune_attack_subgraph") {
    SUBCASE("isolated node dropped") {
        // e=0 -> x=1 -> d1=2, isolated y=3
        const auto sub = prune_attack_subgraph(make_graph(4, {{0, 1}, {1, 2}}), {{0}, {{2}}});
        CHECK(sub.origin == std::vector<NodeId>{0, 1, 2});
    }
    SUBCASE("node between stage destinations kept") {
        // e=0 -> d1=1 -> z=2 -> d2=3
        const auto sub = prune_attack_subgraph(make_graph(4, {{0, 1}, {1, 2}, {2, 3}}), {{0}, {{1}, {3}}});
        CHECK(sub.origin == std::vector<NodeId>{0, 1, 2, 3});
    }
    SUBCASE("infeasible attack") {
        CHECK_THROWS_AS(prune_attack_subgraph(make_graph(3, {{1, 2}}), {{0}, {{2}}}), InfeasibleError);
    }
    SUBCASE("retained nodes satisfy the path predicate") {
        CounterRng rng(5);
        int checked = 0;
        for (int t = 0; t < 60; ++t) {
            const Graph g = collapse_multi_edges(fixtures::random_multigraph(10, 14, rng));
            const AttackSurface s{{0}, {{8}, {9}}};
            Subgraph sub;
            try {
                sub = prune_attack_subgraph(g, s);
            } catch (const InfeasibleError&) {
                continue;
            }
            ++checked;
            const auto r = fixtures::closure(g);
            auto reach = [&](NodeId a, NodeId b) { return a == b || r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
            std::set<NodeId> kept(sub.origin.begin(), sub.origin.end());
            for (NodeId u = 0; u < 10; ++u) {
                const bool qualifies = u == 0 || u == 8 || u == 9 || (reach(0, u) && reach(u, 8)) ||
                                       (reach(8, u) && reach(u, 9)) || (reach(9, u) && reach(u, 8));
                CHECK(kept.contains(u) == qualifies);
            }
        }
        CHECK(checked > 5);
    }
}

TEST_CASE("merge_directory_nodes") {
    Graph g = make_graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {1, 2}});
    g.nodes[1] = {1, NodeKind::file, "/home/a"};
    g.nodes[2] = {2, NodeKind::file, "/home/b"};
    const std::vector<DirectoryGroup> groups{{"/home", "/home"}};
    const auto merged = merge_directory_nodes(g, {{0}, {{3}}}, groups);
    REQUIRE(merged.graph.node_count() == 3);
    CHECK(merged.graph.nodes[1].label == "/home");
    // p->/home/a and p->/home/b become one edge; /home/a->/home/b becomes a dropped self-loop
    CHECK(merged.graph.edges == std::vector<Edge>{{0, 1}, {1, 2}});
    CHECK(merged.surface.destinations[0] == std::vector<NodeId>{2});

    SUBCASE("group matching nothing leaves the graph unchanged") {
        const std::vector<DirectoryGroup> none{{"/var", "/var"}};
        const auto same = merge_directory_nodes(g, {{0}, {{3}}}, none);
        CHECK(same.graph.edges == g.edges);
        CHECK(same.graph.node_count() == 4);
    }
    SUBCASE("only file nodes merge") {
        Graph h = g;
        h.nodes[1].kind = NodeKind::process;
        CHECK(merge_directory_nodes(h, {{0}, {{3}}}, groups).graph.node_count() == 4);
    }
}

TEST_CASE("is_acyclic") {
    CHECK(is_acyclic(make_graph(3, {{0, 1}, {1, 2}, {0, 2}})));
    CHECK_FALSE(is_acyclic(make_graph(2, {{0, 1}, {1, 0}})));
    CHECK(is_acyclic(make_graph(3, {})));
}

TEST_CASE("versioning on small cycles") {
    SUBCASE("acyclic input is unchanged") {
        const Graph g = make_graph(3, {{0, 1}, {1, 2}});
        const auto v = remove_cycles_by_versioning(g, {{0}, {{2}}});
        CHECK(v.graph.edges == g.edges);
        CHECK(v.added_versions() == 0);
    }
    SUBCASE("2-cycle becomes u0 -> v0 -> u1") {
        const auto v = remove_cycles_by_versioning(make_graph(2, {{0, 1}, {1, 0}}), {{0}, {{1}}});
        REQUIRE(v.graph.node_count() == 3);
        CHECK(v.origin == std::vector<NodeId>{0, 1, 0});
        CHECK(v.version == std::vector<int>{0, 0, 1});
        std::vector<Edge> edges = v.graph.edges;
        std::sort(edges.begin(), edges.end());
        CHECK(edges == std::vector<Edge>{{0, 1}, {1, 2}});
    }
    SUBCASE("3-cycle stays within twice the node count") {
        const auto v = remove_cycles_by_versioning(make_graph(3, {{0, 1}, {1, 2}, {2, 0}}), {{0}, {{2}}});
        CHECK(is_acyclic(v.graph));
        CHECK(v.graph.node_count() <= 6);
        const auto r = fixtures::closure(v.graph);
        for (NodeId a = 0; a < 3; ++a) {
            for (NodeId b = 0; b < 3; ++b) {
                if (a == b) continue;
                bool found = false;
                for (std::size_t i = 0; i < v.origin.size(); ++i) {
                    for (std::size_t j = 0; j < v.origin.size(); ++j) {
                        if (v.origin[i] == a && v.origin[j] == b && r[i][j]) found = true;
                    }
                }
                CHECK(found);
            }
        }
    }
}

TEST_CASE("versioning preserves dependencies on random cyclic graphs") {
    CounterRng rng(2024);
    for (int t = 0; t < 100; ++t) {
        const int n = 3 + static_cast<int>(rng.uniform() * 10);
        const Graph g = collapse_multi_edges(fixtures::random_multigraph(n, 2 * n, rng));
        const auto v = remove_cycles_by_versioning(g, {{0}, {{n - 1}}});
        REQUIRE(is_acyclic(v.graph));
        CHECK(static_cast<int>(v.graph.node_count()) <= 2 * n);
        CHECK(collapse_multi_edges(v.graph).edge_count() == v.graph.edge_count());

        // soundness: every version edge is an input edge between the origins
        for (const auto& [a, b] : v.graph.edges) CHECK(has_edge(g, v.origin[a], v.origin[b]));
        // every input edge is represented
        for (const auto& [a, b] : g.edges) {
            bool found = false;
            for (const auto& [x, y] : v.graph.edges) found = found || (v.origin[x] == a && v.origin[y] == b);
            CHECK(found);
        }
        const auto rin = fixtures::closure(g);
        const auto rout = fixtures::closure(v.graph);
        for (NodeId a = 0; a < n; ++a) {
            for (NodeId b = 0; b < n; ++b) {
                if (a == b || !rin[a][b]) continue;
                bool found = false;
                for (std::size_t i = 0; i < v.origin.size() && !found; ++i) {
                    for (std::size_t j = 0; j < v.origin.size() && !found; ++j) {
                        found = v.origin[i] == a && v.origin[j] == b && rout[i][j];
                    }
                }
                CHECK(found);
            }
        }
    }
}

TEST_CASE("reachability matches the closure oracle") {
    CounterRng rng(8);
    const Graph g = collapse_multi_edges(fixtures::random_multigraph(9, 16, rng));
    CHECK(reachability(g) == fixtures::closure(g));
}

TEST_CASE("Ifg::create validates invariants") {
    CHECK_NOTHROW(fixtures::diamond_ifg());
    CHECK_THROWS_AS(Ifg::create(make_graph(2, {{0, 1}, {1, 0}}), {{0}, {{1}}}), ValidationError);
    CHECK_THROWS_AS(Ifg::create(make_graph(2, {{0, 1}}), {{0}, {{0}}}), ValidationError);
    CHECK_THROWS_AS(Ifg::create(make_graph(2, {{0, 1}}), {{0}, {{1}, {}}}), ValidationError);
    CHECK_THROWS_AS(Ifg::create(make_graph(3, {{0, 1}}), {{0}, {{1}}}), ValidationError);
    CHECK_THROWS_AS(Ifg::create(make_graph(2, {{0, 1}, {0, 1}}), {{0}, {{1}}}), ValidationError);
}

TEST_CASE("prune pipeline produces a valid Ifg") {
    CounterRng rng(77);
    int built = 0;
    for (int t = 0; t < 50; ++t) {
        LoadedGraph raw{fixtures::random_multigraph(10, 25, rng), {{0}, {{7}, {9}}}, {}};
        PipelineReport report;
        try {
            const Ifg g = prune_pipeline(raw, {}, &report);
            CHECK(invariant_violations(g.graph(), g.surface()).empty());
            CHECK(report.input_nodes == 10);
            ++built;
        } catch (const InfeasibleError&) {
        }
    }
    CHECK(built > 10);
}

TEST_CASE("generate_synthetic") {
    SUBCASE("reference size") {
        const Ifg g = generate_synthetic({});
        CHECK(g.node_count() == 18);
        CHECK(g.stages() == 3);
        CHECK(g.edge_count() >= 20);
        CHECK(g.edge_count() <= 60);
    }
    SUBCASE("deterministic in the seed") {
        SyntheticParams p;
        p.seed = 123;
        const Ifg a = generate_synthetic(p);
        const Ifg b = generate_synthetic(p);
        CHECK(dump_graph_json(a.graph(), a.surface()) == dump_graph_json(b.graph(), b.surface()));
    }
    SUBCASE("invalid parameters") {
        SyntheticParams p;
        p.nodes = 1;
        CHECK_THROWS_AS(generate_synthetic(p), InfeasibleError);
        p = {};
        p.edge_density = 0.0;
        CHECK_THROWS_AS(generate_synthetic(p), InfeasibleError);
        p = {};
        p.dests_per_stage = {1, 1};
        CHECK_THROWS_AS(generate_synthetic(p), InfeasibleError);
    }
    SUBCASE("100 seeds satisfy every invariant with source entries") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            SyntheticParams p;
            p.nodes = 8 + static_cast<int>(seed % 12);
            p.seed = seed;
            const Ifg g = generate_synthetic(p);
            CHECK(invariant_violations(g.graph(), g.surface()).empty());
            for (const auto& [u, v] : g.graph().edges) CHECK_FALSE(g.is_entry(v));
        }
    }
}
