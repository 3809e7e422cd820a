#pragma once

#include "dift/game.hpp"
#include "dift/ifg.hpp"
#include "dift/policy.hpp"
#include "dift/rng.hpp"

#include <algorithm>
#include <vector>

namespace fixtures {

using dift::ifg::Edge;
using dift::ifg::Graph;
using dift::ifg::NodeId;
using dift::ifg::NodeKind;

inline Graph make_graph(int n, std::vector<Edge> edges) {
    Graph g;
    for (int i = 0; i < n; ++i) g.nodes.push_back({i, NodeKind::process, "n" + std::to_string(i)});
    g.edges = std::move(edges);
    return g;
}

/// Entries {0, 1}; 2 fans out to 3 and 4, which both feed the single destination 5.
inline dift::ifg::Ifg diamond_ifg() {
    Graph g = make_graph(6, {{0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 5}, {4, 5}});
    return dift::ifg::Ifg::create(g, {{0, 1}, {{5}}});
}

/// Entry 0 with a single edge to destination 1 (one stage).
inline dift::ifg::Ifg edge_ifg() {
    Graph g = make_graph(2, {{0, 1}});
    return dift::ifg::Ifg::create(g, {{0}, {{1}}});
}

inline dift::Game diamond_game(double fn = 0.2) {
    dift::FnRates rates;
    rates.default_rate = fn;
    return dift::Game::build(diamond_ifg(), dift::RewardParams::reference(1), rates);
}

/// Interior random policy with every entry at least lo (before normalisation).
inline dift::Policy random_policy(const dift::Game& g, dift::Player p, dift::CounterRng& rng, double lo = 0.05) {
    dift::Policy pol{p, {}};
    pol.probs.resize(g.state_count());
    for (std::size_t s = 0; s < g.state_count(); ++s) {
        const std::size_t n = g.action_count(p, static_cast<dift::StateId>(s));
        std::vector<double> row(n);
        double sum = 0.0;
        for (double& x : row) {
            x = lo + rng.uniform();
            sum += x;
        }
        for (double& x : row) x /= sum;
        pol.probs[s] = std::move(row);
    }
    return pol;
}

/// Uniformly random action per state.
inline std::vector<std::size_t> random_choice(const dift::Game& g, dift::Player p, dift::CounterRng& rng) {
    std::vector<std::size_t> c(g.state_count());
    for (std::size_t s = 0; s < c.size(); ++s) {
        const std::size_t n = g.action_count(p, static_cast<dift::StateId>(s));
        c[s] = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
    }
    return c;
}

/// Random multigraph with parallel edges and cycles but no self-loops.
inline Graph random_multigraph(int n, int m, dift::CounterRng& rng) {
    std::vector<Edge> edges;
    while (static_cast<int>(edges.size()) < m) {
        const auto u = static_cast<NodeId>(rng.uniform() * n);
        const auto v = static_cast<NodeId>(rng.uniform() * n);
        if (u != v) edges.emplace_back(u, v);
    }
    return make_graph(n, std::move(edges));
}

/// Transitive closure by Floyd-Warshall; reach[u][v] for paths of length >= 1.
inline std::vector<std::vector<bool>> closure(const Graph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (const auto& [u, v] : g.edges) r[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!r[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (r[k][j]) r[i][j] = true;
            }
        }
    }
    return r;
}

} // namespace fixtures
