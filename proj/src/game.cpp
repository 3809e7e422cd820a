#include "dift/game.hpp"

#include "dift/errors.hpp"
#include "dift/policy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace dift {

std::string_view to_string(Player p) { return p == Player::defender ? "D" : "A"; }

Player parse_player(std::string_view text) {
    if (text == "D") return Player::defender;
    if (text == "A") return Player::attacker;
    throw ParseError("player must be \"D\" or \"A\", got \"" + std::string(text) + "\"");
}

RewardParams RewardParams::reference(int stages) {
    RewardParams p;
    p.stages = stages;
    for (int j = 1; j <= stages; ++j) {
        const double s = j;
        p.alpha_D.push_back(40.0 * s);
        p.beta_D.push_back(-30.0 * s);
        p.sigma_D.push_back(10.0 + 20.0 * s);
        p.alpha_A.push_back(-20.0 * s);
        p.beta_A.push_back(20.0 * s);
        p.sigma_A.push_back(-(10.0 + 20.0 * s));
        p.cost_D_per_stage.push_back(-s);
    }
    return p;
}

void RewardParams::validate() const {
    if (stages < 1) throw ValidationError("reward params need at least one stage");
    auto check = [this](const std::vector<double>& v, const char* name, int sign) {
        if (static_cast<int>(v.size()) != stages) {
            throw ValidationError(std::string(name) + " must have one entry per stage");
        }
        for (double x : v) {
            if (!std::isfinite(x) || (sign > 0 && !(x > 0)) || (sign < 0 && !(x < 0)) || (sign == 0 && x > 0)) {
                throw ValidationError(std::string(name) + " violates its sign constraint");
            }
        }
    };
    check(alpha_D, "alpha_D", +1);
    check(beta_D, "beta_D", -1);
    check(sigma_D, "sigma_D", +1);
    check(alpha_A, "alpha_A", -1);
    check(beta_A, "beta_A", +1);
    check(sigma_A, "sigma_A", -1);
    check(cost_D_per_stage, "cost_D", 0);
    for (const auto& [s, c] : cost_D_per_state) {
        if (!std::isfinite(c) || c > 0) throw ValidationError("per-state cost_D must be <= 0");
    }
}

double FnRates::at(StateId s) const {
    auto it = per_state.find(s);
    return it == per_state.end() ? default_rate : it->second;
}

void FnRates::validate() const {
    auto ok = [](double x) { return x >= 0.0 && x < 1.0; };
    if (!ok(default_rate)) throw ValidationError("FN default rate must lie in [0, 1)");
    for (const auto& [s, x] : per_state) {
        if (!ok(x)) throw ValidationError("FN rate of state " + std::to_string(s) + " must lie in [0, 1)");
    }
}

Game Game::build(const ifg::Ifg& graph, RewardParams params, FnRates fn) {
    params.validate();
    fn.validate();
    if (params.stages != graph.stages()) {
        throw ValidationError("reward params have " + std::to_string(params.stages) + " stages, graph has " +
                              std::to_string(graph.stages()));
    }

    Game g(graph);
    g.params_ = std::move(params);
    g.fn_ = std::move(fn);

    const auto n = static_cast<ifg::NodeId>(graph.node_count());
    const int m = graph.stages();
    const std::size_t count = static_cast<std::size_t>(n) * static_cast<std::size_t>(m) + 1;
    for (const auto& [s, x] : g.fn_.per_state) {
        if (s < 0 || static_cast<std::size_t>(s) >= count) throw ValidationError("FN rate for unknown state");
    }
    for (const auto& [s, x] : g.params_.cost_D_per_state) {
        if (s < 0 || static_cast<std::size_t>(s) >= count) throw ValidationError("cost_D for unknown state");
    }

    g.keys_.resize(count);
    g.cases_.resize(count);
    g.cost_.assign(count, 0.0);
    g.def_.resize(count);
    g.atk_.resize(count);

    g.keys_[0] = {-1, 1};
    g.cases_[0] = StateCase::root;
    g.def_[0] = {DefAction{}};
    for (ifg::NodeId e : graph.surface().entries) g.atk_[0].push_back({g.state_of(e, 1)});
    std::sort(g.atk_[0].begin(), g.atk_[0].end(), [](AtkAction a, AtkAction b) { return a.target < b.target; });

    for (int j = 1; j <= m; ++j) {
        for (ifg::NodeId u = 0; u < n; ++u) {
            const StateId s = g.state_of(u, j);
            const auto si = idx(s);
            g.keys_[si] = {u, j};
            if (graph.is_destination(u, j)) {
                g.cases_[si] = j < m ? StateCase::intermediate_destination : StateCase::final_destination;
                g.def_[si] = {DefAction{}};
                g.atk_[si] = {AtkAction{j < m ? g.state_of(u, j + 1) : kRoot}};
                continue;
            }
            g.cases_[si] = StateCase::interior;
            g.def_[si].push_back(DefAction{});
            for (ifg::NodeId w : graph.out_neighbors(u)) {
                g.def_[si].push_back({g.state_of(w, j)});
                g.atk_[si].push_back({g.state_of(w, j)});
            }
            g.atk_[si].push_back(AtkAction{});

            if (!graph.is_entry(u)) {
                auto it = g.params_.cost_D_per_state.find(s);
                g.cost_[si] = it != g.params_.cost_D_per_state.end()
                                  ? it->second
                                  : g.params_.cost_D_per_stage[static_cast<std::size_t>(j - 1)];
            }
        }
    }

    g.outcomes_.resize(count);
    for (std::size_t si = 0; si < count; ++si) {
        const auto s = static_cast<StateId>(si);
        for (const DefAction& d : g.def_[si]) {
            for (const AtkAction& a : g.atk_[si]) g.outcomes_[si].push_back(g.compute_outcomes(s, d, a));
        }
    }

    g.reachable_.assign(count, false);
    std::deque<StateId> queue{kRoot};
    g.reachable_[0] = true;
    while (!queue.empty()) {
        const StateId s = queue.front();
        queue.pop_front();
        for (const auto& outs : g.outcomes_[idx(s)]) {
            for (const Outcome& o : outs) {
                if (o.prob > 0 && !g.reachable_[idx(o.next)]) {
                    g.reachable_[idx(o.next)] = true;
                    queue.push_back(o.next);
                }
            }
        }
    }
    for (std::size_t si = 0; si < count; ++si) {
        if (g.reachable_[si]) g.reachable_list_.push_back(static_cast<StateId>(si));
    }
    return g;
}

StateId Game::state_of(ifg::NodeId node, int stage) const {
    const auto n = static_cast<StateId>(graph_.node_count());
    if (node < 0 || node >= n || stage < 1 || stage > stages()) {
        throw ValidationError("no state for node " + std::to_string(node) + " at stage " + std::to_string(stage));
    }
    return 1 + (stage - 1) * n + node;
}

std::string Game::label(StateId s) const {
    if (s == kRoot) return "s0";
    const StateKey k = key(s);
    return "u" + std::to_string(k.node) + "^" + std::to_string(k.stage);
}

std::size_t Game::action_count(Player p, StateId s) const {
    return p == Player::defender ? def_[idx(s)].size() : atk_[idx(s)].size();
}

std::size_t Game::max_action_count() const {
    std::size_t m = 0;
    for (std::size_t s = 0; s < keys_.size(); ++s) m = std::max({m, def_[s].size(), atk_[s].size()});
    return m;
}

std::string Game::action_label(Player p, StateId s, std::size_t i) const {
    if (p == Player::defender) {
        const DefAction d = def_[idx(s)].at(i);
        return d.inspects() ? "inspect " + label(d.target) : "noinspect";
    }
    const AtkAction a = atk_[idx(s)].at(i);
    return a.quits() ? "quit" : "move " + label(a.target);
}

bool Game::is_destination_state(StateId s) const {
    const StateCase c = cases_[idx(s)];
    return c == StateCase::intermediate_destination || c == StateCase::final_destination;
}

std::size_t Game::def_index(StateId s, DefAction d) const {
    const auto& acts = def_[idx(s)];
    auto it = std::find(acts.begin(), acts.end(), d);
    if (it == acts.end()) throw InvalidActionError("defender action not available at " + label(s));
    return static_cast<std::size_t>(it - acts.begin());
}

std::size_t Game::atk_index(StateId s, AtkAction a) const {
    const auto& acts = atk_[idx(s)];
    auto it = std::find(acts.begin(), acts.end(), a);
    if (it == acts.end()) throw InvalidActionError("attacker action not available at " + label(s));
    return static_cast<std::size_t>(it - acts.begin());
}

std::vector<std::pair<StateId, double>> Game::transition_dist(StateId s, DefAction d, AtkAction a) const {
    if (s < 0 || idx(s) >= keys_.size()) throw InvalidActionError("unknown state " + std::to_string(s));
    const auto di = def_index(s, d);
    const auto ai = atk_index(s, a);
    std::vector<std::pair<StateId, double>> out;
    for (const Outcome& o : outcomes(s, di, ai)) out.emplace_back(o.next, o.prob);
    return out;
}

std::pair<double, double> Game::reward(StateId s, DefAction d, AtkAction a, StateId next) const {
    const std::size_t j = static_cast<std::size_t>(key(s).stage - 1);
    const bool hit = d.inspects() && !a.quits() && d.target == a.target;
    const StateKey nk = next == kRoot ? StateKey{} : key(next);
    const bool reaches_goal = next != kRoot && nk.stage == key(s).stage &&
                              graph_.is_destination(nk.node, nk.stage);
    const double c = cost_D(s);
    const RewardParams& p = params_;

    double r_D = 0.0;
    if (hit && next == kRoot) {
        r_D = p.alpha_D[j] + c;
    } else if (!d.inspects() && reaches_goal) {
        r_D = p.beta_D[j];
    } else if (!p.strict_table && reaches_goal) {
        r_D = p.beta_D[j] + (d.inspects() && !hit ? c : 0.0);
    } else if (d.inspects() && a.quits()) {
        r_D = p.sigma_D[j] + c;
    } else if (!d.inspects() && a.quits()) {
        r_D = p.sigma_D[j];
    } else if (d.inspects() && !hit) {
        r_D = c;
    }

    double r_A = 0.0;
    if (hit && next == kRoot) {
        r_A = p.alpha_A[j];
    } else if (reaches_goal) {
        r_A = p.beta_A[j];
    } else if (a.quits()) {
        r_A = p.sigma_A[j];
    }
    return {r_D, r_A};
}

std::vector<Outcome> Game::compute_outcomes(StateId s, DefAction d, AtkAction a) const {
    std::vector<std::pair<StateId, double>> dist;
    if (a.quits()) {
        dist = {{kRoot, 1.0}};
    } else if (d.inspects() && d.target == a.target) {
        const double fn = fn_.at(a.target);
        if (fn > 0) dist.emplace_back(a.target, fn);
        dist.emplace_back(kRoot, 1.0 - fn);
    } else {
        dist = {{a.target, 1.0}};
    }
    std::vector<Outcome> out;
    for (const auto& [next, prob] : dist) {
        const auto [r_D, r_A] = reward(s, d, a, next);
        out.push_back({next, prob, r_D, r_A});
    }
    return out;
}

std::span<const Outcome> Game::outcomes(StateId s, std::size_t di, std::size_t ai) const {
    const std::size_t n_a = atk_[idx(s)].size();
    if (di >= def_[idx(s)].size() || ai >= n_a) throw InvalidActionError("action index out of range at " + label(s));
    return outcomes_[idx(s)][di * n_a + ai];
}

double Game::min_reward(Player p) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& per_state : outcomes_) {
        for (const auto& outs : per_state) {
            for (const Outcome& o : outs) m = std::min(m, p == Player::defender ? o.reward_D : o.reward_A);
        }
    }
    return m;
}

double Game::max_reward(Player p) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& per_state : outcomes_) {
        for (const auto& outs : per_state) {
            for (const Outcome& o : outs) m = std::max(m, p == Player::defender ? o.reward_D : o.reward_A);
        }
    }
    return m;
}

Eigen::MatrixXd induced_chain(const Game& g, const PolicyPair& pi) {
    const auto n = static_cast<Eigen::Index>(g.state_count());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index si = 0; si < n; ++si) {
        const auto s = static_cast<StateId>(si);
        const auto& pd = pi.d.at(s);
        const auto& pa = pi.a.at(s);
        for (std::size_t di = 0; di < pd.size(); ++di) {
            for (std::size_t ai = 0; ai < pa.size(); ++ai) {
                const double w = pd[di] * pa[ai];
                if (w == 0.0) continue;
                for (const Outcome& o : g.outcomes(s, di, ai)) P(si, o.next) += w * o.prob;
            }
        }
    }
    return P;
}

ChainClasses classify_chain(const Eigen::MatrixXd& P, double threshold) {
    const auto n = static_cast<std::size_t>(P.rows());
    std::vector<std::vector<ifg::NodeId>> adj(n);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (P(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > threshold) {
                adj[u].push_back(static_cast<ifg::NodeId>(v));
            }
        }
    }

    // mutual reachability from one BFS per state; chains here have a few hundred states at most
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t u = 0; u < n; ++u) {
        std::deque<std::size_t> queue{u};
        reach[u][u] = true;
        while (!queue.empty()) {
            const std::size_t x = queue.front();
            queue.pop_front();
            for (ifg::NodeId w : adj[x]) {
                if (!reach[u][static_cast<std::size_t>(w)]) {
                    reach[u][static_cast<std::size_t>(w)] = true;
                    queue.push_back(static_cast<std::size_t>(w));
                }
            }
        }
    }

    ChainClasses out;
    std::vector<bool> assigned(n, false);
    for (std::size_t u = 0; u < n; ++u) {
        if (assigned[u]) continue;
        std::vector<StateId> cls;
        for (std::size_t v = u; v < n; ++v) {
            if (reach[u][v] && reach[v][u]) {
                cls.push_back(static_cast<StateId>(v));
                assigned[v] = true;
            }
        }
        // closed iff nothing outside the class is reachable
        bool closed = true;
        for (std::size_t v = 0; v < n && closed; ++v) {
            if (reach[u][v] && !reach[v][u]) closed = false;
        }
        if (closed) {
            out.recurrent.push_back(std::move(cls));
        } else {
            out.transient.insert(out.transient.end(), cls.begin(), cls.end());
        }
    }
    std::sort(out.transient.begin(), out.transient.end());
    return out;
}

} // namespace dift
