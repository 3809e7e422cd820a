#include "dift/policy.hpp"

#include "dift/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dift {

using nlohmann::json;

Policy uniform_policy(const Game& g, Player player) {
    Policy p{player, {}};
    p.probs.resize(g.state_count());
    for (std::size_t s = 0; s < g.state_count(); ++s) {
        const std::size_t n = g.action_count(player, static_cast<StateId>(s));
        p.probs[s].assign(n, 1.0 / static_cast<double>(n));
    }
    return p;
}

Policy cut_policy(const Game& g) {
    Policy p{Player::defender, {}};
    p.probs.resize(g.state_count());
    for (std::size_t si = 0; si < g.state_count(); ++si) {
        const auto s = static_cast<StateId>(si);
        const auto acts = g.def_actions(s);
        std::vector<double> row(acts.size(), 0.0);
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < acts.size(); ++i) {
            if (acts[i].inspects() && g.is_destination_state(acts[i].target)) hits.push_back(i);
        }
        if (hits.empty()) {
            row[0] = 1.0;
        } else {
            for (std::size_t i : hits) row[i] = 1.0 / static_cast<double>(hits.size());
        }
        p.probs[si] = std::move(row);
    }
    return p;
}

Policy deterministic_policy(const Game& g, Player player, std::span<const std::size_t> choice) {
    if (choice.size() != g.state_count()) throw IncompatibleError("one action choice per state required");
    Policy p{player, {}};
    p.probs.resize(g.state_count());
    for (std::size_t s = 0; s < g.state_count(); ++s) {
        const std::size_t n = g.action_count(player, static_cast<StateId>(s));
        if (choice[s] >= n) throw IncompatibleError("action choice out of range");
        p.probs[s].assign(n, 0.0);
        p.probs[s][choice[s]] = 1.0;
    }
    return p;
}

std::vector<double> project_simplex(std::span<const double> v, double floor) {
    const std::size_t n = v.size();
    if (n == 0) throw ValidationError("cannot project an empty vector");
    const double mass = 1.0 - floor * static_cast<double>(n);
    if (floor < 0 || mass < -1e-12) throw ValidationError("simplex floor too large for the dimension");

    // project v - floor onto the scaled simplex {q >= 0, sum q = mass}
    std::vector<double> sorted(v.begin(), v.end());
    for (double& x : sorted) x -= floor;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cumsum += sorted[k];
        const double t = (cumsum - std::max(mass, 0.0)) / static_cast<double>(k + 1);
        if (k + 1 == n || sorted[k + 1] <= t) {
            theta = t;
            break;
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = floor + std::max(v[i] - floor - theta, 0.0);
    return out;
}

std::size_t sample_index(std::span<const double> probs, double u) {
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        acc += probs[i];
        last_positive = i;
        if (u < acc) return i;
    }
    return last_positive;
}

std::size_t sample(const Policy& p, StateId s, CounterRng& rng) { return sample_index(p.at(s), rng.uniform()); }

void validate_policy(const Game& g, const Policy& p, double tol) {
    if (p.probs.size() != g.state_count()) {
        throw IncompatibleError("policy covers " + std::to_string(p.probs.size()) + " states, game has " +
                                std::to_string(g.state_count()));
    }
    for (std::size_t si = 0; si < p.probs.size(); ++si) {
        const auto s = static_cast<StateId>(si);
        const auto& row = p.probs[si];
        if (row.size() != g.action_count(p.player, s)) {
            throw IncompatibleError("policy row at " + g.label(s) + " has wrong action count");
        }
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        const bool nonneg = std::all_of(row.begin(), row.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
        if (!nonneg || std::abs(sum - 1.0) > tol) {
            throw ValidationError("policy row at " + g.label(s) + " is not a probability distribution");
        }
    }
}

std::string dump_policy_json(const Game& g, const Policy& p) {
    json doc{{"player", std::string(to_string(p.player))}, {"states", json::array()}};
    for (std::size_t si = 0; si < p.probs.size(); ++si) {
        const auto s = static_cast<StateId>(si);
        json actions = json::array();
        for (std::size_t i = 0; i < g.action_count(p.player, s); ++i) actions.push_back(g.action_label(p.player, s, i));
        doc["states"].push_back({{"state", si}, {"label", g.label(s)}, {"actions", actions}, {"probs", p.probs[si]}});
    }
    return doc.dump(1) + "\n";
}

Policy parse_policy_json(const Game& g, const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("policy JSON: ") + e.what());
    }
    Policy p;
    try {
        p.player = parse_player(doc.at("player").get<std::string>());
        const auto& states = doc.at("states");
        if (states.size() != g.state_count()) {
            throw IncompatibleError("policy file lists " + std::to_string(states.size()) + " states, game has " +
                                    std::to_string(g.state_count()));
        }
        p.probs.resize(g.state_count());
        for (const auto& entry : states) {
            const auto s = entry.at("state").get<StateId>();
            if (s < 0 || static_cast<std::size_t>(s) >= g.state_count()) throw IncompatibleError("policy state out of range");
            const auto labels = entry.at("actions").get<std::vector<std::string>>();
            const std::size_t n = g.action_count(p.player, s);
            if (labels.size() != n) throw IncompatibleError("action set mismatch at " + g.label(s));
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] != g.action_label(p.player, s, i)) {
                    throw IncompatibleError("action '" + labels[i] + "' at " + g.label(s) + " does not match the game");
                }
            }
            p.probs[static_cast<std::size_t>(s)] = entry.at("probs").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("policy JSON: ") + e.what());
    }
    validate_policy(g, p, 1e-6);
    return p;
}

void save_policy(const Game& g, const Policy& p, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << dump_policy_json(g, p);
}

Policy load_policy(const Game& g, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open policy file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_policy_json(g, buf.str());
}

} // namespace dift
