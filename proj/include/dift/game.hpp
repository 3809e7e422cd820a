#pragma once

#include "dift/ifg.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dift {

using StateId = std::int32_t;
inline constexpr StateId kRoot = 0;

/// node == -1 denotes the root state s0.
struct StateKey {
    ifg::NodeId node = -1;
    int stage = 1;
};

enum class Player { defender, attacker };

/// "D" or "A".
std::string_view to_string(Player p);
Player parse_player(std::string_view text);
inline Player opponent(Player p) { return p == Player::defender ? Player::attacker : Player::defender; }

/// target < 0 means NoInspect.
struct DefAction {
    StateId target = -1;
    bool inspects() const { return target >= 0; }
    friend bool operator==(const DefAction&, const DefAction&) = default;
};

/// target < 0 means Quit.
struct AtkAction {
    StateId target = -1;
    bool quits() const { return target < 0; }
    friend bool operator==(const AtkAction&, const AtkAction&) = default;
};

struct RewardParams {
    int stages = 0;
    std::vector<double> alpha_D, beta_D, sigma_D;
    std::vector<double> alpha_A, beta_A, sigma_A;
    /// Security cost per stage for states that carry one.
    std::vector<double> cost_D_per_stage;
    std::map<StateId, double> cost_D_per_state;
    /// false: beta_D also applies when the defender inspected elsewhere.
    bool strict_table = true;

    /// Reference three-stage values from the ransomware case study.
    static RewardParams reference(int stages = 3);
    /// Throws ValidationError on length or sign violations.
    void validate() const;
};

struct FnRates {
    double default_rate = 0.2;
    std::map<StateId, double> per_state;

    double at(StateId s) const;
    void validate() const;
};

RewardParams parse_reward_params(const std::string& json_text);
FnRates parse_fn_rates(const std::string& json_text);
std::string dump_reward_params(const RewardParams& p);

enum class StateCase { root, interior, intermediate_destination, final_destination };

struct Outcome {
    StateId next = kRoot;
    double prob = 0.0;
    double reward_D = 0.0;
    double reward_A = 0.0;
};

class Game {
public:
    /// Throws ValidationError if params or FN rates violate their invariants.
    static Game build(const ifg::Ifg& graph, RewardParams params, FnRates fn);

    const ifg::Ifg& graph() const { return graph_; }
    const RewardParams& params() const { return params_; }
    int stages() const { return graph_.stages(); }
    std::size_t state_count() const { return keys_.size(); }

    StateId state_of(ifg::NodeId node, int stage) const;
    StateKey key(StateId s) const { return keys_[idx(s)]; }
    StateCase state_case(StateId s) const { return cases_[idx(s)]; }
    std::string label(StateId s) const;

    std::span<const DefAction> def_actions(StateId s) const { return def_[idx(s)]; }
    std::span<const AtkAction> atk_actions(StateId s) const { return atk_[idx(s)]; }
    std::size_t action_count(Player p, StateId s) const;
    std::size_t max_action_count() const;
    std::string action_label(Player p, StateId s, std::size_t i) const;

    /// Kernel support for a pair of action objects. Throws InvalidActionError.
    std::vector<std::pair<StateId, double>> transition_dist(StateId s, DefAction d, AtkAction a) const;
    /// (r_D, r_A) for a transition; s' must be in the kernel support.
    std::pair<double, double> reward(StateId s, DefAction d, AtkAction a, StateId next) const;

    /// Precomputed support with rewards for action indices (di, ai).
    std::span<const Outcome> outcomes(StateId s, std::size_t di, std::size_t ai) const;

    double cost_D(StateId s) const { return cost_[idx(s)]; }
    double fn_rate(StateId s) const { return fn_.at(s); }
    bool is_destination_state(StateId s) const;

    /// States reachable from s0 under some action pair.
    const std::vector<bool>& reachable() const { return reachable_; }
    const std::vector<StateId>& reachable_states() const { return reachable_list_; }

    double min_reward(Player p) const;
    double max_reward(Player p) const;

private:
    Game(const ifg::Ifg& graph) : graph_(graph) {}
    static std::size_t idx(StateId s) { return static_cast<std::size_t>(s); }
    std::size_t def_index(StateId s, DefAction d) const;
    std::size_t atk_index(StateId s, AtkAction a) const;
    std::vector<Outcome> compute_outcomes(StateId s, DefAction d, AtkAction a) const;

    ifg::Ifg graph_;
    RewardParams params_;
    FnRates fn_;
    std::vector<StateKey> keys_;
    std::vector<StateCase> cases_;
    std::vector<double> cost_;
    std::vector<std::vector<DefAction>> def_;
    std::vector<std::vector<AtkAction>> atk_;
    // outcomes_[s][di * |A_A(s)| + ai]
    std::vector<std::vector<std::vector<Outcome>>> outcomes_;
    std::vector<bool> reachable_;
    std::vector<StateId> reachable_list_;
};

struct PolicyPair;

/// P(s'|s) under the joint stationary policy.
Eigen::MatrixXd induced_chain(const Game& g, const PolicyPair& pi);

struct ChainClasses {
    std::vector<std::vector<StateId>> recurrent;
    std::vector<StateId> transient;
};

/// Communicating-class decomposition using the support P > threshold.
ChainClasses classify_chain(const Eigen::MatrixXd& P, double threshold = 0.0);

} // namespace dift
