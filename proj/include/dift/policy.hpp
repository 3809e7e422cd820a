#pragma once

#include "dift/game.hpp"
#include "dift/rng.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dift {

/// Stationary policy: probs[s] is aligned to the player's action list at s.
struct Policy {
    Player player = Player::defender;
    std::vector<std::vector<double>> probs;

    const std::vector<double>& at(StateId s) const { return probs[static_cast<std::size_t>(s)]; }
    std::vector<double>& at(StateId s) { return probs[static_cast<std::size_t>(s)]; }
};

struct PolicyPair {
    Policy d;
    Policy a;

    const Policy& of(Player p) const { return p == Player::defender ? d : a; }
    Policy& of(Player p) { return p == Player::defender ? d : a; }
};

Policy uniform_policy(const Game& g, Player player);

/// Defender inspects destination out-neighbours with probability one, split
/// evenly when there are several; NoInspect elsewhere.
Policy cut_policy(const Game& g);

/// Deterministic policy picking action choice[s] at every state.
Policy deterministic_policy(const Game& g, Player player, std::span<const std::size_t> choice);

/// Euclidean projection onto {p : sum p = 1, p_i >= floor}. Requires floor * n <= 1.
std::vector<double> project_simplex(std::span<const double> v, double floor = 0.0);

/// Index drawn from probs with a single uniform variate u in [0, 1).
std::size_t sample_index(std::span<const double> probs, double u);
std::size_t sample(const Policy& p, StateId s, CounterRng& rng);

/// Throws IncompatibleError if shapes differ from the game's action sets, or
/// ValidationError if a row is not a distribution within tol.
void validate_policy(const Game& g, const Policy& p, double tol = 1e-9);

std::string dump_policy_json(const Game& g, const Policy& p);
/// Throws ParseError on malformed text, IncompatibleError on action-set mismatch.
Policy parse_policy_json(const Game& g, const std::string& text);
void save_policy(const Game& g, const Policy& p, const std::filesystem::path& path);
Policy load_policy(const Game& g, const std::filesystem::path& path);

} // namespace dift
