#pragma once

#include "dift/game.hpp"

#include <cstdint>
#include <memory>

namespace dift {

struct Transition {
    StateId next = kRoot;
    double reward_D = 0.0;
    double reward_A = 0.0;
};

/// Sampling view of a game for learners. Only action counts and sampled
/// transitions are visible; kernels, FN rates and reward tables are not.
class Environment {
public:
    Environment(std::shared_ptr<const Game> game, std::uint64_t seed, std::uint64_t stream = 0);

    StateId reset();
    StateId current() const { return current_; }
    std::uint64_t step_count() const { return steps_; }

    std::size_t state_count() const;
    std::size_t action_count(Player p, StateId s) const;

    /// Plays action indices (d, a) at the current state. Throws InvalidActionError.
    Transition step(std::size_t d, std::size_t a);

private:
    std::shared_ptr<const Game> game_;
    std::uint64_t seed_;
    std::uint64_t stream_;
    StateId current_ = kRoot;
    std::uint64_t steps_ = 0;
};

} // namespace dift
