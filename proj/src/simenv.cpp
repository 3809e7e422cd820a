#include "dift/simenv.hpp"

#include "dift/errors.hpp"
#include "dift/rng.hpp"

namespace dift {

Environment::Environment(std::shared_ptr<const Game> game, std::uint64_t seed, std::uint64_t stream)
    : game_(std::move(game)), seed_(seed), stream_(stream) {
    if (!game_) throw ValidationError("environment needs a game");
}

StateId Environment::reset() {
    current_ = kRoot;
    steps_ = 0;
    return current_;
}

std::size_t Environment::state_count() const { return game_->state_count(); }

std::size_t Environment::action_count(Player p, StateId s) const { return game_->action_count(p, s); }

Transition Environment::step(std::size_t d, std::size_t a) {
    if (d >= game_->action_count(Player::defender, current_) || a >= game_->action_count(Player::attacker, current_)) {
        throw InvalidActionError("action index not available at " + game_->label(current_));
    }
    const auto outs = game_->outcomes(current_, d, a);
    const Outcome* chosen = &outs.back();
    if (outs.size() > 1) {
        const double u = CounterRng::uniform_at(seed_, stream_, steps_);
        double acc = 0.0;
        for (const Outcome& o : outs) {
            acc += o.prob;
            if (u < acc) {
                chosen = &o;
                break;
            }
        }
    }
    ++steps_;
    current_ = chosen->next;
    return {chosen->next, chosen->reward_D, chosen->reward_A};
}

} // namespace dift
