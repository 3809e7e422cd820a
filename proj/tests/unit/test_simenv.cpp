#include "fixtures.hpp"

#include "dift/errors.hpp"
#include "dift/simenv.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace dift;

namespace {

std::shared_ptr<const Game> edge_game(double fn) {
    FnRates rates;
    rates.default_rate = fn;
    return std::make_shared<const Game>(Game::build(fixtures::edge_ifg(), RewardParams::reference(1), rates));
}

} // namespace

TEST_CASE("reset") {
    Environment env(edge_game(0.2), 1);
    CHECK(env.current() == kRoot);
    env.step(0, 0);
    CHECK(env.current() != kRoot);
    CHECK(env.reset() == kRoot);
    CHECK(env.step_count() == 0);
    CHECK(env.reset() == kRoot);
    CHECK(env.current() == kRoot);
}

TEST_CASE("step examples") {
    const auto g = edge_game(0.2);
    Environment env(g, 3);
    const StateId e = g->state_of(0, 1);
    const StateId d = g->state_of(1, 1);
    CHECK(env.step(0, 0).next == e);

    SUBCASE("quit returns to the root with sigma rewards") {
        const Transition t = env.step(0, 1);
        CHECK(t.next == kRoot);
        CHECK(t.reward_D == 10.0 + 20.0);
        CHECK(t.reward_A == -30.0);
    }
    SUBCASE("unobserved move is deterministic") {
        const Transition t = env.step(0, 0);
        CHECK(t.next == d);
        CHECK(t.reward_A == 20.0);
    }
    SUBCASE("invalid action index") {
        CHECK_THROWS_AS(env.step(2, 0), InvalidActionError);
        CHECK_THROWS_AS(env.step(0, 2), InvalidActionError);
        CHECK(env.current() == e);
    }
}

TEST_CASE("empirical kernel matches transition_dist") {
    const double fn = 0.3;
    const auto g = edge_game(fn);
    Environment env(g, 2024);
    const StateId d = g->state_of(1, 1);
    const int samples = 1000000;
    int escaped = 0;
    for (int i = 0; i < samples; ++i) {
        env.step(0, 0);                 // s0 -> entry
        const Transition t = env.step(1, 0);  // inspect the attacker's move
        if (t.next == d) {
            ++escaped;
            env.step(0, 0);             // destination recycles to s0
        }
        REQUIRE(env.current() == kRoot);
    }
    const double sd = std::sqrt(fn * (1 - fn) / samples);
    CHECK(std::abs(escaped / static_cast<double>(samples) - fn) <= 3 * sd);
}

TEST_CASE("same seed gives the same trajectory") {
    const auto g = edge_game(0.5);
    Environment a(g, 77), b(g, 77), c(g, 78);
    auto inspect_if_possible = [&](const Environment& env) {
        return env.action_count(Player::defender, env.current()) > 1 ? std::size_t{1} : std::size_t{0};
    };
    bool differs = false;
    for (int i = 0; i < 200; ++i) {
        const Transition ta = a.step(inspect_if_possible(a), 0);
        const Transition tb = b.step(inspect_if_possible(b), 0);
        const Transition tc = c.step(inspect_if_possible(c), 0);
        CHECK(ta.next == tb.next);
        CHECK(ta.reward_D == tb.reward_D);
        differs = differs || tc.next != ta.next;
    }
    CHECK(differs);
}

namespace {

template <class E>
concept exposes_fn_rates = requires(const E& e) { e.fn_rate(StateId{}); };
template <class E>
concept exposes_kernel = requires(const E& e) { e.transition_dist(StateId{}, DefAction{}, AtkAction{}); } ||
                         requires(const E& e) { e.outcomes(StateId{}, std::size_t{}, std::size_t{}); };
template <class E>
concept exposes_game = requires(const E& e) { e.game(); };

} // namespace

TEST_CASE("environment surface hides the model") {
    static_assert(!exposes_fn_rates<Environment>);
    static_assert(!exposes_kernel<Environment>);
    static_assert(!exposes_game<Environment>);
    static_assert(exposes_fn_rates<Game> && exposes_kernel<Game>);
    CHECK(true);
}
