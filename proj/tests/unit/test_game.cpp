#include "fixtures.hpp"

#include "dift/errors.hpp"
#include "dift/game.hpp"
#include "dift/policy.hpp"

#include <doctest.h>

#include <cmath>

using namespace dift;

namespace {

std::size_t def_index(const Game& g, StateId s, DefAction d) {
    const auto acts = g.def_actions(s);
    return static_cast<std::size_t>(std::find(acts.begin(), acts.end(), d) - acts.begin());
}

std::size_t atk_index(const Game& g, StateId s, AtkAction a) {
    const auto acts = g.atk_actions(s);
    return static_cast<std::size_t>(std::find(acts.begin(), acts.end(), a) - acts.begin());
}

} // namespace

TEST_CASE("state space size") {
    const Game g = Game::build(ifg::generate_synthetic({}), RewardParams::reference(3), {});
    CHECK(g.state_count() == 18 * 3 + 1);
    CHECK(g.label(kRoot) == "s0");
    CHECK(g.state_of(4, 2) == 1 + 18 + 4);
    CHECK(g.key(g.state_of(4, 2)).node == 4);
}

TEST_CASE("action sets follow the four cases") {
    const Game g = fixtures::diamond_game();
    SUBCASE("root") {
        CHECK(g.action_count(Player::attacker, kRoot) == 2);
        CHECK(g.action_count(Player::defender, kRoot) == 1);
        CHECK(g.def_actions(kRoot)[0] == DefAction{});
        CHECK(g.atk_actions(kRoot)[0].target == g.state_of(0, 1));
        CHECK(g.atk_actions(kRoot)[1].target == g.state_of(1, 1));
    }
    SUBCASE("interior") {
        const StateId s = g.state_of(2, 1);
        CHECK(g.state_case(s) == StateCase::interior);
        REQUIRE(g.action_count(Player::defender, s) == 3);
        CHECK(g.def_actions(s)[0] == DefAction{});
        CHECK(g.def_actions(s)[1].target == g.state_of(3, 1));
        CHECK(g.def_actions(s)[2].target == g.state_of(4, 1));
        REQUIRE(g.action_count(Player::attacker, s) == 3);
        CHECK(g.atk_actions(s)[2].quits());
    }
    SUBCASE("final destination recycles to the root") {
        const StateId s = g.state_of(5, 1);
        CHECK(g.state_case(s) == StateCase::final_destination);
        REQUIRE(g.action_count(Player::attacker, s) == 1);
        CHECK(g.atk_actions(s)[0].target == kRoot);
        CHECK(g.action_count(Player::defender, s) == 1);
    }
    SUBCASE("intermediate destination advances the stage") {
        const Game g2 = Game::build(ifg::generate_synthetic({}), RewardParams::reference(3), {});
        const ifg::NodeId d1 = g2.graph().surface().destinations[0][0];
        const StateId s = g2.state_of(d1, 1);
        CHECK(g2.state_case(s) == StateCase::intermediate_destination);
        REQUIRE(g2.action_count(Player::attacker, s) == 1);
        CHECK(g2.atk_actions(s)[0].target == g2.state_of(d1, 2));
    }
}

TEST_CASE("transition_dist cases") {
    FnRates fn;
    fn.default_rate = 0.3;
    const Game g = Game::build(fixtures::diamond_ifg(), RewardParams::reference(1), fn);
    const StateId s = g.state_of(2, 1);
    const StateId t = g.state_of(3, 1);
    const StateId u = g.state_of(4, 1);
    using Dist = std::vector<std::pair<StateId, double>>;
    CHECK(g.transition_dist(s, {}, {t}) == Dist{{t, 1.0}});
    auto hit = g.transition_dist(s, {t}, {t});
    std::sort(hit.begin(), hit.end());
    REQUIRE(hit.size() == 2);
    CHECK(hit[0].first == kRoot);
    CHECK(hit[0].second == doctest::Approx(0.7));
    CHECK(hit[1].second == doctest::Approx(0.3));
    CHECK(g.transition_dist(s, {t}, {u}) == Dist{{u, 1.0}});
    CHECK(g.transition_dist(s, {t}, {}) == Dist{{kRoot, 1.0}});
    CHECK_THROWS_AS(g.transition_dist(s, {g.state_of(5, 1)}, {t}), InvalidActionError);
    CHECK_THROWS_AS(g.transition_dist(kRoot, {}, {}), InvalidActionError);
}

TEST_CASE("reward table under reference parameters") {
    const Game g = fixtures::diamond_game();
    const StateId s = g.state_of(2, 1);
    const StateId t = g.state_of(3, 1);
    const StateId u = g.state_of(4, 1);
    CHECK(g.reward(s, {t}, {t}, kRoot) == std::pair{39.0, -20.0});
    CHECK(g.reward(s, {}, {}, kRoot) == std::pair{30.0, -30.0});
    CHECK(g.reward(s, {t}, {u}, u) == std::pair{-1.0, 0.0});
    CHECK(g.reward(s, {t}, {}, kRoot) == std::pair{29.0, -30.0});
    // FN hit: table row "otherwise"
    CHECK(g.reward(s, {t}, {t}, t) == std::pair{0.0, 0.0});

    const StateId pre = g.state_of(3, 1);
    const StateId dest = g.state_of(5, 1);
    CHECK(g.reward(pre, {}, {dest}, dest) == std::pair{-30.0, 20.0});
    CHECK(g.reward(pre, {dest}, {dest}, kRoot) == std::pair{39.0, -20.0});

    SUBCASE("costs are zero at entries and destinations") {
        CHECK(g.cost_D(kRoot) == 0.0);
        CHECK(g.cost_D(g.state_of(0, 1)) == 0.0);
        CHECK(g.cost_D(dest) == 0.0);
        CHECK(g.cost_D(s) == -1.0);
    }
    SUBCASE("strict_table=false charges beta_D regardless of inspection") {
        // 0 -> 1 -> {2, 3}, 2 -> 3, destination 3
        const auto fork = ifg::Ifg::create(fixtures::make_graph(4, {{0, 1}, {1, 2}, {1, 3}, {2, 3}}), {{0}, {{3}}});
        RewardParams p = RewardParams::reference(1);
        const Game strict = Game::build(fork, p, {});
        p.strict_table = false;
        const Game loose = Game::build(fork, p, {});
        const StateId one = strict.state_of(1, 1);
        const StateId two = strict.state_of(2, 1);
        const StateId three = strict.state_of(3, 1);
        CHECK(strict.reward(one, {two}, {three}, three) == std::pair{-1.0, 20.0});
        CHECK(loose.reward(one, {two}, {three}, three) == std::pair{-31.0, 20.0});
        CHECK(loose.reward(one, {}, {three}, three) == std::pair{-30.0, 20.0});
        CHECK(loose.reward(one, {two}, {two}, kRoot) == std::pair{39.0, -20.0});
    }
}

TEST_CASE("reference parameters scale with the stage") {
    const RewardParams p = RewardParams::reference(3);
    CHECK(p.alpha_D == std::vector<double>{40, 80, 120});
    CHECK(p.sigma_D[0] == 30.0);
    CHECK(p.sigma_A[0] == -30.0);
    CHECK(p.cost_D_per_stage == std::vector<double>{-1, -2, -3});
    RewardParams bad = p;
    bad.beta_D[1] = 5.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("parameter JSON round-trips") {
    RewardParams p = RewardParams::reference(2);
    p.cost_D_per_state[3] = -0.5;
    p.strict_table = false;
    const RewardParams q = parse_reward_params(dump_reward_params(p));
    CHECK(q.alpha_A == p.alpha_A);
    CHECK(q.cost_D_per_state == p.cost_D_per_state);
    CHECK_FALSE(q.strict_table);
    CHECK_THROWS_AS(parse_reward_params("{"), ParseError);
    const FnRates fn = parse_fn_rates(R"({"fn": {"default": 0.1, "per_state": {"3": 0.4}}})");
    CHECK(fn.at(3) == 0.4);
    CHECK(fn.at(4) == 0.1);
    CHECK_THROWS_AS(parse_fn_rates(R"({"fn": 1.0})"), ValidationError);
}

TEST_CASE("every kernel row is a distribution") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ifg::SyntheticParams sp;
        sp.seed = seed;
        const Game g = Game::build(ifg::generate_synthetic(sp), RewardParams::reference(3), {});
        for (std::size_t s = 0; s < g.state_count(); ++s) {
            const auto sid = static_cast<StateId>(s);
            for (const DefAction& d : g.def_actions(sid)) {
                for (const AtkAction& a : g.atk_actions(sid)) {
                    double sum = 0.0;
                    for (const auto& [next, p] : g.transition_dist(sid, d, a)) {
                        CHECK(p >= 0.0);
                        sum += p;
                    }
                    CHECK(std::abs(sum - 1.0) <= 1e-12);
                }
            }
        }
    }
}

TEST_CASE("induced chain") {
    const Game g = fixtures::diamond_game();
    CounterRng rng(3);
    const PolicyPair pi{fixtures::random_policy(g, Player::defender, rng), fixtures::random_policy(g, Player::attacker, rng)};
    const Eigen::MatrixXd P = induced_chain(g, pi);
    for (Eigen::Index i = 0; i < P.rows(); ++i) CHECK(std::abs(P.row(i).sum() - 1.0) <= 1e-12);
    CHECK(P(0, g.state_of(0, 1)) == doctest::Approx(pi.a.at(kRoot)[0]));

    SUBCASE("independent mixture oracle") {
        const StateId s = g.state_of(2, 1);
        Eigen::VectorXd row = Eigen::VectorXd::Zero(P.cols());
        const auto defs = g.def_actions(s);
        const auto atks = g.atk_actions(s);
        for (std::size_t di = 0; di < defs.size(); ++di) {
            for (std::size_t ai = 0; ai < atks.size(); ++ai) {
                for (const auto& [next, p] : g.transition_dist(s, defs[di], atks[ai])) {
                    row(next) += pi.d.at(s)[di] * pi.a.at(s)[ai] * p;
                }
            }
        }
        CHECK((P.row(s).transpose() - row).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("classify_chain") {
    SUBCASE("identity") {
        const auto c = classify_chain(Eigen::MatrixXd::Identity(3, 3));
        CHECK(c.recurrent.size() == 3);
        CHECK(c.transient.empty());
    }
    SUBCASE("swap") {
        Eigen::MatrixXd P(2, 2);
        P << 0, 1, 1, 0;
        const auto c = classify_chain(P);
        REQUIRE(c.recurrent.size() == 1);
        CHECK(c.recurrent[0] == std::vector<StateId>{0, 1});
        CHECK(c.transient.empty());
    }
    SUBCASE("absorbing state with a transient feeder") {
        Eigen::MatrixXd P(3, 3);
        P << 0.5, 0.5, 0, 0, 0, 1, 0, 0, 1;
        const auto c = classify_chain(P);
        REQUIRE(c.recurrent.size() == 1);
        CHECK(c.recurrent[0] == std::vector<StateId>{2});
        CHECK(c.transient == std::vector<StateId>{0, 1});
    }
}

TEST_CASE("deterministic policy pairs induce one recurrent class containing the root") {
    CounterRng rng(99);
    const Game g = Game::build(ifg::generate_synthetic({}), RewardParams::reference(3), {});
    for (int t = 0; t < 120; ++t) {
        const auto cd = fixtures::random_choice(g, Player::defender, rng);
        const auto ca = fixtures::random_choice(g, Player::attacker, rng);
        const PolicyPair pi{deterministic_policy(g, Player::defender, cd), deterministic_policy(g, Player::attacker, ca)};
        const auto c = classify_chain(induced_chain(g, pi));
        REQUIRE(c.recurrent.size() == 1);
        const auto& cls = c.recurrent[0];
        CHECK(std::find(cls.begin(), cls.end(), kRoot) != cls.end());
    }
}

TEST_CASE("game is nonzero-sum") {
    const Game g = fixtures::diamond_game();
    bool witness = false;
    for (std::size_t s = 0; s < g.state_count(); ++s) {
        const auto sid = static_cast<StateId>(s);
        for (std::size_t di = 0; di < g.action_count(Player::defender, sid); ++di) {
            for (std::size_t ai = 0; ai < g.action_count(Player::attacker, sid); ++ai) {
                for (const Outcome& o : g.outcomes(sid, di, ai)) witness = witness || o.reward_D != -o.reward_A;
            }
        }
    }
    CHECK(witness);
}

TEST_CASE("queries are pure") {
    const Game g = fixtures::diamond_game();
    const StateId s = g.state_of(2, 1);
    const StateId t = g.state_of(3, 1);
    for (int i = 0; i < 5; ++i) {
        CHECK(g.transition_dist(s, {t}, {t}) == g.transition_dist(s, {t}, {t}));
        CHECK(g.reward(s, {t}, {t}, kRoot) == g.reward(s, {t}, {t}, kRoot));
    }
    const auto out = g.outcomes(s, def_index(g, s, {t}), atk_index(g, s, {t}));
    double sum = 0.0;
    for (const Outcome& o : out) sum += o.prob;
    CHECK(sum == doctest::Approx(1.0));
}
