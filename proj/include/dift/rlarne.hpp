#pragma once

#include "dift/analytic.hpp"
#include "dift/game.hpp"
#include "dift/policy.hpp"
#include "dift/simenv.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dift {

/// literal: rho += d_rho * [(n rho + r) / (n + 1) - rho] with the global n.
/// tracking: rho += d_rho * (r - rho), for sensitivity runs only.
enum class RhoRule { literal, tracking };

struct TrainConfig {
    std::uint64_t iterations = 250000;
    std::uint64_t warmup = 7000;
    /// delta_v = delta_eps before warmup ends
    double c_v = 0.5;
    /// numerator of delta_v = delta_eps after warmup
    double c_v_post = 1.6;
    /// sgn(x) = tanh(sgn_sharpness * x)
    double sgn_sharpness = 10.0;
    double floor = 1e-3;
    std::uint64_t seed = 1;
    std::uint64_t stride = 500;
    /// stop early once |phi_T| <= phi_stop at a history row (0 disables; needs a game handle)
    double phi_stop = 0.0;
    /// false keeps the policies fixed (diagnostic runs of the critic and gradient iterates)
    bool learn_policy = true;
    RhoRule rho_rule = RhoRule::literal;

    /// Throws ValidationError.
    void validate(std::size_t max_actions) const;
};

struct Schedule {
    double v = 0.0;
    double rho = 0.0;
    double eps = 0.0;
    double pi = 0.0;
};

/// Step sizes at iteration n for a state visited `visits` times since warmup.
Schedule schedules(std::uint64_t n, std::uint64_t visits, const TrainConfig& cfg);

/// r - rho + v(s') - v(s).
double td_residual(double r, double rho, const std::vector<double>& v, StateId s, StateId next);

struct PlayerIterates {
    std::vector<double> v;
    double rho = 0.0;
    ActionTable eps;
    Policy pi;
};

struct TrainerState {
    std::uint64_t n = 0;
    PlayerIterates D;
    PlayerIterates A;
    std::vector<std::uint64_t> visits;
    StateId current = kRoot;
    double min_reward = 0.0;
    double max_reward = 0.0;

    const PlayerIterates& of(Player p) const { return p == Player::defender ? D : A; }
    PlayerIterates& of(Player p) { return p == Player::defender ? D : A; }
};

/// Zero iterates and uniform policies sized from the environment.
TrainerState initial_state(const Environment& env);

/// One pass of the loop body: sample actions, step, update v, rho, eps, pi.
void train_step(TrainerState& state, Environment& env, const TrainConfig& cfg);

struct HistoryRow {
    std::uint64_t n = 0;
    double rho_D = 0.0;
    double rho_A = 0.0;
    std::optional<double> phi_D;
    std::optional<double> phi_A;
    std::optional<double> phi_T;
};

struct TrainHistory {
    std::vector<HistoryRow> rows;

    std::string to_csv() const;
    static TrainHistory parse_csv(const std::string& text);
    void save(const std::filesystem::path& path) const;
};

struct TrainResult {
    PolicyPair policies;
    TrainHistory history;
    TrainerState state;
};

/// Drops exploration mass: entries at the training floor are zeroed and the
/// remaining support is projected back onto the simplex with floor 0.
Policy strip_floor(const Policy& p, double floor);

/// Runs cfg.iterations steps from a reset environment. With a game handle,
/// history rows carry phi computed from the trainer's own (rho, v) iterates.
TrainResult train(Environment& env, const TrainConfig& cfg, const Game* analytic = nullptr);

} // namespace dift
