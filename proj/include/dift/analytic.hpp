#pragma once

#include "dift/game.hpp"
#include "dift/policy.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dift {

/// Gain and bias of one player. v is indexed by StateId with v[s0] = 0.
struct ValueEstimate {
    double rho = 0.0;
    std::vector<double> v;
};

struct Evaluation {
    ValueEstimate D;
    ValueEstimate A;
    /// max over states and players of |rho + v(s) - r(s) - (P v)(s)|
    double residual_norm = 0.0;
    /// recurrent class of the induced chain, sorted
    std::vector<StateId> recurrent;

    const ValueEstimate& of(Player p) const { return p == Player::defender ? D : A; }
};

/// Stationary distribution of an irreducible stochastic matrix. Throws
/// UnichainError when P has more than one recurrent class or transient states.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P);

/// Gain/bias of both players. Throws UnichainError if the induced chain has
/// more than one recurrent class.
Evaluation evaluate_policy_pair(const Game& g, const PolicyPair& pi);

/// Per-state, per-own-action table.
using ActionTable = std::vector<std::vector<double>>;

/// Q_k(s, d, a) = sum over outcomes of p * (r_k + v_k(s')).
double joint_q(const Game& g, Player k, const ValueEstimate& est, StateId s, std::size_t di, std::size_t ai);

/// Omega_k(s, a_k) = rho_k + v_k(s) - sum_{a_-k} pi_-k(s, a_-k) Q_k(s, a_k, a_-k).
ActionTable omega(const Game& g, const PolicyPair& pi, Player k, const ValueEstimate& est);

struct Residuals {
    ActionTable omega_D;
    ActionTable omega_A;
    double delta = 0.0;
    double phi_D = 0.0;
    double phi_A = 0.0;
    double phi_T = 0.0;
    double min_omega = 0.0;
    /// max over reachable (k, s) of |sum_a pi_k(s, a) Omega_k(s, a)|
    double max_state_weighted_sum = 0.0;

    const ActionTable& omega_of(Player p) const { return p == Player::defender ? omega_D : omega_A; }
};

/// Omega tables for both players and their pi-weighted sums; aggregates run
/// over the reachable states.
Residuals residuals(const Game& g, const PolicyPair& pi, const ValueEstimate& est_D, const ValueEstimate& est_A);
Residuals residuals(const Game& g, const PolicyPair& pi, const Evaluation& eval);

struct TdErrors {
    double phi_D = 0.0;
    double phi_A = 0.0;
    double phi_T = 0.0;
};

/// phi under exact evaluation of pi (zero up to solver error).
TdErrors td_errors(const Game& g, const PolicyPair& pi);
/// phi with externally supplied estimates, e.g. a trainer's iterates.
TdErrors td_errors(const Game& g, const PolicyPair& pi, const ValueEstimate& est_D, const ValueEstimate& est_A);

/// d Delta / d pi_k(s, a_k) of the bilinear extension
/// sum_s sum_k sum_{d,a} pi_D pi_A [rho_k + v_k(s) - Q_k(s, d, a)] with (rho, v) held fixed.
ActionTable exact_gradient(const Game& g, const PolicyPair& pi, Player k, const Evaluation& eval);

struct BestResponse {
    Policy policy;
    double gain = 0.0;
    int iterations = 0;
};

/// Howard policy iteration on the player's MDP with the opponent fixed.
/// Throws ConvergenceError after |S| * max|A| improvement rounds.
BestResponse best_response(const Game& g, const Policy& opponent, Player player);

struct Certificate {
    double tol = 0.0;
    double rho_D = 0.0;
    double rho_A = 0.0;
    double br_gain_D = 0.0;
    double br_gain_A = 0.0;
    double gap_D = 0.0;
    double gap_A = 0.0;
    Residuals residuals;
    bool verdict = false;

    std::string to_json() const;
};

Certificate certify_arne(const Game& g, const PolicyPair& pi, double tol);

} // namespace dift
