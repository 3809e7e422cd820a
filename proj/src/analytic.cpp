#include "dift/analytic.hpp"

#include "dift/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dift {

namespace {

std::size_t idx(StateId s) { return static_cast<std::size_t>(s); }

/// Solves rho + v(s) - sum_s' P(s, s') v(s') = r(s) with v(s0) = 0 for each
/// column of R. Returns rows [rho, v(1), ..., v(n-1)].
Eigen::MatrixXd solve_gain_bias(const Eigen::MatrixXd& P, const Eigen::MatrixXd& R) {
    const Eigen::Index n = P.rows();
    Eigen::MatrixXd A = -P;
    A.diagonal().array() += 1.0;
    A.col(0).setOnes();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::MatrixXd x = lu.solve(R);
    if (!x.allFinite()) throw UnichainError("evaluation system is singular");
    // replay the equations to detect a numerically singular system
    for (Eigen::Index c = 0; c < R.cols(); ++c) {
        Eigen::VectorXd v = x.col(c);
        const double rho = v(0);
        v(0) = 0.0;
        const Eigen::VectorXd res = (v - P * v).array() + rho - R.col(c).array();
        const double scale = 1.0 + R.col(c).cwiseAbs().maxCoeff();
        if (res.cwiseAbs().maxCoeff() > 1e-6 * scale * static_cast<double>(n)) {
            throw UnichainError("evaluation system is singular");
        }
    }
    return x;
}

ValueEstimate unpack(const Eigen::VectorXd& x) {
    ValueEstimate e;
    e.rho = x(0);
    e.v.assign(static_cast<std::size_t>(x.size()), 0.0);
    for (Eigen::Index i = 1; i < x.size(); ++i) e.v[static_cast<std::size_t>(i)] = x(i);
    return e;
}

double bellman_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& r, const ValueEstimate& e) {
    const Eigen::Map<const Eigen::VectorXd> v(e.v.data(), static_cast<Eigen::Index>(e.v.size()));
    const Eigen::VectorXd res = (v - P * v - r).array() + e.rho;
    return res.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd expected_rewards(const Game& g, const PolicyPair& pi) {
    const auto n = static_cast<Eigen::Index>(g.state_count());
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, 2);
    for (Eigen::Index si = 0; si < n; ++si) {
        const auto s = static_cast<StateId>(si);
        const auto& pd = pi.d.at(s);
        const auto& pa = pi.a.at(s);
        for (std::size_t di = 0; di < pd.size(); ++di) {
            for (std::size_t ai = 0; ai < pa.size(); ++ai) {
                const double w = pd[di] * pa[ai];
                if (w == 0.0) continue;
                for (const Outcome& o : g.outcomes(s, di, ai)) {
                    R(si, 0) += w * o.prob * o.reward_D;
                    R(si, 1) += w * o.prob * o.reward_A;
                }
            }
        }
    }
    return R;
}

/// Opponent-marginalised Q for player k's own action b at state s.
double marginal_q(const Game& g, const PolicyPair& pi, Player k, const ValueEstimate& est, StateId s,
                  std::size_t b) {
    const Player o = opponent(k);
    const auto& po = pi.of(o).at(s);
    double q = 0.0;
    for (std::size_t c = 0; c < po.size(); ++c) {
        if (po[c] == 0.0) continue;
        const std::size_t di = k == Player::defender ? b : c;
        const std::size_t ai = k == Player::defender ? c : b;
        q += po[c] * joint_q(g, k, est, s, di, ai);
    }
    return q;
}

} // namespace

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P) {
    const Eigen::Index n = P.rows();
    if (n == 0 || P.cols() != n) throw UnichainError("stationary distribution needs a square nonempty matrix");
    const ChainClasses cls = classify_chain(P);
    if (cls.recurrent.size() != 1 || !cls.transient.empty()) {
        throw UnichainError("matrix is not irreducible");
    }
    Eigen::MatrixXd A = P.transpose();
    A.diagonal().array() -= 1.0;
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd p = A.partialPivLu().solve(b);
    if (!p.allFinite()) throw UnichainError("stationary system is singular");
    return p;
}

Evaluation evaluate_policy_pair(const Game& g, const PolicyPair& pi) {
    const Eigen::MatrixXd P = induced_chain(g, pi);
    const Eigen::MatrixXd R = expected_rewards(g, pi);

    const ChainClasses cls = classify_chain(P);
    if (cls.recurrent.size() != 1) {
        throw UnichainError("induced chain has " + std::to_string(cls.recurrent.size()) + " recurrent classes");
    }

    const Eigen::MatrixXd x = solve_gain_bias(P, R);
    Evaluation ev;
    ev.D = unpack(x.col(0));
    ev.A = unpack(x.col(1));
    ev.recurrent = cls.recurrent.front();
    ev.residual_norm = std::max(bellman_residual(P, R.col(0), ev.D), bellman_residual(P, R.col(1), ev.A));

    // the gain must equal the stationary average over the recurrent class
    const auto& rec = ev.recurrent;
    const auto m = static_cast<Eigen::Index>(rec.size());
    Eigen::MatrixXd Pr(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) Pr(i, j) = P(rec[static_cast<std::size_t>(i)], rec[static_cast<std::size_t>(j)]);
    }
    const Eigen::VectorXd p = stationary_distribution(Pr);
    double rho_D = 0.0;
    double rho_A = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        rho_D += p(i) * R(rec[static_cast<std::size_t>(i)], 0);
        rho_A += p(i) * R(rec[static_cast<std::size_t>(i)], 1);
    }
    const double scale = 1.0 + R.cwiseAbs().maxCoeff();
    if (std::abs(rho_D - ev.D.rho) > 1e-8 * scale || std::abs(rho_A - ev.A.rho) > 1e-8 * scale) {
        throw UnichainError("gain disagrees with the stationary average");
    }
    return ev;
}

double joint_q(const Game& g, Player k, const ValueEstimate& est, StateId s, std::size_t di, std::size_t ai) {
    double q = 0.0;
    for (const Outcome& o : g.outcomes(s, di, ai)) {
        const double r = k == Player::defender ? o.reward_D : o.reward_A;
        q += o.prob * (r + est.v[idx(o.next)]);
    }
    return q;
}

ActionTable omega(const Game& g, const PolicyPair& pi, Player k, const ValueEstimate& est) {
    ActionTable out(g.state_count());
    for (std::size_t si = 0; si < g.state_count(); ++si) {
        const auto s = static_cast<StateId>(si);
        const std::size_t nb = g.action_count(k, s);
        out[si].resize(nb);
        for (std::size_t b = 0; b < nb; ++b) {
            out[si][b] = est.rho + est.v[si] - marginal_q(g, pi, k, est, s, b);
        }
    }
    return out;
}

Residuals residuals(const Game& g, const PolicyPair& pi, const ValueEstimate& est_D, const ValueEstimate& est_A) {
    Residuals res;
    res.omega_D = omega(g, pi, Player::defender, est_D);
    res.omega_A = omega(g, pi, Player::attacker, est_A);
    res.min_omega = std::numeric_limits<double>::infinity();
    for (StateId s : g.reachable_states()) {
        for (Player k : {Player::defender, Player::attacker}) {
            const auto& om = res.omega_of(k)[idx(s)];
            const auto& p = pi.of(k).at(s);
            double sum = 0.0;
            for (std::size_t b = 0; b < om.size(); ++b) {
                sum += p[b] * om[b];
                res.min_omega = std::min(res.min_omega, om[b]);
            }
            (k == Player::defender ? res.phi_D : res.phi_A) += sum;
            res.max_state_weighted_sum = std::max(res.max_state_weighted_sum, std::abs(sum));
        }
    }
    res.phi_T = res.phi_D + res.phi_A;
    res.delta = res.phi_T;
    return res;
}

Residuals residuals(const Game& g, const PolicyPair& pi, const Evaluation& eval) {
    return residuals(g, pi, eval.D, eval.A);
}

TdErrors td_errors(const Game& g, const PolicyPair& pi) {
    const Evaluation ev = evaluate_policy_pair(g, pi);
    return td_errors(g, pi, ev.D, ev.A);
}

TdErrors td_errors(const Game& g, const PolicyPair& pi, const ValueEstimate& est_D, const ValueEstimate& est_A) {
    const Residuals r = residuals(g, pi, est_D, est_A);
    return {r.phi_D, r.phi_A, r.phi_T};
}

ActionTable exact_gradient(const Game& g, const PolicyPair& pi, Player k, const Evaluation& eval) {
    const Player o = opponent(k);
    ActionTable grad = omega(g, pi, k, eval.of(k));
    const ValueEstimate& eo = eval.of(o);
    for (std::size_t si = 0; si < g.state_count(); ++si) {
        const auto s = static_cast<StateId>(si);
        const auto& po = pi.of(o).at(s);
        for (std::size_t b = 0; b < grad[si].size(); ++b) {
            double slice = 0.0;
            for (std::size_t c = 0; c < po.size(); ++c) {
                const std::size_t di = k == Player::defender ? b : c;
                const std::size_t ai = k == Player::defender ? c : b;
                slice += po[c] * (eo.rho + eo.v[si] - joint_q(g, o, eo, s, di, ai));
            }
            grad[si][b] += slice;
        }
    }
    return grad;
}

BestResponse best_response(const Game& g, const Policy& opponent_policy, Player player) {
    const std::size_t n = g.state_count();
    PolicyPair pi;
    pi.of(opponent(player)) = opponent_policy;
    validate_policy(g, opponent_policy);

    // action choice per state; start from the first action
    std::vector<std::size_t> choice(n, 0);
    const int budget = static_cast<int>(n * g.max_action_count());
    for (int iter = 1; iter <= budget; ++iter) {
        pi.of(player) = deterministic_policy(g, player, choice);
        const Eigen::MatrixXd P = induced_chain(g, pi);
        const Eigen::MatrixXd R = expected_rewards(g, pi);
        const int col = player == Player::defender ? 0 : 1;
        const ValueEstimate est = unpack(solve_gain_bias(P, R.col(col)).col(0));

        bool changed = false;
        for (std::size_t si = 0; si < n; ++si) {
            const auto s = static_cast<StateId>(si);
            const std::size_t nb = g.action_count(player, s);
            if (nb == 1) continue;
            std::vector<double> q(nb);
            for (std::size_t b = 0; b < nb; ++b) q[b] = marginal_q(g, pi, player, est, s, b);
            const auto best = static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
            if (q[best] > q[choice[si]] + 1e-12) {
                choice[si] = best;
                changed = true;
            }
        }
        if (!changed) return {pi.of(player), est.rho, iter};
    }
    throw ConvergenceError("policy iteration did not reach a fixpoint");
}

Certificate certify_arne(const Game& g, const PolicyPair& pi, double tol) {
    validate_policy(g, pi.d);
    validate_policy(g, pi.a);
    Certificate c;
    c.tol = tol;
    const Evaluation ev = evaluate_policy_pair(g, pi);
    c.rho_D = ev.D.rho;
    c.rho_A = ev.A.rho;
    c.residuals = residuals(g, pi, ev);
    c.br_gain_D = best_response(g, pi.a, Player::defender).gain;
    c.br_gain_A = best_response(g, pi.d, Player::attacker).gain;
    c.gap_D = c.br_gain_D - c.rho_D;
    c.gap_A = c.br_gain_A - c.rho_A;
    c.verdict = c.gap_D <= tol && c.gap_A <= tol && c.residuals.min_omega >= -tol && std::abs(c.residuals.delta) <= tol;
    return c;
}

std::string Certificate::to_json() const {
    nlohmann::json doc{
        {"gaps", {{"D", gap_D}, {"A", gap_A}}},
        {"rho", {{"D", rho_D}, {"A", rho_A}}},
        {"best_response_gain", {{"D", br_gain_D}, {"A", br_gain_A}}},
        {"delta", residuals.delta},
        {"min_omega", residuals.min_omega},
        {"phi", {{"D", residuals.phi_D}, {"A", residuals.phi_A}, {"T", residuals.phi_T}}},
        {"verdict", verdict},
        {"tol", tol},
    };
    return doc.dump(2) + "\n";
}

} // namespace dift
