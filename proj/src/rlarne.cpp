#include "dift/rlarne.hpp"

#include "dift/errors.hpp"
#include "dift/rng.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dift {

namespace {

constexpr std::uint64_t kDefenderStream = 1;
constexpr std::uint64_t kAttackerStream = 2;
constexpr char kHistoryHeader[] = "n,rho_D,rho_A,phi_D,phi_A,phi_T";

std::size_t idx(StateId s) { return static_cast<std::size_t>(s); }

PlayerIterates fresh_iterates(const Environment& env, Player p) {
    PlayerIterates it;
    const std::size_t n = env.state_count();
    it.v.assign(n, 0.0);
    it.eps.resize(n);
    it.pi.player = p;
    it.pi.probs.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t na = env.action_count(p, static_cast<StateId>(s));
        it.eps[s].assign(na, 0.0);
        it.pi.probs[s].assign(na, 1.0 / static_cast<double>(na));
    }
    return it;
}

void put_optional(std::ostream& out, const std::optional<double>& x) {
    if (x) out << *x;
}

std::optional<double> parse_optional(const std::string& field) {
    if (field.empty()) return std::nullopt;
    return std::stod(field);
}

} // namespace

void TrainConfig::validate(std::size_t max_actions) const {
    if (!(c_v > 0 && c_v_post > 0)) throw ValidationError("step-size constants must be positive");
    if (!(sgn_sharpness > 1.0)) throw ValidationError("sgn sharpness must exceed 1");
    if (floor < 0 || floor * static_cast<double>(max_actions) >= 1.0) {
        throw ValidationError("exploration floor times the largest action count must stay below 1");
    }
    if (stride == 0) throw ValidationError("history stride must be positive");
    if (phi_stop < 0) throw ValidationError("phi_stop must be nonnegative");
}

Schedule schedules(std::uint64_t n, std::uint64_t visits, const TrainConfig& cfg) {
    if (n < cfg.warmup) return {cfg.c_v, 1.0, cfg.c_v, 1.0};
    const double kappa = static_cast<double>(std::max<std::uint64_t>(visits, 1));
    const double tau = static_cast<double>(n - cfg.warmup + 1);
    const double step = cfg.c_v_post / kappa;
    return {step, 1.0 / (1.0 + tau * std::log(tau)), step, 1.0 / tau};
}

double td_residual(double r, double rho, const std::vector<double>& v, StateId s, StateId next) {
    return r - rho + v[idx(next)] - v[idx(s)];
}

TrainerState initial_state(const Environment& env) {
    TrainerState st;
    st.D = fresh_iterates(env, Player::defender);
    st.A = fresh_iterates(env, Player::attacker);
    st.visits.assign(env.state_count(), 0);
    st.current = env.current();
    return st;
}

void train_step(TrainerState& st, Environment& env, const TrainConfig& cfg) {
    const StateId s = st.current;
    const std::uint64_t n = st.n;
    if (n >= cfg.warmup) ++st.visits[idx(s)];
    const Schedule step = schedules(n, st.visits[idx(s)], cfg);

    const std::size_t di = sample_index(st.D.pi.at(s), CounterRng::uniform_at(cfg.seed, kDefenderStream, n));
    const std::size_t ai = sample_index(st.A.pi.at(s), CounterRng::uniform_at(cfg.seed, kAttackerStream, n));
    const Transition tr = env.step(di, ai);
    st.min_reward = std::min({st.min_reward, tr.reward_D, tr.reward_A});
    st.max_reward = std::max({st.max_reward, tr.reward_D, tr.reward_A});

    const double td_D = td_residual(tr.reward_D, st.D.rho, st.D.v, s, tr.next);
    const double td_A = td_residual(tr.reward_A, st.A.rho, st.A.v, s, tr.next);
    const double td_sum = td_D + td_A;
    const double nn = static_cast<double>(n);

    for (Player k : {Player::defender, Player::attacker}) {
        PlayerIterates& it = st.of(k);
        const bool def = k == Player::defender;
        const std::size_t b = def ? di : ai;
        const double td = def ? td_D : td_A;
        const double r = def ? tr.reward_D : tr.reward_A;
        const double eps_old = it.eps[idx(s)][b];

        it.v[idx(s)] += step.v * td;
        const double rho_target = cfg.rho_rule == RhoRule::literal ? (nn * it.rho + r) / (nn + 1.0) : r;
        it.rho += step.rho * (rho_target - it.rho);
        it.eps[idx(s)][b] += step.eps * (td_sum - eps_old);

        if (cfg.learn_policy) {
            auto& row = it.pi.at(s);
            const double update =
                -step.pi * std::sqrt(row[b]) * std::abs(td) * std::tanh(cfg.sgn_sharpness * (-eps_old));
            if (std::abs(update) >= 1e-15) {
                row[b] += update;
                row = project_simplex(row, cfg.floor);
            }
        }
        if (it.rho < st.min_reward - 1e-9 || it.rho > st.max_reward + 1e-9) {
            throw std::logic_error("average-reward iterate left the reward range");
        }
    }
    st.current = tr.next;
    ++st.n;
}

std::string TrainHistory::to_csv() const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << kHistoryHeader << "\n";
    for (const HistoryRow& r : rows) {
        out << r.n << "," << r.rho_D << "," << r.rho_A << ",";
        put_optional(out, r.phi_D);
        out << ",";
        put_optional(out, r.phi_A);
        out << ",";
        put_optional(out, r.phi_T);
        out << "\n";
    }
    return out.str();
}

TrainHistory TrainHistory::parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHistoryHeader) throw ParseError("history CSV: unexpected header");
    TrainHistory h;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 6) throw ParseError("history CSV: expected 6 fields in '" + line + "'");
        try {
            HistoryRow r;
            r.n = std::stoull(f[0]);
            r.rho_D = std::stod(f[1]);
            r.rho_A = std::stod(f[2]);
            r.phi_D = parse_optional(f[3]);
            r.phi_A = parse_optional(f[4]);
            r.phi_T = parse_optional(f[5]);
            if (!h.rows.empty() && r.n <= h.rows.back().n) throw ParseError("history CSV: n must increase");
            h.rows.push_back(r);
        } catch (const std::invalid_argument&) {
            throw ParseError("history CSV: bad number in '" + line + "'");
        } catch (const std::out_of_range&) {
            throw ParseError("history CSV: number out of range in '" + line + "'");
        }
    }
    return h;
}

void TrainHistory::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << to_csv();
}

Policy strip_floor(const Policy& p, double floor) {
    Policy out = p;
    if (floor <= 0) return out;
    for (auto& row : out.probs) {
        if (row.size() < 2) continue;
        std::vector<double> support;
        for (double x : row) {
            if (x > floor * (1.0 + 1e-9)) support.push_back(x);
        }
        if (support.empty()) continue;
        support = project_simplex(support, 0.0);
        auto it = support.begin();
        for (double& x : row) x = x > floor * (1.0 + 1e-9) ? *it++ : 0.0;
    }
    return out;
}

TrainResult train(Environment& env, const TrainConfig& cfg, const Game* analytic) {
    std::size_t max_actions = 1;
    for (std::size_t s = 0; s < env.state_count(); ++s) {
        for (Player p : {Player::defender, Player::attacker}) {
            max_actions = std::max(max_actions, env.action_count(p, static_cast<StateId>(s)));
        }
    }
    cfg.validate(max_actions);
    if (analytic != nullptr && analytic->state_count() != env.state_count()) {
        throw IncompatibleError("analytic game does not match the environment");
    }

    env.reset();
    TrainResult result;
    result.state = initial_state(env);
    TrainerState& st = result.state;

    while (st.n < cfg.iterations) {
        train_step(st, env, cfg);
        if (st.n != 1 && st.n % cfg.stride != 0 && st.n != cfg.iterations) continue;

        HistoryRow row{st.n, st.D.rho, st.A.rho, {}, {}, {}};
        if (analytic != nullptr) {
            const PolicyPair pi{st.D.pi, st.A.pi};
            const TdErrors phi = td_errors(*analytic, pi, {st.D.rho, st.D.v}, {st.A.rho, st.A.v});
            row.phi_D = phi.phi_D;
            row.phi_A = phi.phi_A;
            row.phi_T = phi.phi_T;
        }
        result.history.rows.push_back(row);
        if (cfg.phi_stop > 0 && row.phi_T && std::abs(*row.phi_T) <= cfg.phi_stop) break;
    }

    result.policies.d = strip_floor(st.D.pi, cfg.floor);
    result.policies.a = strip_floor(st.A.pi, cfg.floor);
    return result;
}

} // namespace dift
