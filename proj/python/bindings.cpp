#include "dift/analytic.hpp"
#include "dift/errors.hpp"
#include "dift/experiment.hpp"
#include "dift/ifg.hpp"
#include "dift/rlarne.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

namespace py = pybind11;
using namespace dift;

namespace {

void bind_errors(py::module_& m) {
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<InvalidActionError>(m, "InvalidActionError", base.ptr());
    py::register_exception<IncompatibleError>(m, "IncompatibleError", base.ptr());
    py::register_exception<UnichainError>(m, "UnichainError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
}

void bind_graph(py::module_& m) {
    py::class_<ifg::SyntheticParams>(m, "SyntheticParams")
        .def(py::init<>())
        .def_readwrite("nodes", &ifg::SyntheticParams::nodes)
        .def_readwrite("stages", &ifg::SyntheticParams::stages)
        .def_readwrite("entries", &ifg::SyntheticParams::entries)
        .def_readwrite("dests_per_stage", &ifg::SyntheticParams::dests_per_stage)
        .def_readwrite("edge_density", &ifg::SyntheticParams::edge_density)
        .def_readwrite("seed", &ifg::SyntheticParams::seed);

    py::class_<ifg::Ifg>(m, "Ifg")
        .def_property_readonly("node_count", &ifg::Ifg::node_count)
        .def_property_readonly("edge_count", &ifg::Ifg::edge_count)
        .def_property_readonly("stages", &ifg::Ifg::stages)
        .def_property_readonly("edges", [](const ifg::Ifg& g) { return g.graph().edges; })
        .def_property_readonly("entries", [](const ifg::Ifg& g) { return g.surface().entries; })
        .def_property_readonly("destinations", [](const ifg::Ifg& g) { return g.surface().destinations; })
        .def("to_json", [](const ifg::Ifg& g) { return ifg::dump_graph_json(g.graph(), g.surface()); });

    m.def("generate_synthetic", &ifg::generate_synthetic, py::arg("params") = ifg::SyntheticParams{});
    m.def(
        "prune_graph",
        [](const std::string& text) {
            return ifg::prune_pipeline(ifg::parse_graph_json(text), {});
        },
        py::arg("json_text"), "Runs the pruning pipeline on a raw JSON graph.");
}

void bind_game(py::module_& m) {
    py::enum_<Player>(m, "Player").value("D", Player::defender).value("A", Player::attacker);

    py::class_<RewardParams>(m, "RewardParams")
        .def_static("reference", &RewardParams::reference, py::arg("stages") = 3)
        .def_readwrite("alpha_D", &RewardParams::alpha_D)
        .def_readwrite("beta_D", &RewardParams::beta_D)
        .def_readwrite("sigma_D", &RewardParams::sigma_D)
        .def_readwrite("alpha_A", &RewardParams::alpha_A)
        .def_readwrite("beta_A", &RewardParams::beta_A)
        .def_readwrite("sigma_A", &RewardParams::sigma_A)
        .def_readwrite("cost_D_per_stage", &RewardParams::cost_D_per_stage)
        .def_readwrite("strict_table", &RewardParams::strict_table);

    py::class_<Game, std::shared_ptr<Game>>(m, "Game")
        .def(py::init([](const ifg::Ifg& g, const RewardParams& p, double fn) {
                 FnRates rates;
                 rates.default_rate = fn;
                 return std::make_shared<Game>(Game::build(g, p, rates));
             }),
             py::arg("graph"), py::arg("params"), py::arg("fn") = 0.2)
        .def_property_readonly("state_count", &Game::state_count)
        .def("state_of", &Game::state_of, py::arg("node"), py::arg("stage"))
        .def("label", &Game::label)
        .def("action_count", &Game::action_count)
        .def("action_label", &Game::action_label)
        .def("reachable_states", &Game::reachable_states)
        .def("induced_chain", [](const Game& g, const PolicyPair& pi) { return induced_chain(g, pi); });
}

void bind_policy(py::module_& m) {
    py::class_<Policy>(m, "Policy")
        .def_readonly("player", &Policy::player)
        .def_readwrite("probs", &Policy::probs);
    py::class_<PolicyPair>(m, "PolicyPair")
        .def(py::init<Policy, Policy>(), py::arg("d"), py::arg("a"))
        .def_readwrite("d", &PolicyPair::d)
        .def_readwrite("a", &PolicyPair::a);

    m.def("uniform_policy", &uniform_policy);
    m.def("cut_policy", &cut_policy);
    m.def(
        "project_simplex", [](const std::vector<double>& v, double floor) { return project_simplex(v, floor); },
        py::arg("v"), py::arg("floor") = 0.0);
    m.def("dump_policy_json", &dump_policy_json);
    m.def("parse_policy_json", &parse_policy_json);
}

void bind_analytic(py::module_& m) {
    py::class_<ValueEstimate>(m, "ValueEstimate")
        .def_readonly("rho", &ValueEstimate::rho)
        .def_readonly("v", &ValueEstimate::v);
    py::class_<Evaluation>(m, "Evaluation")
        .def_readonly("D", &Evaluation::D)
        .def_readonly("A", &Evaluation::A)
        .def_readonly("residual_norm", &Evaluation::residual_norm);
    py::class_<Certificate>(m, "Certificate")
        .def_readonly("gap_D", &Certificate::gap_D)
        .def_readonly("gap_A", &Certificate::gap_A)
        .def_readonly("rho_D", &Certificate::rho_D)
        .def_readonly("rho_A", &Certificate::rho_A)
        .def_readonly("verdict", &Certificate::verdict)
        .def_property_readonly("min_omega", [](const Certificate& c) { return c.residuals.min_omega; })
        .def_property_readonly("delta", [](const Certificate& c) { return c.residuals.delta; })
        .def("to_json", &Certificate::to_json);

    m.def("evaluate", &evaluate_policy_pair, py::arg("game"), py::arg("policies"));
    m.def("certify", &certify_arne, py::arg("game"), py::arg("policies"), py::arg("tol") = 0.5);
    m.def(
        "best_response",
        [](const Game& g, const Policy& opp, Player p) {
            BestResponse br = best_response(g, opp, p);
            return py::make_tuple(br.policy, br.gain);
        },
        py::arg("game"), py::arg("opponent"), py::arg("player"));
    m.def(
        "compare",
        [](const Game& g, const PolicyPair& pi) {
            py::list out;
            for (const auto& r : exp::compare_policies(g, pi)) out.append(py::make_tuple(r.policy, r.rho_D, r.rho_A));
            return out;
        },
        py::arg("game"), py::arg("policies"));
}

void bind_training(py::module_& m) {
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &TrainConfig::iterations)
        .def_readwrite("warmup", &TrainConfig::warmup)
        .def_readwrite("c_v", &TrainConfig::c_v)
        .def_readwrite("c_v_post", &TrainConfig::c_v_post)
        .def_readwrite("sgn_sharpness", &TrainConfig::sgn_sharpness)
        .def_readwrite("floor", &TrainConfig::floor)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("stride", &TrainConfig::stride)
        .def_readwrite("phi_stop", &TrainConfig::phi_stop);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("policies", &TrainResult::policies)
        .def_property_readonly("history_csv", [](const TrainResult& r) { return r.history.to_csv(); })
        .def_property_readonly("rho", [](const TrainResult& r) { return py::make_tuple(r.state.D.rho, r.state.A.rho); });

    m.def(
        "train",
        [](std::shared_ptr<Game> g, const TrainConfig& cfg, bool with_phi) {
            py::gil_scoped_release release;
            Environment env(g, cfg.seed);
            return train(env, cfg, with_phi ? g.get() : nullptr);
        },
        py::arg("game"), py::arg("config"), py::arg("with_phi") = true);
}

} // namespace

PYBIND11_MODULE(dift_arne, m) {
    m.doc() = "DIFT-vs-APT average-reward stochastic game: RL-ARNE trainer and analytic oracles.";
    m.attr("__version__") = exp::version_string();
    bind_errors(m);
    bind_graph(m);
    bind_game(m);
    bind_policy(m);
    bind_analytic(m);
    bind_training(m);
}
