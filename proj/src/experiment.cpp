#include "dift/experiment.hpp"

#include "dift/errors.hpp"
#include "dift/policy.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifndef DIFT_VERSION_STRING
#define DIFT_VERSION_STRING "0.1.0+unknown"
#endif

namespace dift::exp {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

json synthetic_to_json(const ifg::SyntheticParams& p) {
    return {{"nodes", p.nodes},
            {"stages", p.stages},
            {"entries", p.entries},
            {"dests_per_stage", p.dests_per_stage},
            {"edge_density", p.edge_density},
            {"seed", p.seed}};
}

ifg::SyntheticParams synthetic_from_json(const json& j) {
    ifg::SyntheticParams p;
    p.nodes = j.value("nodes", p.nodes);
    p.stages = j.value("stages", p.stages);
    p.entries = j.value("entries", p.entries);
    if (j.contains("dests_per_stage")) {
        p.dests_per_stage = j.at("dests_per_stage").get<std::vector<int>>();
    } else {
        p.dests_per_stage.assign(static_cast<std::size_t>(std::max(p.stages, 0)), 1);
    }
    p.edge_density = j.value("edge_density", p.edge_density);
    p.seed = j.value("seed", p.seed);
    return p;
}

json fn_to_json(const FnRates& fn) {
    json j{{"default", fn.default_rate}};
    if (!fn.per_state.empty()) {
        json m = json::object();
        for (const auto& [s, x] : fn.per_state) m[std::to_string(s)] = x;
        j["per_state"] = m;
    }
    return j;
}

json train_to_json(const TrainConfig& t) {
    return {{"iterations", t.iterations}, {"warmup", t.warmup},       {"c_v", t.c_v},
            {"c_v_post", t.c_v_post},     {"sgn_sharpness", t.sgn_sharpness}, {"floor", t.floor},
            {"seed", t.seed},             {"stride", t.stride},       {"phi_stop", t.phi_stop},
            {"learn_policy", t.learn_policy},
            {"rho_rule", t.rho_rule == RhoRule::literal ? "literal" : "tracking"}};
}

TrainConfig train_from_json(const json& j) {
    TrainConfig t;
    t.iterations = j.value("iterations", t.iterations);
    t.warmup = j.value("warmup", t.warmup);
    t.c_v = j.value("c_v", t.c_v);
    t.c_v_post = j.value("c_v_post", t.c_v_post);
    t.sgn_sharpness = j.value("sgn_sharpness", t.sgn_sharpness);
    t.floor = j.value("floor", t.floor);
    t.seed = j.value("seed", t.seed);
    t.stride = j.value("stride", t.stride);
    t.phi_stop = j.value("phi_stop", t.phi_stop);
    t.learn_policy = j.value("learn_policy", t.learn_policy);
    const std::string rule = j.value("rho_rule", std::string("literal"));
    if (rule == "literal") {
        t.rho_rule = RhoRule::literal;
    } else if (rule == "tracking") {
        t.rho_rule = RhoRule::tracking;
    } else {
        throw ValidationError("train.rho_rule must be \"literal\" or \"tracking\"");
    }
    return t;
}

PolicyPair load_pair(const Game& g, const std::filesystem::path& pd, const std::filesystem::path& pa) {
    PolicyPair pi{load_policy(g, pd), load_policy(g, pa)};
    if (pi.d.player != Player::defender || pi.a.player != Player::attacker) {
        throw IncompatibleError("expected a defender policy and an attacker policy");
    }
    return pi;
}

void print_counts(std::ostream& log, const char* what, std::size_t nodes, std::size_t edges) {
    log << what << ": " << nodes << " nodes, " << edges << " edges\n";
}

} // namespace

std::string version_string() { return DIFT_VERSION_STRING; }

ExperimentConfig ExperimentConfig::parse(const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config JSON must be an object");

    ExperimentConfig cfg;
    try {
        if (doc.contains("graph")) {
            const json& g = doc.at("graph");
            if (g.contains("file")) {
                std::filesystem::path f = g.at("file").get<std::string>();
                cfg.graph.file = f.is_absolute() ? f : base_dir / f;
                if (!std::filesystem::exists(*cfg.graph.file)) {
                    throw ValidationError("graph file " + cfg.graph.file->string() + " does not exist");
                }
            }
            if (g.contains("synthetic")) cfg.graph.synthetic = synthetic_from_json(g.at("synthetic"));
            if (g.contains("merge")) {
                for (const auto& m : g.at("merge")) {
                    cfg.graph.merge.push_back({m.at("prefix").get<std::string>(), m.at("label").get<std::string>()});
                }
            }
        }
        const json game = doc.value("game", json::object());
        json params = game;
        if (!params.contains("stages")) {
            params["stages"] = cfg.graph.file ? 3 : cfg.graph.synthetic.stages;
        }
        cfg.params = parse_reward_params(params.dump());
        cfg.fn = parse_fn_rates(game.dump());
        if (doc.contains("train")) cfg.train = train_from_json(doc.at("train"));
        if (doc.contains("out")) {
            std::filesystem::path o = doc.at("out").get<std::string>();
            cfg.out = o.is_absolute() ? o : base_dir / o;
        } else {
            cfg.out = base_dir / "out";
        }
        cfg.tolerance = doc.value("tolerance", cfg.tolerance);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    if (!(cfg.tolerance >= 0)) throw ValidationError("tolerance must be nonnegative");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse(read_file(path), base);
}

std::string ExperimentConfig::to_json() const {
    json g = json::object();
    if (graph.file) {
        g["file"] = std::filesystem::absolute(*graph.file).lexically_normal().string();
    } else {
        g["synthetic"] = synthetic_to_json(graph.synthetic);
    }
    if (!graph.merge.empty()) {
        g["merge"] = json::array();
        for (const auto& m : graph.merge) g["merge"].push_back({{"prefix", m.prefix}, {"label", m.merged_label}});
    }
    json game = json::parse(dump_reward_params(params));
    game["fn"] = fn_to_json(fn);
    json doc{{"graph", g},
             {"game", game},
             {"train", train_to_json(train)},
             {"out", std::filesystem::absolute(out).lexically_normal().string()},
             {"tolerance", tolerance}};
    return doc.dump(2) + "\n";
}

ifg::Ifg build_graph(const ExperimentConfig& cfg) {
    if (!cfg.graph.file) return ifg::generate_synthetic(cfg.graph.synthetic);
    const ifg::LoadedGraph loaded = ifg::load_graph(*cfg.graph.file);
    if (cfg.graph.merge.empty() && loaded.report.self_loops_dropped == 0 &&
        ifg::invariant_violations(loaded.graph, loaded.surface).empty()) {
        return ifg::Ifg::create(loaded.graph, loaded.surface);
    }
    return ifg::prune_pipeline(loaded, cfg.graph.merge);
}

Game build_game(const ExperimentConfig& cfg) { return Game::build(build_graph(cfg), cfg.params, cfg.fn); }

std::vector<ComparisonRow> compare_policies(const Game& g, const PolicyPair& arne) {
    std::vector<ComparisonRow> rows;
    auto add = [&](const char* name, const Policy& d) {
        const Evaluation ev = evaluate_policy_pair(g, {d, arne.a});
        rows.push_back({name, ev.D.rho, ev.A.rho});
    };
    add("arne", arne.d);
    add("uniform", uniform_policy(g, Player::defender));
    add("cut", cut_policy(g));
    return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    out << std::setprecision(17) << "policy,rho_D,rho_A\n";
    for (const auto& r : rows) out << r.policy << "," << r.rho_D << "," << r.rho_A << "\n";
    return out.str();
}

std::vector<ComparisonRow> parse_comparison_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "policy,rho_D,rho_A") throw ParseError("comparison CSV: unexpected header");
    std::vector<ComparisonRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        ComparisonRow r;
        std::string a, b;
        if (!std::getline(ls, r.policy, ',') || !std::getline(ls, a, ',') || !std::getline(ls, b)) {
            throw ParseError("comparison CSV: bad row '" + line + "'");
        }
        try {
            r.rho_D = std::stod(a);
            r.rho_A = std::stod(b);
        } catch (const std::exception&) {
            throw ParseError("comparison CSV: bad number in '" + line + "'");
        }
        rows.push_back(r);
    }
    return rows;
}

void apply(ExperimentConfig& cfg, const Overrides& o) {
    if (o.seed) {
        cfg.train.seed = *o.seed;
        if (!cfg.graph.file) cfg.graph.synthetic.seed = *o.seed;
    }
    if (o.iterations) cfg.train.iterations = *o.iterations;
    if (o.out) cfg.out = *o.out;
}

int cmd_gen_graph(const ifg::SyntheticParams& params, const std::filesystem::path& out, std::ostream& log) {
    const ifg::Ifg g = ifg::generate_synthetic(params);
    write_file(out, ifg::dump_graph_json(g.graph(), g.surface()));
    print_counts(log, "generated", g.node_count(), g.edge_count());
    log << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_prune(const PruneArgs& args, std::ostream& log) {
    ifg::LoadedGraph loaded = ifg::load_graph(args.input);
    if (args.entries) loaded.surface.entries = *args.entries;
    if (args.destinations) loaded.surface.destinations = *args.destinations;
    ifg::PipelineReport report;
    const ifg::Ifg g = ifg::prune_pipeline(loaded, args.merge, &report);
    write_file(args.output, ifg::dump_graph_json(g.graph(), g.surface()));
    print_counts(log, "before", report.input_nodes, report.input_edges);
    print_counts(log, "after", report.output_nodes, report.output_edges);
    log << "self-loops dropped: " << report.self_loops_dropped << ", versions added: " << report.added_versions
        << "\nwrote " << args.output.string() << "\n";
    return 0;
}

int cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
    auto game = std::make_shared<const Game>(build_game(cfg));
    Environment env(game, cfg.train.seed);
    const TrainResult res = train(env, cfg.train, game.get());

    std::filesystem::create_directories(cfg.out);
    res.history.save(cfg.out / "history.csv");
    save_policy(*game, res.policies.d, cfg.out / "policy_D.json");
    save_policy(*game, res.policies.a, cfg.out / "policy_A.json");

    json manifest = json::parse(cfg.to_json());
    manifest["version"] = version_string();
    manifest["seed"] = cfg.train.seed;
    manifest["states"] = game->state_count();
    manifest["reachable_states"] = game->reachable_states().size();
    write_file(cfg.out / "manifest.json", manifest.dump(2) + "\n");

    log << "states: " << game->state_count() << " (" << game->reachable_states().size() << " reachable)\n";
    if (!res.history.rows.empty()) {
        const HistoryRow& last = res.history.rows.back();
        log << "n=" << last.n << " rho_D=" << last.rho_D << " rho_A=" << last.rho_A;
        if (last.phi_T) log << " phi_T=" << *last.phi_T;
        log << "\n";
    }
    log << "wrote " << cfg.out.string() << "\n";
    return 0;
}

int cmd_certify(const ExperimentConfig& cfg, const std::filesystem::path& policy_D,
                const std::filesystem::path& policy_A, std::ostream& log) {
    const Game game = build_game(cfg);
    const PolicyPair pi = load_pair(game, policy_D, policy_A);
    const Certificate cert = certify_arne(game, pi, cfg.tolerance);
    write_file(cfg.out / "certificate.json", cert.to_json());
    log << "gap_D=" << cert.gap_D << " gap_A=" << cert.gap_A << " min_omega=" << cert.residuals.min_omega
        << " delta=" << cert.residuals.delta << " verdict=" << (cert.verdict ? "pass" : "fail") << "\n";
    return cert.verdict ? 0 : 1;
}

int cmd_compare(const ExperimentConfig& cfg, const std::filesystem::path& policy_D,
                const std::filesystem::path& policy_A, std::ostream& log) {
    const Game game = build_game(cfg);
    const PolicyPair pi = load_pair(game, policy_D, policy_A);
    const auto rows = compare_policies(game, pi);
    const std::string csv = comparison_csv(rows);
    write_file(cfg.out / "comparison.csv", csv);
    log << csv;
    return 0;
}

} // namespace dift::exp
