#include "dift/errors.hpp"
#include "dift/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::vector<std::vector<dift::ifg::NodeId>> parse_destinations(const std::string& text) {
    try {
        return nlohmann::json::parse(text).get<std::vector<std::vector<dift::ifg::NodeId>>>();
    } catch (const nlohmann::json::exception& e) {
        throw dift::ParseError(std::string("--destinations expects JSON like [[3],[7,8]]: ") + e.what());
    }
}

dift::exp::ExperimentConfig load_config(const std::string& path, const dift::exp::Overrides& o) {
    auto cfg = dift::exp::ExperimentConfig::load(path);
    dift::exp::apply(cfg, o);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DIFT vs APT average-reward game: graph tools, RL-ARNE training and certification"};
    app.set_version_flag("--version", dift::exp::version_string());
    app.require_subcommand(1);

    dift::exp::Overrides overrides;
    std::uint64_t seed = 0;
    std::uint64_t iters = 0;
    std::string out_dir;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "override the training and synthetic-graph seed");
        sub->add_option("--iters", iters, "override the iteration count");
        sub->add_option("--out", out_dir, "override the output directory");
    };

    // gen-graph
    auto* gen = app.add_subcommand("gen-graph", "write a layered synthetic information-flow graph");
    dift::ifg::SyntheticParams syn;
    std::string gen_out = "graph.json";
    gen->add_option("--nodes", syn.nodes);
    gen->add_option("--stages", syn.stages);
    gen->add_option("--entries", syn.entries);
    gen->add_option("--dests", syn.dests_per_stage, "destinations per stage");
    gen->add_option("--density", syn.edge_density);
    gen->add_option("--seed", syn.seed);
    gen->add_option("-o,--output", gen_out);

    // prune
    auto* prune = app.add_subcommand("prune", "prune a raw graph and remove cycles by node versioning");
    dift::exp::PruneArgs prune_args;
    std::string input, output = "pruned.json";
    std::vector<dift::ifg::NodeId> entries;
    std::string destinations;
    std::vector<std::string> merges;
    prune->add_option("input", input, "raw graph JSON")->required();
    prune->add_option("-o,--output", output);
    prune->add_option("--entries", entries, "entry node ids (overrides the file)");
    prune->add_option("--destinations", destinations, "per-stage destination ids as JSON, e.g. [[3],[7]]");
    prune->add_option("--merge", merges, "PREFIX=LABEL file-directory merge group")->allow_extra_args(false);

    // train / certify / compare
    std::string config;
    auto* train = app.add_subcommand("train", "run RL-ARNE and write history and policies");
    train->add_option("config", config, "experiment JSON")->required();
    add_overrides(train);

    std::string policy_D, policy_A;
    double tol = -1.0;
    auto* certify = app.add_subcommand("certify", "certify a policy pair as an average-reward Nash equilibrium");
    certify->add_option("config", config)->required();
    certify->add_option("policy_D", policy_D)->required();
    certify->add_option("policy_A", policy_A)->required();
    certify->add_option("--tol", tol, "certification tolerance (defaults to the config value)");
    add_overrides(certify);

    auto* compare = app.add_subcommand("compare", "average rewards of ARNE, uniform and cut defenders");
    compare->add_option("config", config)->required();
    compare->add_option("policy_D", policy_D)->required();
    compare->add_option("policy_A", policy_A)->required();
    add_overrides(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    auto collect = [&](CLI::App* sub) {
        if (sub->count("--seed") > 0) overrides.seed = seed;
        if (sub->count("--iters") > 0) overrides.iterations = iters;
        if (sub->count("--out") > 0) overrides.out = out_dir;
    };

    try {
        if (gen->parsed()) return dift::exp::cmd_gen_graph(syn, gen_out, std::cout);
        if (prune->parsed()) {
            prune_args.input = input;
            prune_args.output = output;
            if (!entries.empty()) prune_args.entries = entries;
            if (!destinations.empty()) prune_args.destinations = parse_destinations(destinations);
            for (const auto& m : merges) {
                const auto eq = m.find('=');
                if (eq == std::string::npos) throw dift::ParseError("--merge expects PREFIX=LABEL");
                prune_args.merge.push_back({m.substr(0, eq), m.substr(eq + 1)});
            }
            return dift::exp::cmd_prune(prune_args, std::cout);
        }
        if (train->parsed()) {
            collect(train);
            return dift::exp::cmd_train(load_config(config, overrides), std::cout);
        }
        if (certify->parsed()) {
            collect(certify);
            auto cfg = load_config(config, overrides);
            if (tol >= 0) cfg.tolerance = tol;
            return dift::exp::cmd_certify(cfg, policy_D, policy_A, std::cout);
        }
        if (compare->parsed()) {
            collect(compare);
            return dift::exp::cmd_compare(load_config(config, overrides), policy_D, policy_A, std::cout);
        }
    } catch (const dift::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dift::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dift::IncompatibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const dift::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
