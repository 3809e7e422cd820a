#include "dift/errors.hpp"
#include "dift/game.hpp"

#include <json.hpp>

namespace dift {

using nlohmann::json;

namespace {

json parse_doc(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("parameter JSON: ") + e.what());
    }
}

std::map<StateId, double> per_state_map(const json& obj, const char* what) {
    std::map<StateId, double> out;
    if (!obj.is_object()) throw ParseError(std::string(what) + " must map state ids to numbers");
    for (const auto& [k, v] : obj.items()) {
        try {
            out[static_cast<StateId>(std::stol(k))] = v.get<double>();
        } catch (const std::exception&) {
            throw ParseError(std::string(what) + ": bad entry '" + k + "'");
        }
    }
    return out;
}

} // namespace

RewardParams parse_reward_params(const std::string& json_text) {
    const json doc = parse_doc(json_text);
    if (!doc.is_object()) throw ParseError("parameter JSON must be an object");
    const int stages = doc.value("stages", 3);
    RewardParams p = RewardParams::reference(stages);
    try {
        auto read = [&doc](const char* key, std::vector<double>& dst) {
            if (doc.contains(key)) dst = doc.at(key).get<std::vector<double>>();
        };
        read("alpha_D", p.alpha_D);
        read("beta_D", p.beta_D);
        read("sigma_D", p.sigma_D);
        read("alpha_A", p.alpha_A);
        read("beta_A", p.beta_A);
        read("sigma_A", p.sigma_A);
        if (doc.contains("cost_D")) {
            const json& c = doc.at("cost_D");
            if (c.contains("default_per_stage")) p.cost_D_per_stage = c.at("default_per_stage").get<std::vector<double>>();
            if (c.contains("per_state")) p.cost_D_per_state = per_state_map(c.at("per_state"), "cost_D.per_state");
        }
        p.strict_table = doc.value("strict_table", true);
    } catch (const json::exception& e) {
        throw ParseError(std::string("parameter JSON: ") + e.what());
    }
    p.validate();
    return p;
}

FnRates parse_fn_rates(const std::string& json_text) {
    const json doc = parse_doc(json_text);
    FnRates fn;
    if (!doc.is_object() || !doc.contains("fn")) return fn;
    const json& f = doc.at("fn");
    try {
        if (f.is_number()) {
            fn.default_rate = f.get<double>();
        } else {
            fn.default_rate = f.value("default", 0.2);
            if (f.contains("per_state")) fn.per_state = per_state_map(f.at("per_state"), "fn.per_state");
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("fn JSON: ") + e.what());
    }
    fn.validate();
    return fn;
}

std::string dump_reward_params(const RewardParams& p) {
    json doc{{"stages", p.stages},
             {"alpha_D", p.alpha_D},
             {"beta_D", p.beta_D},
             {"sigma_D", p.sigma_D},
             {"alpha_A", p.alpha_A},
             {"beta_A", p.beta_A},
             {"sigma_A", p.sigma_A},
             {"strict_table", p.strict_table}};
    json cost{{"default_per_stage", p.cost_D_per_stage}};
    if (!p.cost_D_per_state.empty()) {
        json m = json::object();
        for (const auto& [s, c] : p.cost_D_per_state) m[std::to_string(s)] = c;
        cost["per_state"] = m;
    }
    doc["cost_D"] = cost;
    return doc.dump(2);
}

} // namespace dift
