#include "ahc/config.hpp"

#include "ahc/dataset_io.hpp"
#include "ahc/experiment.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

namespace ahc {

namespace {

using nlohmann::json;

void require_keys(const json& node, const char* section,
                  std::initializer_list<std::string_view> allowed) {
    if (!node.is_object()) {
        throw ConfigInvalid(std::string(section) + " must be a JSON object");
    }
    for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (std::string_view k : allowed) {
            if (key == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigInvalid("unknown key '" + key + "' in " + section);
        }
    }
}

double get_double(const json& node, const char* key, double fallback) {
    if (!node.contains(key)) return fallback;
    const json& v = node.at(key);
    if (!v.is_number()) throw ConfigInvalid(std::string(key) + " must be a number");
    return v.get<double>();
}

int get_int(const json& node, const char* key, int fallback) {
    if (!node.contains(key)) return fallback;
    const json& v = node.at(key);
    if (!v.is_number_integer()) throw ConfigInvalid(std::string(key) + " must be an integer");
    return v.get<int>();
}

bool get_bool(const json& node, const char* key, bool fallback) {
    if (!node.contains(key)) return fallback;
    const json& v = node.at(key);
    if (!v.is_boolean()) throw ConfigInvalid(std::string(key) + " must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& node, const char* key, const std::string& fallback) {
    if (!node.contains(key)) return fallback;
    const json& v = node.at(key);
    if (!v.is_string()) throw ConfigInvalid(std::string(key) + " must be a string");
    return v.get<std::string>();
}

void parse_engine(const json& node, EngineConfig& cfg) {
    require_keys(node, "engine",
                 {"batch_pairs", "votes_per_learning_label", "retrain_every",
                  "exploit_votes_train"});
    cfg.batch_pairs = get_int(node, "batch_pairs", cfg.batch_pairs);
    cfg.votes_per_learning_label =
        get_int(node, "votes_per_learning_label", cfg.votes_per_learning_label);
    cfg.retrain_every = get_int(node, "retrain_every", cfg.retrain_every);
    cfg.exploit_votes_train = get_bool(node, "exploit_votes_train", cfg.exploit_votes_train);
}

void parse_ml(const json& node, MlConfig& cfg) {
    require_keys(node, "ml",
                 {"enabled", "l2_penalty", "learning_rate", "epochs", "min_df", "cv_folds",
                  "cv_beta", "prior_blend_gate"});
    cfg.enabled = get_bool(node, "enabled", cfg.enabled);
    cfg.l2_penalty = get_double(node, "l2_penalty", cfg.l2_penalty);
    cfg.learning_rate = get_double(node, "learning_rate", cfg.learning_rate);
    cfg.epochs = get_int(node, "epochs", cfg.epochs);
    cfg.min_df = get_int(node, "min_df", cfg.min_df);
    cfg.cv_folds = get_int(node, "cv_folds", cfg.cv_folds);
    cfg.cv_beta = get_double(node, "cv_beta", cfg.cv_beta);
    cfg.prior_blend_gate = get_double(node, "prior_blend_gate", cfg.prior_blend_gate);
}

void parse_policy(const json& node, PolicyConfig& cfg) {
    require_keys(node, "policy",
                 {"kind", "baseline_arm", "learn_fraction", "p_learn", "epsilon",
                  "warmup_labels", "window", "soft_adaptive", "steepness", "gamma_x",
                  "importance_weighting"});
    if (node.contains("kind")) {
        cfg.kind = policy_kind_from_string(get_string(node, "kind", ""));
    }
    if (node.contains("baseline_arm")) {
        const std::string arm = get_string(node, "baseline_arm", "");
        if (arm == "learn") {
            cfg.baseline_arm = Arm::Learn;
        } else if (arm == "exploit") {
            cfg.baseline_arm = Arm::Exploit;
        } else {
            throw ConfigInvalid("baseline_arm must be 'learn' or 'exploit'");
        }
    }
    cfg.learn_fraction = get_double(node, "learn_fraction", cfg.learn_fraction);
    cfg.p_learn = get_double(node, "p_learn", cfg.p_learn);
    cfg.epsilon = get_double(node, "epsilon", cfg.epsilon);
    cfg.warmup_labels = get_int(node, "warmup_labels", cfg.warmup_labels);
    cfg.window = get_int(node, "window", cfg.window);
    cfg.soft_adaptive = get_bool(node, "soft_adaptive", cfg.soft_adaptive);
    cfg.steepness = get_double(node, "steepness", cfg.steepness);
    cfg.gamma_x = get_double(node, "gamma_x", cfg.gamma_x);
    cfg.importance_weighting = get_bool(node, "importance_weighting", cfg.importance_weighting);
}

void parse_thresholds(const json& node, DecisionThresholds& cfg) {
    require_keys(node, "hc", {"tau_in", "tau_out", "max_votes_per_pair", "prior_floor"});
    cfg.tau_in = get_double(node, "tau_in", cfg.tau_in);
    cfg.tau_out = get_double(node, "tau_out", cfg.tau_out);
    cfg.max_votes_per_pair = get_int(node, "max_votes_per_pair", cfg.max_votes_per_pair);
    cfg.prior_floor = get_double(node, "prior_floor", cfg.prior_floor);
}

void parse_crowd(const json& node, CrowdConfig& cfg) {
    require_keys(node, "crowd", {"default_accuracy", "accuracy", "jitter", "votes_file"});
    cfg.default_accuracy = get_double(node, "default_accuracy", cfg.default_accuracy);
    cfg.jitter = get_double(node, "jitter", cfg.jitter);
    cfg.votes_file = get_string(node, "votes_file", cfg.votes_file);
    if (node.contains("accuracy")) {
        const json& acc = node.at("accuracy");
        if (!acc.is_object()) throw ConfigInvalid("crowd.accuracy must map predicate id to accuracy");
        for (const auto& [key, value] : acc.items()) {
            int pid = 0;
            try {
                std::size_t pos = 0;
                pid = std::stoi(key, &pos);
                if (pos != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ConfigInvalid("crowd.accuracy key '" + key + "' is not a predicate id");
            }
            if (!value.is_number()) throw ConfigInvalid("crowd.accuracy values must be numbers");
            cfg.accuracy[pid] = value.get<double>();
        }
    }
}

}  // namespace

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "baseline") return PolicyKind::Baseline;
    if (name == "fixed_switch") return PolicyKind::FixedSwitch;
    if (name == "stochastic") return PolicyKind::Stochastic;
    if (name == "adaptive") return PolicyKind::Adaptive;
    if (name == "exp3") return PolicyKind::Exp3;
    throw ConfigInvalid("unknown policy kind '" + name + "'");
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Baseline: return "baseline";
        case PolicyKind::FixedSwitch: return "fixed_switch";
        case PolicyKind::Stochastic: return "stochastic";
        case PolicyKind::Adaptive: return "adaptive";
        case PolicyKind::Exp3: return "exp3";
    }
    return "unknown";
}

AlStrategy al_strategy_from_string(const std::string& name) {
    if (name == "uncertainty") return AlStrategy::Uncertainty;
    if (name == "random") return AlStrategy::Random;
    throw ConfigInvalid("unknown al_strategy '" + name + "'");
}

std::string to_string(AlStrategy strategy) {
    switch (strategy) {
        case AlStrategy::Uncertainty: return "uncertainty";
        case AlStrategy::Random: return "random";
    }
    return "unknown";
}

SynthesisSpec parse_synthesis_spec(const nlohmann::json& node) {
    require_keys(node, "synth",
                 {"pool_size", "selectivity", "noise", "signal_tokens_per_predicate",
                  "signal_vocab_per_predicate", "background_tokens_per_item",
                  "background_tokens_jitter", "background_vocab", "signal_token_skew",
                  "signal_reliability_min", "signal_reliability_max", "seed"});
    SynthesisSpec spec;
    spec.pool_size = get_int(node, "pool_size", spec.pool_size);
    auto get_doubles = [&node](const char* key, std::vector<double>& out) {
        if (!node.contains(key)) return;
        const json& v = node.at(key);
        if (!v.is_array()) throw ConfigInvalid(std::string("synth.") + key + " must be an array");
        out = v.get<std::vector<double>>();
    };
    get_doubles("selectivity", spec.selectivity);
    get_doubles("noise", spec.noise);
    get_doubles("signal_reliability_min", spec.signal_reliability_min);
    get_doubles("signal_reliability_max", spec.signal_reliability_max);
    spec.signal_tokens_per_predicate =
        get_int(node, "signal_tokens_per_predicate", spec.signal_tokens_per_predicate);
    spec.signal_vocab_per_predicate =
        get_int(node, "signal_vocab_per_predicate", spec.signal_vocab_per_predicate);
    spec.background_tokens_per_item =
        get_int(node, "background_tokens_per_item", spec.background_tokens_per_item);
    spec.background_tokens_jitter =
        get_int(node, "background_tokens_jitter", spec.background_tokens_jitter);
    spec.background_vocab = get_int(node, "background_vocab", spec.background_vocab);
    spec.signal_token_skew = get_double(node, "signal_token_skew", spec.signal_token_skew);
    if (node.contains("seed")) {
        spec.seed = node.at("seed").get<std::uint64_t>();
    }
    return spec;
}

RunConfig parse_run_config(const nlohmann::json& doc) {
    require_keys(doc, "config",
                 {"seed", "budget", "budget_per_item", "al_strategy", "betas", "scenario",
                  "seed_index", "dataset", "synth", "engine", "ml", "policy", "hc", "crowd"});
    RunConfig cfg;
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("budget")) cfg.budget = get_int(doc, "budget", cfg.budget);
    cfg.budget_per_item = get_double(doc, "budget_per_item", cfg.budget_per_item);
    if (doc.contains("al_strategy")) {
        cfg.al_strategy = al_strategy_from_string(get_string(doc, "al_strategy", ""));
    }
    if (doc.contains("betas")) {
        const json& betas = doc.at("betas");
        if (!betas.is_array() || betas.empty()) {
            throw ConfigInvalid("betas must be a non-empty array");
        }
        cfg.betas = betas.get<std::vector<double>>();
    }
    if (doc.contains("engine")) parse_engine(doc.at("engine"), cfg.engine);
    if (doc.contains("ml")) parse_ml(doc.at("ml"), cfg.ml);
    if (doc.contains("policy")) parse_policy(doc.at("policy"), cfg.policy);
    if (doc.contains("hc")) parse_thresholds(doc.at("hc"), cfg.thresholds);
    if (doc.contains("crowd")) parse_crowd(doc.at("crowd"), cfg.crowd);
    cfg.validate();
    return cfg;
}

RunSetup load_run_setup(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }

    RunSetup setup;
    setup.config = parse_run_config(doc);

    const bool has_scenario = doc.contains("scenario");
    const bool has_synth = doc.contains("synth");
    const bool has_dataset = doc.contains("dataset");
    if (static_cast<int>(has_scenario) + static_cast<int>(has_synth) +
            static_cast<int>(has_dataset) !=
        1) {
        throw ConfigInvalid("config needs exactly one of scenario, synth, or dataset");
    }

    if (has_scenario) {
        const ScenarioSpec scenario = scenario_by_name(doc.at("scenario").get<std::string>());
        const int seed_index = get_int(doc, "seed_index", 0);
        setup.dataset = scenario_dataset(scenario, seed_index);
        const std::vector<double> accs = scenario_accuracies(scenario, seed_index);
        for (std::size_t p = 0; p < setup.dataset.predicates.size(); ++p) {
            const int pid = setup.dataset.predicates[p].id;
            if (!setup.config.crowd.accuracy.count(pid)) {
                setup.config.crowd.accuracy[pid] = accs[p];
            }
        }
    } else if (has_synth) {
        setup.dataset = synthesize_dataset(parse_synthesis_spec(doc.at("synth")));
    } else {
        setup.dataset = load_dataset_csv(doc.at("dataset").get<std::string>());
    }
    return setup;
}

}  // namespace ahc
