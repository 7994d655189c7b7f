#pragma once

#include "ahc/engine.hpp"
#include "ahc/synth.hpp"

#include "json.hpp"

#include <string>

namespace ahc {

// JSON run configuration. Unknown keys are rejected so typos fail loudly.
//
// {
//   "seed": 1, "budget_per_item": 5.0, "al_strategy": "uncertainty", "betas": [1, 3],
//   "scenario": "amazon-like" | "dataset": "pool.csv" | "synth": {...},
//   "seed_index": 0,
//   "engine": {"batch_pairs": 20, "votes_per_learning_label": 3, "retrain_every": 5,
//              "exploit_votes_train": true},
//   "ml": {"enabled": true, "l2_penalty": 1e-4, "learning_rate": 0.5, "epochs": 300,
//          "min_df": 2, "cv_folds": 5, "cv_beta": 3.0, "prior_blend_gate": 0.6},
//   "policy": {"kind": "fixed_switch", "learn_fraction": 0.2, ...},
//   "hc": {"tau_in": 0.99, "tau_out": 0.01, "max_votes_per_pair": 10, "prior_floor": 0.02},
//   "crowd": {"default_accuracy": 0.9, "accuracy": {"1": 0.94}, "jitter": 0.0,
//             "votes_file": "votes.csv"}
// }

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

AlStrategy al_strategy_from_string(const std::string& name);
std::string to_string(AlStrategy strategy);

SynthesisSpec parse_synthesis_spec(const nlohmann::json& node);
RunConfig parse_run_config(const nlohmann::json& doc);

struct RunSetup {
    RunConfig config;
    Dataset dataset;
};

// Loads the config and materializes its dataset (scenario, synth spec, or CSV path,
// in that precedence order; exactly one must be present).
RunSetup load_run_setup(const std::string& path);

}  // namespace ahc
