#pragma once

#include "ahc/core.hpp"
#include "ahc/crowd.hpp"
#include "ahc/hybrid.hpp"
#include "ahc/metrics.hpp"
#include "ahc/ml.hpp"
#include "ahc/policy.hpp"
#include "ahc/rng.hpp"
#include "ahc/sampling.hpp"

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

namespace ahc {

struct EngineConfig {
    int batch_pairs = 20;
    int votes_per_learning_label = 3;  // odd, so majorities are well-defined
    int retrain_every = 5;             // exploit iterations between retrains
    bool exploit_votes_train = true;   // exploitation votes also become training labels
};

struct MlConfig {
    bool enabled = true;  // off: priors fall back to selectivity estimates
    double l2_penalty = 1e-4;
    double learning_rate = 0.5;
    int epochs = 300;
    int min_df = 2;
    int cv_folds = 5;
    double cv_beta = 3.0;
    double prior_blend_gate = 0.6;  // below this CV F, priors shrink toward theta-hat
};

struct RunConfig {
    int budget = -1;  // votes; -1 derives from budget_per_item
    double budget_per_item = 5.0;
    std::uint64_t seed = 1;
    AlStrategy al_strategy = AlStrategy::Uncertainty;
    std::vector<double> betas = {1.0, 3.0};
    EngineConfig engine;
    MlConfig ml;
    PolicyConfig policy;
    DecisionThresholds thresholds;
    CrowdConfig crowd;

    void validate() const;  // throws ConfigInvalid
    int resolve_budget(int pool_size) const;
};

struct IterationTrace {
    int t = 0;
    Arm arm = Arm::Exploit;
    int votes = 0;
    int decided_total = 0;  // |CI| after the iteration
    double fbeta_cv = 0.0;  // latest pooled cross-validated estimate
    double reward = 0.0;
};

struct RunResult {
    std::vector<Decision> decisions;  // in decision order
    int spent = 0;
    double cost_per_item = 0.0;
    int iterations = 0;
    int finalized_by_ml = 0;
    std::vector<IterationTrace> trace;
    MetricBundle metrics;
};

// One screening run: iterations of choose arm, collect votes, retrain, apply
// the decision rule; then ML finalization of whatever remains.
class Engine {
public:
    Engine(const Dataset& data, const RunConfig& cfg);
    Engine(const Dataset& data, const RunConfig& cfg, std::unique_ptr<VoteSource> votes);

    // Runs one iteration; returns false once the loop has terminated (pool
    // decided, budget exhausted, or the chosen arm cannot produce a batch).
    bool step();
    void finalize();
    RunResult run_to_completion();

    const Dataset& dataset() const { return data_; }
    const PoolState& pool() const { return pool_; }
    const VoteLedger& ledger() const { return ledger_; }
    const BudgetLedger& budget() const { return budget_; }
    const PsiTable& psi_ml() const { return psi_ml_; }
    const PsiTable& priors() const { return priors_; }
    const PosteriorTable& posteriors() const { return posteriors_; }
    const std::vector<double>& cv_fbeta() const { return cv_f_; }
    const std::vector<AccuracyHistory>& accuracy_history() const { return accuracy_history_; }
    const std::vector<double>& pooled_cv() const { return pooled_cv_; }
    const std::vector<double>& selectivity_estimates() const { return theta_hat_; }
    const std::vector<double>& accuracies() const { return accuracy_; }
    const PolicyState& policy() const { return policy_; }
    const std::vector<PredicateClassifier>& classifiers() const { return classifiers_; }
    int iteration() const { return t_; }
    int training_labels() const { return train_label_count_; }

    // Called after every completed iteration; used by invariant checks.
    std::function<void(const Engine&)> on_iteration;

    struct LabelStats {
        std::unordered_map<int, int> labels;  // item position -> 0/1
        int positives = 0;
    };

private:
    void init();
    IterationContext make_context() const;
    BatchInputs batch_inputs() const;
    std::vector<int> undecided_positions() const;
    PairCounts eligible_counts(int item_id, int predicate_id) const;
    void refresh_pair_labels(int item_id, int predicate_id);
    std::vector<PairRequest> learning_requests();
    std::vector<PairRequest> exploitation_requests();
    void retrain(bool with_cv);
    void reseed_priors();
    void apply_decisions();

    const Dataset& data_;
    RunConfig cfg_;
    int n_items_ = 0;
    int n_preds_ = 0;

    std::unique_ptr<VoteSource> votes_;
    PoolState pool_;
    VoteLedger ledger_;
    BudgetLedger budget_;
    PolicyState policy_;
    PredicateRotation rotation_;
    Rng sampling_rng_;
    Rng policy_rng_;
    std::uint64_t cv_seed_base_ = 0;

    Vocabulary vocab_;
    std::vector<FeatureVector> features_;  // per item position
    std::vector<PredicateClassifier> classifiers_;
    std::vector<double> cv_f_;        // latest CV estimate per predicate
    std::vector<AccuracyHistory> accuracy_history_;
    std::vector<double> pooled_cv_;   // mean CV estimate per learning retrain

    std::vector<double> accuracy_;    // assumed crowd accuracy per predicate
    std::vector<double> theta_hat_;
    std::vector<LabelStats> train_labels_;  // per predicate, training signal
    std::vector<LabelStats> all_labels_;    // per predicate, for theta-hat
    std::vector<bool> train_dirty_;         // label set changed since last retrain
    int train_label_count_ = 0;

    PsiTable psi_ml_;      // raw classifier predictions
    PsiTable priors_;      // blended and floored posterior seeds
    PosteriorTable posteriors_;

    int t_ = 1;
    int exploit_since_retrain_ = 0;
    int retrains_ = 0;
    bool terminated_ = false;
    bool finalized_ = false;
    int finalized_by_ml_ = 0;
    std::vector<IterationTrace> trace_;
};

RunResult run(const Dataset& data, const RunConfig& cfg);
RunResult run(const Dataset& data, const RunConfig& cfg, std::unique_ptr<VoteSource> votes);

}  // namespace ahc
