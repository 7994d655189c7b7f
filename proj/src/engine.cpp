#include "ahc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ahc {

void RunConfig::validate() const {
    if (budget < -1) throw ConfigInvalid("budget must be -1 (per-item) or non-negative");
    if (budget == -1 && budget_per_item < 0.0) {
        throw ConfigInvalid("budget_per_item must be non-negative");
    }
    if (engine.batch_pairs < 1) throw ConfigInvalid("engine.batch_pairs must be at least 1");
    if (engine.votes_per_learning_label < 1 || engine.votes_per_learning_label % 2 == 0) {
        throw ConfigInvalid("engine.votes_per_learning_label must be odd and positive");
    }
    if (engine.retrain_every < 1) throw ConfigInvalid("engine.retrain_every must be at least 1");
    if (ml.epochs < 1) throw ConfigInvalid("ml.epochs must be at least 1");
    if (ml.min_df < 1) throw ConfigInvalid("ml.min_df must be at least 1");
    if (ml.cv_folds < 2) throw ConfigInvalid("ml.cv_folds must be at least 2");
    if (ml.learning_rate <= 0.0) throw ConfigInvalid("ml.learning_rate must be positive");
    if (ml.l2_penalty < 0.0) throw ConfigInvalid("ml.l2_penalty must be non-negative");
    if (!thresholds.valid()) {
        throw ConfigInvalid("thresholds must satisfy 0 < tau_out < 0.5 < tau_in < 1");
    }
    if (betas.empty()) throw ConfigInvalid("betas must be non-empty");
    for (double b : betas) {
        if (b <= 0.0) throw ConfigInvalid("betas must be positive");
    }
    if (crowd.default_accuracy <= 0.0 || crowd.default_accuracy > 1.0) {
        throw ConfigInvalid("crowd.default_accuracy must be in (0,1]");
    }
    for (const auto& [pid, a] : crowd.accuracy) {
        if (a <= 0.0 || a > 1.0) {
            throw ConfigInvalid("crowd.accuracy." + std::to_string(pid) + " must be in (0,1]");
        }
    }
    if (crowd.jitter < 0.0) throw ConfigInvalid("crowd.jitter must be non-negative");
    policy.validate();
}

int RunConfig::resolve_budget(int pool_size) const {
    if (budget >= 0) return budget;
    return static_cast<int>(std::lround(budget_per_item * pool_size));
}

namespace {

std::unique_ptr<VoteSource> make_vote_source(const Dataset& data, const RunConfig& cfg) {
    if (!cfg.crowd.votes_file.empty()) {
        return std::make_unique<ReplayCrowd>(load_votes_csv(cfg.crowd.votes_file));
    }
    return std::make_unique<SimulatedCrowd>(&data, cfg.crowd, mix_seed(cfg.seed, 1));
}

std::vector<int> item_ids(const Dataset& data) {
    std::vector<int> ids;
    ids.reserve(data.items.size());
    for (const Item& it : data.items) ids.push_back(it.id);
    return ids;
}

}  // namespace

Engine::Engine(const Dataset& data, const RunConfig& cfg)
    : Engine(data, cfg, make_vote_source(data, cfg)) {}

Engine::Engine(const Dataset& data, const RunConfig& cfg, std::unique_ptr<VoteSource> votes)
    : data_(data),
      cfg_(cfg),
      votes_(std::move(votes)),
      pool_(item_ids(data)),
      policy_(cfg.policy),
      sampling_rng_(mix_seed(cfg.seed, 2)),
      policy_rng_(mix_seed(cfg.seed, 3)),
      cv_seed_base_(mix_seed(cfg.seed, 4)) {
    cfg_.validate();
    init();
}

void Engine::init() {
    n_items_ = static_cast<int>(data_.items.size());
    n_preds_ = static_cast<int>(data_.predicates.size());
    if (n_preds_ == 0) throw ConfigInvalid("dataset has no predicates");
    if (n_items_ > 0 && data_.index_of(data_.items[0].id) < 0) {
        throw std::logic_error("dataset index not built; call rebuild_index()");
    }
    budget_.total = cfg_.resolve_budget(n_items_);

    accuracy_.resize(n_preds_);
    std::unordered_map<int, double> calibrated;
    if (!cfg_.crowd.votes_file.empty()) {
        calibrated = calibrate_accuracy(load_votes_csv(cfg_.crowd.votes_file), data_,
                                        cfg_.crowd.default_accuracy);
    }
    for (int p = 0; p < n_preds_; ++p) {
        const int pid = data_.predicates[static_cast<std::size_t>(p)].id;
        if (!cfg_.crowd.accuracy.count(pid) && calibrated.count(pid)) {
            accuracy_[p] = calibrated[pid];
        } else {
            accuracy_[p] = accuracy_for(cfg_.crowd, pid);
        }
    }

    theta_hat_.assign(n_preds_, 0.5);
    cv_f_.assign(n_preds_, 0.0);
    accuracy_history_.resize(n_preds_);
    train_labels_.resize(n_preds_);
    all_labels_.resize(n_preds_);
    train_dirty_.assign(n_preds_, false);
    classifiers_.resize(n_preds_);
    for (int p = 0; p < n_preds_; ++p) {
        classifiers_[p].predicate_id = data_.predicates[static_cast<std::size_t>(p)].id;
    }

    if (cfg_.ml.enabled && n_items_ > 0) {
        std::vector<std::vector<std::string>> docs;
        docs.reserve(data_.items.size());
        for (const Item& it : data_.items) {
            docs.push_back(it.tokens.empty() ? tokenize(it.text) : it.tokens);
        }
        vocab_ = build_vocabulary(docs, cfg_.ml.min_df);
        features_.reserve(docs.size());
        for (const auto& doc : docs) features_.push_back(vectorize(doc, vocab_));
    }

    psi_ml_ = PsiTable(n_items_, n_preds_, 0.5);
    priors_ = PsiTable(n_items_, n_preds_, 0.5);
    reseed_priors();
    posteriors_ = compute_posteriors(priors_, ledger_, data_, accuracy_);
}

std::vector<int> Engine::undecided_positions() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(pool_.undecided_count()));
    for (int id : pool_.undecided_ids()) out.push_back(data_.index_of(id));
    return out;
}

BatchInputs Engine::batch_inputs() const {
    return BatchInputs{&data_, &posteriors_, &ledger_, theta_hat_, accuracy_, cfg_.thresholds};
}

IterationContext Engine::make_context() const {
    IterationContext ctx;
    ctx.t = t_;
    ctx.spent = budget_.spent;
    ctx.budget = budget_.total;
    ctx.ci_size = pool_.decided_count();
    ctx.ui_size = pool_.undecided_count();
    ctx.labels_collected = train_label_count_;
    const std::vector<int> ui = undecided_positions();
    ctx.expected_remaining_cost = expected_remaining_cost(batch_inputs(), ui);
    ctx.fbeta_history = &pooled_cv_;
    ctx.psi_ml = &psi_ml_;
    ctx.psi_hc = &posteriors_.prob;
    return ctx;
}

PairCounts Engine::eligible_counts(int item_id, int predicate_id) const {
    return cfg_.engine.exploit_votes_train ? ledger_.counts(item_id, predicate_id)
                                           : ledger_.learning_counts(item_id, predicate_id);
}

namespace {

// Returns true when the stored label for the pair changed. total_delta tracks
// the labeled-pair count.
bool apply_label(Engine::LabelStats& s, int item_pos, MajorityLabel m, int& total_delta) {
    auto it = s.labels.find(item_pos);
    if (m == MajorityLabel::Abstain) {
        if (it == s.labels.end()) return false;
        s.positives -= it->second;
        s.labels.erase(it);
        --total_delta;
        return true;
    }
    const int y = m == MajorityLabel::Yes ? 1 : 0;
    if (it == s.labels.end()) {
        s.labels.emplace(item_pos, y);
        s.positives += y;
        ++total_delta;
        return true;
    }
    if (it->second == y) return false;
    s.positives += y - it->second;
    it->second = y;
    return true;
}

}  // namespace

void Engine::refresh_pair_labels(int item_id, int predicate_id) {
    const int item_pos = data_.index_of(item_id);
    const int p = data_.predicate_index(predicate_id);
    int ignored = 0;
    apply_label(all_labels_[static_cast<std::size_t>(p)], item_pos,
                majority_label(ledger_.counts(item_id, predicate_id)), ignored);
    theta_hat_[static_cast<std::size_t>(p)] = estimate_selectivity(
        all_labels_[static_cast<std::size_t>(p)].positives,
        static_cast<int>(all_labels_[static_cast<std::size_t>(p)].labels.size()));
    if (apply_label(train_labels_[static_cast<std::size_t>(p)], item_pos,
                    majority_label(eligible_counts(item_id, predicate_id)), train_label_count_)) {
        train_dirty_[static_cast<std::size_t>(p)] = true;
    }
}

std::vector<PairRequest> Engine::learning_requests() {
    LearningCandidates cand;
    cand.per_predicate.resize(static_cast<std::size_t>(n_preds_));
    for (int item_pos : undecided_positions()) {
        const int id = data_.items[static_cast<std::size_t>(item_pos)].id;
        for (int p = 0; p < n_preds_; ++p) {
            if (train_labels_[static_cast<std::size_t>(p)].labels.count(item_pos)) continue;
            cand.per_predicate[static_cast<std::size_t>(p)].push_back(
                {id, psi_ml_.at(item_pos, p)});
        }
    }
    const std::vector<LearningPair> batch = select_learning_batch(
        cfg_.al_strategy, cand, cfg_.engine.batch_pairs, rotation_, sampling_rng_);
    std::vector<PairRequest> reqs;
    int remaining = budget_.remaining();
    for (const LearningPair& pair : batch) {
        if (remaining <= 0) break;
        const int votes = std::min(cfg_.engine.votes_per_learning_label, remaining);
        reqs.push_back({pair.item_id,
                        data_.predicates[static_cast<std::size_t>(pair.predicate_pos)].id, votes});
        remaining -= votes;
    }
    return reqs;
}

std::vector<PairRequest> Engine::exploitation_requests() {
    const std::vector<int> ui = undecided_positions();
    const std::vector<ClassificationPair> batch =
        select_classification_batch(batch_inputs(), ui, cfg_.engine.batch_pairs);
    const std::size_t take =
        std::min<std::size_t>(batch.size(), static_cast<std::size_t>(budget_.remaining()));
    std::vector<PairRequest> reqs;
    reqs.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        reqs.push_back({data_.items[static_cast<std::size_t>(batch[i].item_pos)].id,
                        data_.predicates[static_cast<std::size_t>(batch[i].pred_pos)].id, 1});
    }
    return reqs;
}

void Engine::retrain(bool with_cv) {
    if (!cfg_.ml.enabled) return;
    TrainOptions opt;
    opt.l2_penalty = cfg_.ml.l2_penalty;
    opt.learning_rate = cfg_.ml.learning_rate;
    opt.epochs = cfg_.ml.epochs;
    bool fresh_cv = false;
    for (int p = 0; p < n_preds_; ++p) {
        if (!train_dirty_[static_cast<std::size_t>(p)]) continue;
        train_dirty_[static_cast<std::size_t>(p)] = false;
        std::vector<std::pair<int, int>> rows(
            train_labels_[static_cast<std::size_t>(p)].labels.begin(),
            train_labels_[static_cast<std::size_t>(p)].labels.end());
        std::sort(rows.begin(), rows.end());
        ExampleSet examples;
        examples.reserve(rows.size());
        for (const auto& [pos, y] : rows) {
            examples.push_back({&features_[static_cast<std::size_t>(pos)], y});
        }
        classifiers_[static_cast<std::size_t>(p)] =
            train_classifier(data_.predicates[static_cast<std::size_t>(p)].id, examples,
                             vocab_.size(), opt);
        for (int i = 0; i < n_items_; ++i) {
            psi_ml_.at(i, p) =
                classifiers_[static_cast<std::size_t>(p)].predict(features_[static_cast<std::size_t>(i)]);
        }
        ++retrains_;
        if (!with_cv) continue;
        CvOptions cv;
        cv.folds = cfg_.ml.cv_folds;
        cv.beta = cfg_.ml.cv_beta;
        cv.seed = mix_seed(cv_seed_base_, static_cast<std::uint64_t>(retrains_));
        cv.train = opt;
        const CvResult res = cross_validated_fbeta(examples, vocab_.size(), cv);
        if (res.insufficient) continue;
        cv_f_[static_cast<std::size_t>(p)] = res.fbeta;
        fresh_cv = true;
        auto& history = accuracy_history_[static_cast<std::size_t>(p)];
        const int n_labels = static_cast<int>(examples.size());
        if (history.points.empty() || n_labels > history.points.back().labels) {
            history.add(n_labels, res.fbeta);
        }
    }
    if (fresh_cv) {
        pooled_cv_.push_back(std::accumulate(cv_f_.begin(), cv_f_.end(), 0.0) / n_preds_);
    }
}

void Engine::reseed_priors() {
    for (int p = 0; p < n_preds_; ++p) {
        const bool raw = cfg_.ml.enabled && cv_f_[static_cast<std::size_t>(p)] >= cfg_.ml.prior_blend_gate;
        const double theta = theta_hat_[static_cast<std::size_t>(p)];
        const double floor = cfg_.thresholds.prior_floor;
        for (int i = 0; i < n_items_; ++i) {
            const double psi = psi_ml_.at(i, p);
            const double prior = raw ? psi : 0.5 * psi + 0.5 * theta;
            priors_.at(i, p) = std::clamp(prior, floor, 1.0 - floor);
        }
    }
}

void Engine::apply_decisions() {
    posteriors_ = compute_posteriors(priors_, ledger_, data_, accuracy_);
    std::vector<double> row(static_cast<std::size_t>(n_preds_));
    for (int item_pos : undecided_positions()) {
        for (int p = 0; p < n_preds_; ++p) row[static_cast<std::size_t>(p)] = posteriors_.prob.at(item_pos, p);
        const Verdict v =
            apply_decision_rule(row, posteriors_.inclusion[static_cast<std::size_t>(item_pos)],
                                cfg_.thresholds);
        if (v != Verdict::Undecided) {
            pool_.decide(data_.items[static_cast<std::size_t>(item_pos)].id, v,
                         DecisionSource::Hybrid, t_);
        }
    }
}

bool Engine::step() {
    if (terminated_ || finalized_) return false;
    if (pool_.undecided_count() == 0 || budget_.remaining() <= 0) {
        terminated_ = true;
        return false;
    }

    const IterationContext ctx = make_context();
    const double cost_before = ctx.expected_remaining_cost;
    Arm arm = policy_.choose_arm(ctx, policy_rng_);

    // An empty affordable batch from the chosen arm ends the loop; remaining
    // items are settled by ML finalization.
    const std::vector<PairRequest> reqs =
        arm == Arm::Learn ? learning_requests() : exploitation_requests();
    if (reqs.empty()) {
        terminated_ = true;
        return false;
    }

    const VotePurpose purpose =
        arm == Arm::Learn ? VotePurpose::Learning : VotePurpose::Exploitation;
    const std::vector<Vote> votes = votes_->request(reqs, t_, purpose);
    record_votes(ledger_, budget_, votes);
    for (const PairRequest& r : reqs) refresh_pair_labels(r.item_id, r.predicate_id);

    if (arm == Arm::Learn) {
        retrain(/*with_cv=*/true);
        exploit_since_retrain_ = 0;
    } else if (++exploit_since_retrain_ >= cfg_.engine.retrain_every) {
        retrain(/*with_cv=*/false);
        exploit_since_retrain_ = 0;
    }

    reseed_priors();
    apply_decisions();

    const double cost_after = expected_remaining_cost(batch_inputs(), undecided_positions());
    const RewardEstimate reward =
        estimate_reward(cost_before, cost_after, static_cast<int>(votes.size()));
    policy_.observe_reward(arm, reward);

    trace_.push_back({t_, arm, static_cast<int>(votes.size()), pool_.decided_count(),
                      pooled_cv_.empty() ? 0.0 : pooled_cv_.back(), reward.value});
    ++t_;
    if (on_iteration) on_iteration(*this);
    return true;
}

void Engine::finalize() {
    if (finalized_) return;
    terminated_ = true;
    const std::vector<Decision> decisions =
        finalize_with_ml(undecided_positions(), psi_ml_, data_, t_);
    for (const Decision& d : decisions) pool_.decide(d.item_id, d.verdict, d.source, d.iteration);
    finalized_by_ml_ = static_cast<int>(decisions.size());
    finalized_ = true;
}

RunResult Engine::run_to_completion() {
    while (step()) {
    }
    finalize();
    RunResult r;
    r.decisions = pool_.decision_log();
    r.spent = budget_.spent;
    r.cost_per_item = n_items_ > 0 ? static_cast<double>(budget_.spent) / n_items_ : 0.0;
    r.iterations = t_ - 1;
    r.finalized_by_ml = finalized_by_ml_;
    r.trace = trace_;
    r.metrics = compute_metrics(r.decisions, data_, cfg_.betas);
    r.metrics.cost_per_item = r.cost_per_item;
    return r;
}

RunResult run(const Dataset& data, const RunConfig& cfg) {
    Engine engine(data, cfg);
    return engine.run_to_completion();
}

RunResult run(const Dataset& data, const RunConfig& cfg, std::unique_ptr<VoteSource> votes) {
    Engine engine(data, cfg, std::move(votes));
    return engine.run_to_completion();
}

}  // namespace ahc
