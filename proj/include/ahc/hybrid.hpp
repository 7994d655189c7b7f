#pragma once

#include "ahc/core.hpp"

#include <span>
#include <vector>

namespace ahc {

struct DecisionThresholds {
    double tau_in = 0.99;
    double tau_out = 0.01;       // applied per predicate and to the conjunction
    int max_votes_per_pair = 10;
    double prior_floor = 0.05;   // posterior seeds are clamped into [floor, 1-floor]

    bool valid() const {
        return tau_out > 0.0 && tau_out < 0.5 && 0.5 < tau_in && tau_in < 1.0 &&
               max_votes_per_pair >= 1 && prior_floor >= 0.0 && prior_floor < 0.5;
    }
};

// Odds-form Bayes over conditionally independent votes: posterior odds =
// prior odds * (a/(1-a))^(yes - no). Priors of exactly 0 or 1 are absorbing.
double predicate_posterior(double prior, const PairCounts& votes, double accuracy);

// Conjunction under predicate independence: product of posteriors.
double inclusion_probability(std::span<const double> posteriors);

// Out beats In: any posterior or the inclusion strictly below tau_out is Out,
// inclusion strictly above tau_in is In, anything else stays Undecided.
Verdict apply_decision_rule(std::span<const double> posteriors, double inclusion,
                            const DecisionThresholds& th);

// Dense posterior snapshot; rows of decided items are stale and ignored.
struct PosteriorTable {
    PsiTable prob;
    std::vector<double> inclusion;  // per item position
};

// Recomputes every (item, predicate) posterior from the seeded priors and the
// vote ledger. priors and accuracy are indexed by predicate position.
PosteriorTable compute_posteriors(const PsiTable& priors, const VoteLedger& ledger,
                                  const Dataset& data, std::span<const double> accuracy);

struct ClassificationPair {
    int item_pos = 0;
    int pred_pos = 0;
};

struct BatchInputs {
    const Dataset* data = nullptr;
    const PosteriorTable* posteriors = nullptr;
    const VoteLedger* ledger = nullptr;
    std::span<const double> selectivity;  // theta-hat per predicate position
    std::span<const double> accuracy;     // clamped, per predicate position
    DecisionThresholds thresholds;
};

// Expected votes for pair (i,p) to push some probability across a decision
// threshold: log-odds distance to the nearest of {pair -> tau_out,
// inclusion -> tau_in, inclusion -> tau_out} divided by ln(a/(1-a)).
double expected_votes_to_decision(const BatchInputs& in, int item_pos, int pred_pos);

// The n cheapest eligible pairs (vote count below the cap, item undecided),
// ranked by expected votes, then predicate priority (1-theta)(a-0.5)
// descending, then item id.
std::vector<ClassificationPair> select_classification_batch(const BatchInputs& in,
                                                            std::span<const int> undecided_pos,
                                                            int n);

// Sum over undecided items of the cheapest eligible pair's expected votes;
// items with every pair at the cap contribute nothing.
double expected_remaining_cost(const BatchInputs& in, std::span<const int> undecided_pos);

// Budget-exhaustion fallback: In iff the product of raw ML predictions is at
// least 0.5.
std::vector<Decision> finalize_with_ml(std::span<const int> undecided_pos, const PsiTable& psi_ml,
                                       const Dataset& data, int iteration);

}  // namespace ahc
