#include "ahc/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace ahc {

double predicate_posterior(double prior, const PairCounts& votes, double accuracy) {
    if (prior < 0.0 || prior > 1.0) throw std::invalid_argument("prior outside [0,1]");
    if (prior == 0.0 || prior == 1.0) return prior;
    const double a = clamp_accuracy(accuracy);
    const int d = votes.yes - votes.no;
    if (d == 0) return prior;
    const double ratio = std::pow(a / (1.0 - a), static_cast<double>(d));
    return prior * ratio / (prior * ratio + (1.0 - prior));
}

double inclusion_probability(std::span<const double> posteriors) {
    double p = 1.0;
    for (double q : posteriors) p *= q;
    return p;
}

Verdict apply_decision_rule(std::span<const double> posteriors, double inclusion,
                            const DecisionThresholds& th) {
    if (!th.valid()) throw std::invalid_argument("invalid decision thresholds");
    for (double q : posteriors) {
        if (q < th.tau_out) return Verdict::Out;
    }
    if (inclusion < th.tau_out) return Verdict::Out;
    if (inclusion > th.tau_in) return Verdict::In;
    return Verdict::Undecided;
}

PosteriorTable compute_posteriors(const PsiTable& priors, const VoteLedger& ledger,
                                  const Dataset& data, std::span<const double> accuracy) {
    const int n_items = priors.items();
    const int n_preds = priors.preds();
    PosteriorTable out;
    out.prob = priors;
    for (const VoteLedger::PairEntry& e : ledger.pair_entries()) {
        const int item_pos = data.index_of(e.item_id);
        const int pred_pos = data.predicate_index(e.predicate_id);
        if (item_pos < 0 || pred_pos < 0) continue;
        out.prob.at(item_pos, pred_pos) =
            predicate_posterior(priors.at(item_pos, pred_pos), e.all, accuracy[pred_pos]);
    }
    out.inclusion.resize(n_items);
    for (int i = 0; i < n_items; ++i) {
        double p = 1.0;
        for (int j = 0; j < n_preds; ++j) p *= out.prob.at(i, j);
        out.inclusion[i] = p;
    }
    return out;
}

namespace {

double logit(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log(p / (1.0 - p));
}

}  // namespace

double expected_votes_to_decision(const BatchInputs& in, int item_pos, int pred_pos) {
    const double a = clamp_accuracy(in.accuracy[pred_pos]);
    const double step = std::log(a / (1.0 - a));
    const double pair_lo = logit(in.posteriors->prob.at(item_pos, pred_pos));
    const double incl_lo = logit(in.posteriors->inclusion[item_pos]);
    const double lo_out = logit(in.thresholds.tau_out);
    const double lo_in = logit(in.thresholds.tau_in);
    const double d = std::min({std::max(pair_lo - lo_out, 0.0), std::max(lo_in - incl_lo, 0.0),
                               std::max(incl_lo - lo_out, 0.0)});
    return d / step;
}

std::vector<ClassificationPair> select_classification_batch(const BatchInputs& in,
                                                            std::span<const int> undecided_pos,
                                                            int n) {
    if (n < 1) throw std::invalid_argument("classification batch size must be at least 1");
    struct Scored {
        double votes;
        double pred_priority;
        int item_id;
        int item_pos;
        int pred_pos;
    };
    std::vector<Scored> scored;
    const int n_preds = static_cast<int>(in.data->predicates.size());
    for (int item_pos : undecided_pos) {
        const int item_id = in.data->items[static_cast<std::size_t>(item_pos)].id;
        for (int p = 0; p < n_preds; ++p) {
            const int pred_id = in.data->predicates[static_cast<std::size_t>(p)].id;
            if (in.ledger->counts(item_id, pred_id).total() >= in.thresholds.max_votes_per_pair) {
                continue;
            }
            const double priority =
                (1.0 - in.selectivity[p]) * (clamp_accuracy(in.accuracy[p]) - 0.5);
            scored.push_back(
                {expected_votes_to_decision(in, item_pos, p), priority, item_id, item_pos, p});
        }
    }
    auto rank = [](const Scored& x, const Scored& y) {
        if (x.votes != y.votes) return x.votes < y.votes;
        if (x.pred_priority != y.pred_priority) return x.pred_priority > y.pred_priority;
        if (x.item_id != y.item_id) return x.item_id < y.item_id;
        return x.pred_pos < y.pred_pos;
    };
    std::sort(scored.begin(), scored.end(), rank);
    // One pair per item per batch: an item's pairs share the inclusion distance,
    // so without this cap a near-Out item would get votes on every predicate when
    // polling its best one settles the decision.
    std::vector<ClassificationPair> out;
    out.reserve(static_cast<std::size_t>(n));
    std::unordered_set<int> taken;
    for (const Scored& s : scored) {
        if (static_cast<int>(out.size()) == n) break;
        if (!taken.insert(s.item_id).second) continue;
        out.push_back({s.item_pos, s.pred_pos});
    }
    return out;
}

double expected_remaining_cost(const BatchInputs& in, std::span<const int> undecided_pos) {
    const int n_preds = static_cast<int>(in.data->predicates.size());
    double total = 0.0;
    for (int item_pos : undecided_pos) {
        const int item_id = in.data->items[static_cast<std::size_t>(item_pos)].id;
        double best = std::numeric_limits<double>::infinity();
        for (int p = 0; p < n_preds; ++p) {
            const int pred_id = in.data->predicates[static_cast<std::size_t>(p)].id;
            if (in.ledger->counts(item_id, pred_id).total() >= in.thresholds.max_votes_per_pair) {
                continue;
            }
            best = std::min(best, expected_votes_to_decision(in, item_pos, p));
        }
        if (best < std::numeric_limits<double>::infinity()) total += best;
    }
    return total;
}

std::vector<Decision> finalize_with_ml(std::span<const int> undecided_pos, const PsiTable& psi_ml,
                                       const Dataset& data, int iteration) {
    std::vector<Decision> out;
    out.reserve(undecided_pos.size());
    for (int item_pos : undecided_pos) {
        double p = 1.0;
        for (int j = 0; j < psi_ml.preds(); ++j) p *= psi_ml.at(item_pos, j);
        out.push_back(Decision{data.items[static_cast<std::size_t>(item_pos)].id,
                               p >= 0.5 ? Verdict::In : Verdict::Out, DecisionSource::MlFallback,
                               iteration});
    }
    return out;
}

}  // namespace ahc
