#include "ahc/core.hpp"

#include <algorithm>

namespace ahc {

double clamp_accuracy(double a) {
    return std::clamp(a, kAccuracyLow, kAccuracyHigh);
}

const char* to_string(Arm a) {
    return a == Arm::Learn ? "learn" : "exploit";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::In: return "in";
        case Verdict::Out: return "out";
        default: return "undecided";
    }
}

const char* to_string(DecisionSource s) {
    return s == DecisionSource::Hybrid ? "hybrid" : "ml_fallback";
}

void VoteLedger::append(const Vote& v) {
    if (!votes_.empty() && v.iteration < votes_.back().iteration) {
        throw std::invalid_argument("vote iteration decreased in ledger order");
    }
    votes_.push_back(v);
    const std::uint64_t key = pair_key(v.item_id, v.predicate_id);
    auto it = entry_index_.find(key);
    if (it == entry_index_.end()) {
        it = entry_index_.emplace(key, static_cast<int>(entries_.size())).first;
        entries_.push_back(PairEntry{v.item_id, v.predicate_id, {}, {}});
    }
    PairEntry& e = entries_[static_cast<std::size_t>(it->second)];
    if (v.value == VoteValue::Yes) {
        ++e.all.yes;
        if (v.purpose == VotePurpose::Learning) ++e.learning.yes;
    } else {
        ++e.all.no;
        if (v.purpose == VotePurpose::Learning) ++e.learning.no;
    }
}

PairCounts VoteLedger::counts(int item_id, int predicate_id) const {
    auto it = entry_index_.find(pair_key(item_id, predicate_id));
    if (it == entry_index_.end()) return {};
    return entries_[static_cast<std::size_t>(it->second)].all;
}

PairCounts VoteLedger::learning_counts(int item_id, int predicate_id) const {
    auto it = entry_index_.find(pair_key(item_id, predicate_id));
    if (it == entry_index_.end()) return {};
    return entries_[static_cast<std::size_t>(it->second)].learning;
}

void record_votes(VoteLedger& ledger, BudgetLedger& budget, std::span<const Vote> votes) {
    const int n = static_cast<int>(votes.size());
    if (budget.spent + n > budget.total) {
        throw BudgetExceeded("recording " + std::to_string(n) + " votes would exceed budget " +
                             std::to_string(budget.total) + " (spent " +
                             std::to_string(budget.spent) + ")");
    }
    for (const Vote& v : votes) ledger.append(v);
    budget.spent += n;
}

MajorityLabel majority_label(const PairCounts& counts) {
    if (counts.yes > counts.no) return MajorityLabel::Yes;
    if (counts.no > counts.yes) return MajorityLabel::No;
    return MajorityLabel::Abstain;
}

MajorityLabel majority_label(std::span<const Vote> votes) {
    PairCounts c;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        if (votes[i].item_id != votes[0].item_id ||
            votes[i].predicate_id != votes[0].predicate_id) {
            throw std::invalid_argument("majority_label: votes span multiple pairs");
        }
        if (votes[i].value == VoteValue::Yes) ++c.yes; else ++c.no;
    }
    return majority_label(c);
}

double estimate_selectivity(int positives, int n) {
    if (n <= 0) return 0.5;
    return (positives + 1.0) / (n + 2.0);
}

double estimate_selectivity(const std::vector<int>& labels) {
    int pos = 0;
    for (int y : labels) pos += (y != 0);
    return estimate_selectivity(pos, static_cast<int>(labels.size()));
}

PoolState::PoolState(const std::vector<int>& item_ids) : ids_(item_ids) {
    std::sort(ids_.begin(), ids_.end());
    pos_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!pos_.emplace(ids_[i], static_cast<int>(i)).second) {
            throw std::invalid_argument("duplicate item id " + std::to_string(ids_[i]));
        }
    }
    decided_at_.assign(ids_.size(), -1);
}

bool PoolState::is_decided(int item_id) const {
    auto it = pos_.find(item_id);
    if (it == pos_.end()) throw std::out_of_range("unknown item id " + std::to_string(item_id));
    return decided_at_[static_cast<std::size_t>(it->second)] >= 0;
}

const Decision& PoolState::decision(int item_id) const {
    auto it = pos_.find(item_id);
    if (it == pos_.end()) throw std::out_of_range("unknown item id " + std::to_string(item_id));
    const int at = decided_at_[static_cast<std::size_t>(it->second)];
    if (at < 0) throw std::logic_error("item " + std::to_string(item_id) + " is undecided");
    return log_[static_cast<std::size_t>(at)];
}

void PoolState::decide(int item_id, Verdict v, DecisionSource s, int iteration) {
    if (v == Verdict::Undecided) {
        throw std::invalid_argument("cannot record an Undecided verdict");
    }
    auto it = pos_.find(item_id);
    if (it == pos_.end()) throw std::out_of_range("unknown item id " + std::to_string(item_id));
    int& at = decided_at_[static_cast<std::size_t>(it->second)];
    if (at >= 0) {
        throw std::logic_error("item " + std::to_string(item_id) + " already decided");
    }
    at = static_cast<int>(log_.size());
    log_.push_back(Decision{item_id, v, s, iteration});
}

std::vector<int> PoolState::undecided_ids() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(undecided_count()));
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (decided_at_[i] < 0) out.push_back(ids_[i]);
    }
    return out;
}

std::vector<int> PoolState::decided_ids() const {
    std::vector<int> out;
    out.reserve(log_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (decided_at_[i] >= 0) out.push_back(ids_[i]);
    }
    return out;
}

void Dataset::rebuild_index() {
    index_.clear();
    index_.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!index_.emplace(items[i].id, static_cast<int>(i)).second) {
            throw std::invalid_argument("duplicate item id " + std::to_string(items[i].id));
        }
    }
    pred_index_.clear();
    for (std::size_t p = 0; p < predicates.size(); ++p) {
        pred_index_.emplace(predicates[p].id, static_cast<int>(p));
    }
}

int Dataset::index_of(int item_id) const {
    auto it = index_.find(item_id);
    return it == index_.end() ? -1 : it->second;
}

int Dataset::predicate_index(int predicate_id) const {
    auto it = pred_index_.find(predicate_id);
    return it == pred_index_.end() ? -1 : it->second;
}

bool Dataset::item_passes_all(int item_pos) const {
    for (int g : gold[static_cast<std::size_t>(item_pos)]) {
        if (g == 0) return false;
    }
    return true;
}

}  // namespace ahc
