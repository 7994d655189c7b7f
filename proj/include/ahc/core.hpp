#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ahc {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyCorpus : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MissingGold : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ExhaustedVotes : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line_number)
        : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    int line;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Crowd accuracies are kept strictly inside (0.5, 1) so likelihood ratios
// stay finite even when a simulated crowd is configured as perfect.
inline constexpr double kAccuracyLow = 0.5 + 1e-6;
inline constexpr double kAccuracyHigh = 1.0 - 1e-3;

double clamp_accuracy(double a);

struct Item {
    int id = 0;
    std::string text;
    std::vector<std::string> tokens;  // cached lowercase tokens
};

struct Predicate {
    int id = 0;
    std::string description;
    double selectivity_estimate = 0.5;  // running estimate, not ground truth
    double crowd_accuracy = 0.9;        // clamped
};

enum class Arm : int { Learn = 0, Exploit = 1 };
enum class VoteValue : int { No = 0, Yes = 1 };
enum class VotePurpose : int { Learning = 0, Exploitation = 1 };
enum class Verdict : int { Undecided = 0, In = 1, Out = 2 };
enum class DecisionSource : int { Hybrid = 0, MlFallback = 1 };
enum class MajorityLabel : int { No = 0, Yes = 1, Abstain = 2 };

const char* to_string(Arm a);
const char* to_string(Verdict v);
const char* to_string(DecisionSource s);

struct Vote {
    int item_id = 0;
    int predicate_id = 0;
    VoteValue value = VoteValue::No;
    int iteration = 1;
    VotePurpose purpose = VotePurpose::Exploitation;
    int worker_id = -1;  // optional pass-through
};

struct PairCounts {
    int yes = 0;
    int no = 0;
    int total() const { return yes + no; }
};

inline std::uint64_t pair_key(int item_id, int predicate_id) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(item_id)) << 32) |
           static_cast<std::uint32_t>(predicate_id);
}

// Append-only vote log shared by both arms: every vote is usable both as
// training signal and as classification evidence.
class VoteLedger {
public:
    struct PairEntry {
        int item_id = 0;
        int predicate_id = 0;
        PairCounts all;       // every vote on this pair
        PairCounts learning;  // learning-arm votes only
    };

    // Iterations must be non-decreasing in append order.
    void append(const Vote& v);

    const std::vector<Vote>& votes() const { return votes_; }
    int size() const { return static_cast<int>(votes_.size()); }
    bool empty() const { return votes_.empty(); }

    // Zero counts for pairs never voted on.
    PairCounts counts(int item_id, int predicate_id) const;
    PairCounts learning_counts(int item_id, int predicate_id) const;

    // Pairs in first-touch order.
    const std::vector<PairEntry>& pair_entries() const { return entries_; }

private:
    std::vector<Vote> votes_;
    std::vector<PairEntry> entries_;
    std::unordered_map<std::uint64_t, int> entry_index_;
};

struct BudgetLedger {
    int total = 0;
    int spent = 0;
    int remaining() const { return total - spent; }
};

// Appends votes to the ledger and charges the budget. Throws BudgetExceeded
// without touching either ledger if the batch does not fit; callers trim
// batches to the remaining budget first.
void record_votes(VoteLedger& ledger, BudgetLedger& budget, std::span<const Vote> votes);

MajorityLabel majority_label(const PairCounts& counts);
MajorityLabel majority_label(std::span<const Vote> votes);  // all votes must share a pair

// Laplace-smoothed positive rate: (k+1)/(n+2); 0.5 with no data.
double estimate_selectivity(int positives, int n);
double estimate_selectivity(const std::vector<int>& labels);

struct Decision {
    int item_id = 0;
    Verdict verdict = Verdict::Undecided;
    DecisionSource source = DecisionSource::Hybrid;
    int iteration = 0;
};

// Decided/undecided partition of the pool. Decisions are irrevocable.
class PoolState {
public:
    PoolState() = default;
    explicit PoolState(const std::vector<int>& item_ids);

    int size() const { return static_cast<int>(ids_.size()); }
    int decided_count() const { return static_cast<int>(log_.size()); }
    int undecided_count() const { return size() - decided_count(); }

    bool contains(int item_id) const { return pos_.count(item_id) > 0; }
    bool is_decided(int item_id) const;
    const Decision& decision(int item_id) const;

    void decide(int item_id, Verdict v, DecisionSource s, int iteration);

    std::vector<int> undecided_ids() const;  // ascending
    std::vector<int> decided_ids() const;    // ascending
    const std::vector<Decision>& decision_log() const { return log_; }

private:
    std::vector<int> ids_;  // ascending
    std::unordered_map<int, int> pos_;
    std::vector<int> decided_at_;  // index into log_, -1 if undecided
    std::vector<Decision> log_;
};

// The screening pool plus gold labels (used for simulation and scoring only).
struct Dataset {
    std::vector<Item> items;
    std::vector<Predicate> predicates;
    std::vector<std::vector<int>> gold;  // [item position][predicate position], 0/1

    void rebuild_index();
    int index_of(int item_id) const;         // -1 if absent
    int predicate_index(int predicate_id) const;
    bool item_passes_all(int item_pos) const;

private:
    std::unordered_map<int, int> index_;
    std::unordered_map<int, int> pred_index_;
};

// Dense per-(item, predicate) probability table.
class PsiTable {
public:
    PsiTable() = default;
    PsiTable(int items, int preds, double fill = 0.5)
        : items_(items), preds_(preds),
          v_(static_cast<std::size_t>(items) * static_cast<std::size_t>(preds), fill) {}

    double at(int item_pos, int pred) const {
        return v_[static_cast<std::size_t>(item_pos) * preds_ + pred];
    }
    double& at(int item_pos, int pred) {
        return v_[static_cast<std::size_t>(item_pos) * preds_ + pred];
    }
    int items() const { return items_; }
    int preds() const { return preds_; }
    void fill(double value) { v_.assign(v_.size(), value); }

private:
    int items_ = 0;
    int preds_ = 0;
    std::vector<double> v_;
};

// Observable state at the top of an iteration.
struct IterationContext {
    int t = 0;
    int spent = 0;
    int budget = 0;
    int ci_size = 0;
    int ui_size = 0;
    int labels_collected = 0;             // training labels currently derivable
    double expected_remaining_cost = 0.0;  // votes, summed over undecided items
    const std::vector<double>* fbeta_history = nullptr;  // pooled CV estimates per learning retrain
    const PsiTable* psi_ml = nullptr;
    const PsiTable* psi_hc = nullptr;
};

}  // namespace ahc
