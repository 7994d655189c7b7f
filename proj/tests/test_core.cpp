#include "doctest.h"

#include "ahc/core.hpp"

#include <vector>

using namespace ahc;

namespace {

Vote mk_vote(int item, int pred, VoteValue value, int iteration = 1) {
    Vote v;
    v.item_id = item;
    v.predicate_id = pred;
    v.value = value;
    v.iteration = iteration;
    return v;
}

}  // namespace

TEST_CASE("clamp_accuracy keeps odds finite at both extremes") {
    CHECK(clamp_accuracy(1.0) == kAccuracyHigh);
    CHECK(clamp_accuracy(0.0) == kAccuracyLow);
    CHECK(clamp_accuracy(0.5) == kAccuracyLow);
    CHECK(clamp_accuracy(0.9) == doctest::Approx(0.9));
    CHECK(clamp_accuracy(kAccuracyHigh) == doctest::Approx(kAccuracyHigh));
}

TEST_CASE("record_votes with an empty sequence changes nothing") {
    VoteLedger ledger;
    BudgetLedger budget{10, 0};
    record_votes(ledger, budget, {});
    CHECK(ledger.size() == 0);
    CHECK(budget.spent == 0);
}

TEST_CASE("record_votes counts spend and extends the ledger in order") {
    VoteLedger ledger;
    BudgetLedger budget{10, 0};
    std::vector<Vote> votes = {mk_vote(1, 1, VoteValue::Yes), mk_vote(2, 1, VoteValue::No),
                               mk_vote(3, 1, VoteValue::Yes)};
    record_votes(ledger, budget, votes);
    CHECK(budget.spent == 3);
    REQUIRE(ledger.size() == 3);
    CHECK(ledger.votes()[0].item_id == 1);
    CHECK(ledger.votes()[2].item_id == 3);
}

TEST_CASE("record_votes refuses a batch that does not fit, untouched") {
    VoteLedger ledger;
    BudgetLedger budget{10, 8};
    std::vector<Vote> votes(5, mk_vote(1, 1, VoteValue::Yes));
    CHECK_THROWS_AS(record_votes(ledger, budget, votes), BudgetExceeded);
    CHECK(ledger.size() == 0);
    CHECK(budget.spent == 8);
}

TEST_CASE("ledger spent always equals vote count") {
    VoteLedger ledger;
    BudgetLedger budget{100, 0};
    for (int i = 1; i <= 7; ++i) {
        std::vector<Vote> votes(1, mk_vote(i, 1, VoteValue::Yes, i));
        record_votes(ledger, budget, votes);
        CHECK(budget.spent == ledger.size());
    }
}

TEST_CASE("ledger rejects decreasing iterations") {
    VoteLedger ledger;
    ledger.append(mk_vote(1, 1, VoteValue::Yes, 3));
    CHECK_THROWS_AS(ledger.append(mk_vote(1, 1, VoteValue::Yes, 2)), std::invalid_argument);
}

TEST_CASE("ledger indexes counts by pair and tracks learning votes separately") {
    VoteLedger ledger;
    Vote a = mk_vote(7, 1, VoteValue::Yes);
    a.purpose = VotePurpose::Learning;
    Vote b = mk_vote(7, 1, VoteValue::No);
    b.purpose = VotePurpose::Exploitation;
    Vote c = mk_vote(7, 2, VoteValue::Yes);
    c.purpose = VotePurpose::Exploitation;
    ledger.append(a);
    ledger.append(b);
    ledger.append(c);

    CHECK(ledger.counts(7, 1).yes == 1);
    CHECK(ledger.counts(7, 1).no == 1);
    CHECK(ledger.learning_counts(7, 1).yes == 1);
    CHECK(ledger.learning_counts(7, 1).no == 0);
    CHECK(ledger.counts(7, 2).yes == 1);
    CHECK(ledger.counts(9, 9).total() == 0);

    REQUIRE(ledger.pair_entries().size() == 2);
    CHECK(ledger.pair_entries()[0].item_id == 7);
    CHECK(ledger.pair_entries()[0].predicate_id == 1);
    CHECK(ledger.pair_entries()[1].predicate_id == 2);
}

TEST_CASE("majority_label takes strict majorities and abstains on ties") {
    PairCounts two_one{2, 1};
    CHECK(majority_label(two_one) == MajorityLabel::Yes);
    PairCounts one_two{1, 2};
    CHECK(majority_label(one_two) == MajorityLabel::No);
    PairCounts tie{1, 1};
    CHECK(majority_label(tie) == MajorityLabel::Abstain);
    PairCounts empty{0, 0};
    CHECK(majority_label(empty) == MajorityLabel::Abstain);

    std::vector<Vote> votes = {mk_vote(1, 1, VoteValue::Yes), mk_vote(1, 1, VoteValue::Yes),
                               mk_vote(1, 1, VoteValue::No)};
    CHECK(majority_label(votes) == MajorityLabel::Yes);
    std::vector<Vote> split = {mk_vote(1, 1, VoteValue::Yes), mk_vote(1, 1, VoteValue::No)};
    CHECK(majority_label(split) == MajorityLabel::Abstain);
    CHECK(majority_label(std::span<const Vote>{}) == MajorityLabel::Abstain);
}

TEST_CASE("estimate_selectivity applies Laplace smoothing") {
    CHECK(estimate_selectivity(std::vector<int>{}) == doctest::Approx(0.5));
    CHECK(estimate_selectivity(std::vector<int>{1, 1, 0, 0}) == doctest::Approx(0.5));
    std::vector<int> labels(61, 1);
    labels.resize(100, 0);
    CHECK(estimate_selectivity(labels) == doctest::Approx(62.0 / 102.0));
    CHECK(estimate_selectivity(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("pool state partitions the pool and keeps decisions irrevocable") {
    PoolState pool(std::vector<int>{5, 1, 3});
    CHECK(pool.size() == 3);
    CHECK(pool.undecided_count() == 3);
    CHECK(pool.undecided_ids() == std::vector<int>{1, 3, 5});

    pool.decide(3, Verdict::In, DecisionSource::Hybrid, 2);
    CHECK(pool.is_decided(3));
    CHECK(pool.undecided_ids() == std::vector<int>{1, 5});
    CHECK(pool.decided_ids() == std::vector<int>{3});
    CHECK(pool.decided_count() + pool.undecided_count() == pool.size());
    CHECK(pool.decision(3).verdict == Verdict::In);
    CHECK(pool.decision(3).iteration == 2);

    CHECK_THROWS_AS(pool.decide(3, Verdict::Out, DecisionSource::Hybrid, 3),
                    std::logic_error);
    CHECK_THROWS_AS(pool.decide(3, Verdict::In, DecisionSource::Hybrid, 3), std::logic_error);
    CHECK(pool.decision(3).verdict == Verdict::In);

    CHECK_THROWS_AS(pool.decide(9, Verdict::In, DecisionSource::Hybrid, 1), std::out_of_range);
    CHECK_THROWS_AS(pool.decide(1, Verdict::Undecided, DecisionSource::Hybrid, 1),
                    std::invalid_argument);
}

TEST_CASE("dataset lookups and the conjunction of gold labels") {
    Dataset data;
    data.items = {Item{10, "a", {"a"}}, Item{20, "b", {"b"}}};
    data.predicates = {Predicate{1, "p1", 0.5, 0.9}, Predicate{2, "p2", 0.5, 0.9}};
    data.gold = {{1, 1}, {1, 0}};
    data.rebuild_index();

    CHECK(data.index_of(10) == 0);
    CHECK(data.index_of(20) == 1);
    CHECK(data.index_of(30) == -1);
    CHECK(data.predicate_index(2) == 1);
    CHECK(data.predicate_index(7) == -1);
    CHECK(data.item_passes_all(0));
    CHECK_FALSE(data.item_passes_all(1));
}

TEST_CASE("psi table stores per-pair values with a default fill") {
    PsiTable t(2, 3, 0.5);
    CHECK(t.items() == 2);
    CHECK(t.preds() == 3);
    CHECK(t.at(1, 2) == doctest::Approx(0.5));
    t.at(1, 2) = 0.75;
    CHECK(t.at(1, 2) == doctest::Approx(0.75));
    t.fill(0.25);
    CHECK(t.at(1, 2) == doctest::Approx(0.25));
}

TEST_CASE("enum names render for traces") {
    CHECK(std::string(to_string(Arm::Learn)) == "learn");
    CHECK(std::string(to_string(Arm::Exploit)) == "exploit");
    CHECK(std::string(to_string(Verdict::In)) == "in");
    CHECK(std::string(to_string(Verdict::Out)) == "out");
    CHECK(std::string(to_string(Verdict::Undecided)) == "undecided");
    CHECK(std::string(to_string(DecisionSource::Hybrid)) == "hybrid");
    CHECK(std::string(to_string(DecisionSource::MlFallback)) == "ml_fallback");
}
