#include "doctest.h"

#include "ahc/metrics.hpp"
#include "ahc/rng.hpp"

#include <cmath>
#include <stdexcept>

using namespace ahc;

namespace {

Dataset two_pred_pool() {
    Dataset data;
    for (int i = 1; i <= 6; ++i) data.items.push_back(Item{i, "", {}});
    data.predicates = {Predicate{1, "p1", 0.5, 0.9}, Predicate{2, "p2", 0.5, 0.9}};
    data.gold = {{1, 1}, {1, 1}, {1, 0}, {0, 1}, {0, 0}, {1, 1}};  // positives: 1, 2, 6
    data.rebuild_index();
    return data;
}

Decision decide(int item, Verdict v) {
    Decision d;
    d.item_id = item;
    d.verdict = v;
    return d;
}

}  // namespace

TEST_CASE("fbeta matches the direct formula on the worked example") {
    // P = 3/4, R = 3/5, F3 = 10 * 0.45 / (9 * 0.75 + 0.6).
    CHECK(fbeta_score(3, 1, 2, 3.0) == doctest::Approx(0.612245).epsilon(1e-6));
    CHECK(fbeta_score(3, 1, 2, 1.0) == doctest::Approx(2.0 * 0.75 * 0.6 / 1.35));
}

TEST_CASE("fbeta degenerate cases") {
    CHECK(fbeta_score(0, 0, 5, 3.0) == 0.0);
    CHECK(fbeta_score(0, 5, 0, 3.0) == 0.0);
    CHECK(fbeta_score(0, 0, 0, 1.0) == 0.0);
    CHECK(fbeta_score(5, 0, 0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("f1 is the harmonic mean and f_beta approaches recall for large beta") {
    Rng rng(20240814);
    for (int trial = 0; trial < 1000; ++trial) {
        const long tp = static_cast<long>(rng.below(50));
        const long fp = static_cast<long>(rng.below(50));
        const long fn = static_cast<long>(rng.below(50));
        const double p = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
        const double r = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
        if (p > 0.0 && r > 0.0) {
            CHECK(fbeta_score(tp, fp, fn, 1.0) == doctest::Approx(2.0 * p * r / (p + r)));
            CHECK(std::abs(fbeta_score(tp, fp, fn, 100.0) - r) < 1e-2);
        } else {
            CHECK(fbeta_score(tp, fp, fn, 1.0) == 0.0);
        }
    }
}

TEST_CASE("fbeta is monotone in recall for fixed precision") {
    // Fixed P = 1/2 with growing recall.
    double prev = -1.0;
    for (long tp = 1; tp <= 20; ++tp) {
        const double f = fbeta_score(tp, tp, 20 - tp, 3.0);
        CHECK(f > prev);
        prev = f;
    }
}

TEST_CASE("compute_metrics scores the conjunction and counts every item") {
    const Dataset data = two_pred_pool();
    std::vector<Decision> decisions = {
        decide(1, Verdict::In),  decide(2, Verdict::Out), decide(3, Verdict::Out),
        decide(4, Verdict::In),  decide(5, Verdict::Out), decide(6, Verdict::In),
    };
    const double betas[] = {1.0, 3.0};
    const MetricBundle m = compute_metrics(decisions, data, betas);
    CHECK(m.tp == 2);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
    CHECK(m.tn == 2);
    CHECK(m.tp + m.fp + m.fn + m.tn == 6);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == doctest::Approx(2.0 / 3.0));
    CHECK(m.f(1.0) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(m.f(2.0), std::out_of_range);
}

TEST_CASE("perfect decisions give unit scores for every beta") {
    const Dataset data = two_pred_pool();
    std::vector<Decision> decisions;
    for (int i = 1; i <= 6; ++i) {
        const bool positive = i == 1 || i == 2 || i == 6;
        decisions.push_back(decide(i, positive ? Verdict::In : Verdict::Out));
    }
    const double betas[] = {1.0, 3.0, 10.0};
    const MetricBundle m = compute_metrics(decisions, data, betas);
    CHECK(m.precision == doctest::Approx(1.0));
    CHECK(m.recall == doctest::Approx(1.0));
    CHECK(m.f(1.0) == doctest::Approx(1.0));
    CHECK(m.f(3.0) == doctest::Approx(1.0));
    CHECK(m.f(10.0) == doctest::Approx(1.0));
}

TEST_CASE("compute_metrics is invariant to decision order") {
    const Dataset data = two_pred_pool();
    std::vector<Decision> decisions = {
        decide(1, Verdict::In),  decide(2, Verdict::Out), decide(3, Verdict::Out),
        decide(4, Verdict::In),  decide(5, Verdict::Out), decide(6, Verdict::In),
    };
    const double betas[] = {3.0};
    const MetricBundle a = compute_metrics(decisions, data, betas);
    std::reverse(decisions.begin(), decisions.end());
    const MetricBundle b = compute_metrics(decisions, data, betas);
    CHECK(a.tp == b.tp);
    CHECK(a.fp == b.fp);
    CHECK(a.fn == b.fn);
    CHECK(a.f(3.0) == b.f(3.0));  // identical counts give bit-identical scores
}

TEST_CASE("compute_metrics rejects unknown items and undecided verdicts") {
    const Dataset data = two_pred_pool();
    const double betas[] = {1.0};
    std::vector<Decision> unknown = {decide(99, Verdict::In)};
    CHECK_THROWS_AS(compute_metrics(unknown, data, betas), MissingGold);
    std::vector<Decision> undecided = {decide(1, Verdict::Undecided)};
    CHECK_THROWS_AS(compute_metrics(undecided, data, betas), std::invalid_argument);
}
